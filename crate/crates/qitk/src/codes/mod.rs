//! Entropy measures, binary linear codes, rate bounds and CSS quantum codes.

pub mod bounds;
pub mod css;
pub mod info;
pub mod linear;

pub use bounds::{bound_curves, bound_table, bounds_csv, quantum_bounds, BoundValues, QuantumBounds};
pub use css::{
    css_code, steane_code, steane_correct, steane_recover, CssCode, Pauli, PauliString,
    SteaneCorrection,
};
pub use info::{bsc_capacity, h2, hq, mutual_information, shannon_entropy, typical_count, TypicalCount};
pub use linear::{
    coset_leader_table, decode, format_word, hamming_734, hamming_shortcut, parse_word,
    repetition_code, Decoded, LinearCode, SyndromeTable,
};
