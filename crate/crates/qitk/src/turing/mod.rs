//! Turing-machine simulator, textbook fixtures and busy-beaver search.

pub mod beaver;
pub mod machine;

pub use beaver::{
    brute_force_beaver, busy_beaver_search, machine_count, machine_from_index, BeaverResult,
    LARGE_STEP_CAP, SMALL_STEP_CAP,
};
pub use machine::{
    adding_machine, example_machine, run, three_state_beaver, unary_pair, Instruction, Move, TapeRun,
    TuringMachine,
};
