//! Pulse-level models: Rabi rotations, Ising-coupled spins, Cirac-Zoller
//! ion-trap gates, NMR product operators and Kane donor levels.

pub mod ion;
pub mod ising;
pub mod kane;
pub mod nmr;
pub mod rabi;

pub use ion::{
    cz_cnot, cz_cnot_equal_flanks, cz_cphase, ion_pulse_unitary, pulse_sequence, IonGate, IonPulse,
    IonPulseKind,
};
pub use ising::{ising_cnot_check, ising_cphase, ising_levels, ising_transitions, IsingPair, IsingTransitions};
pub use kane::{
    kane_cnot_schedule, kane_exchange, kane_hamiltonian, kane_hyperfine_crossover, kane_omega_j,
    kane_schedule_csv, kane_sector, kane_sector_hamiltonian, kane_sector_levels, kane_splitting,
    KaneParams, KaneScheduleRow, KaneSector,
};
pub use nmr::{
    bell_density, ground_state_density, nmr_bell_sequence, nmr_cnot_sequence, nmr_prepare_pseudo_pure,
    nmr_pulse, run_sequence, sequence_propagator, thermal_deviation, NmrPulse, NmrStep, NmrTrace,
    ProductOperatorState, BELL_PULSES, CNOT_PULSES, PSEUDO_PURE_PULSES,
};
pub use rabi::{rabi_propagator, rabi_trace_csv, spin_flip_prob, RabiField};
