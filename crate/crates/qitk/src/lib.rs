//! Desk-scale quantum information toolkit: state-vector and density-matrix
//! simulation, gate synthesis, textbook algorithms and protocols, classical
//! and quantum codes, pulse-level hardware models and Turing machines.

pub mod algorithms;
pub mod cli;
pub mod codes;
pub mod error;
pub mod gates;
pub mod hardware;
pub mod protocols;
pub mod qinfo;
pub mod state;
pub mod turing;

pub use error::{QError, Result};
pub use state::{
    apply_unitary, fidelity_to_pure, measure, partial_trace, tensor, DensityMatrix,
    MeasurementRecord, RngSeed, StateVector, C64,
};
