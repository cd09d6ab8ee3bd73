//! Spin-1/2 in a static field plus a rotating transverse field.

use serde::Serialize;

use crate::gates::{pauli_x, pauli_z};
use crate::state::{c, identity, Mat};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RabiField {
    /// Larmor frequency of the static field.
    pub omega0: f64,
    /// Strength of the rotating field.
    pub omega1: f64,
    /// Drive frequency.
    pub omega: f64,
}

impl RabiField {
    pub fn new(omega0: f64, omega1: f64, omega: f64) -> Self {
        RabiField { omega0, omega1, omega }
    }

    pub fn resonant(omega0: f64, omega1: f64) -> Self {
        RabiField::new(omega0, omega1, omega0)
    }

    pub fn detuning(&self) -> f64 {
        self.omega0 - self.omega
    }

    /// `Omega = sqrt((omega0 - omega)^2 + omega1^2)`
    pub fn rabi_frequency(&self) -> f64 {
        self.detuning().hypot(self.omega1)
    }
}

/// `e^{-i omega t sz/2} e^{-i[(omega0 - omega) sz + omega1 sx] t/2}`
pub fn rabi_propagator(f: &RabiField, t: f64) -> Mat {
    let big = f.rabi_frequency();
    let frame = {
        let mut m = identity(2);
        m[(0, 0)] = c(0.0, -f.omega * t / 2.0).exp();
        m[(1, 1)] = c(0.0, f.omega * t / 2.0).exp();
        m
    };
    let body = if big == 0.0 {
        identity(2)
    } else {
        let n = (pauli_z().scale(f.detuning()) + pauli_x().scale(f.omega1)).unscale(big);
        let (s, co) = (big * t / 2.0).sin_cos();
        identity(2).scale(co) - n * c(0.0, s)
    };
    frame * body
}

/// `(omega1 / Omega)^2 sin^2(Omega t / 2)`
pub fn spin_flip_prob(f: &RabiField, t: f64) -> f64 {
    let big = f.rabi_frequency();
    if big == 0.0 {
        return 0.0;
    }
    (f.omega1 / big).powi(2) * (big * t / 2.0).sin().powi(2)
}

/// Rows `t,flip_probability` sampled on `points` times in `[0, t_max]`.
pub fn rabi_trace_csv(f: &RabiField, t_max: f64, points: usize) -> String {
    let steps = points.max(2) - 1;
    let mut out = String::from("t,flip_probability\n");
    for i in 0..=steps {
        let t = t_max * i as f64 / steps as f64;
        out.push_str(&format!("{t},{}\n", spin_flip_prob(f, t)));
    }
    out
}
