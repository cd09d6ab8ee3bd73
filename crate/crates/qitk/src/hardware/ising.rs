//! Two spins with an Ising coupling `2 J S1z S2z`, in units with hbar = 1.

use serde::Serialize;

use crate::state::{expm_hermitian, real_mat, Mat};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsingPair {
    pub omega1: f64,
    pub omega2: f64,
    pub j: f64,
}

fn sign(x: usize) -> f64 {
    if x % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `E_{x1 x2} = [(-1)^x1 w1 + (-1)^x2 w2 + (-1)^(x1+x2) J] / 2`, ordered 00, 01, 10, 11.
pub fn ising_levels(p: &IsingPair) -> [f64; 4] {
    let mut e = [0.0; 4];
    for (i, slot) in e.iter_mut().enumerate() {
        let (x1, x2) = (i >> 1, i & 1);
        *slot = 0.5 * (sign(x1) * p.omega1 + sign(x2) * p.omega2 + sign(x1 + x2) * p.j);
    }
    e
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsingTransitions {
    /// `|E11 - E10|`, the line a CNOT on spin 2 drives.
    pub t11_10: f64,
    pub t00_01: f64,
    pub t00_10: f64,
    pub t01_11: f64,
}

impl IsingTransitions {
    pub fn all(&self) -> [f64; 4] {
        [self.t11_10, self.t00_01, self.t00_10, self.t01_11]
    }
}

/// Single-flip transition frequencies.
pub fn ising_transitions(p: &IsingPair) -> IsingTransitions {
    let e = ising_levels(p);
    IsingTransitions {
        t11_10: (e[3] - e[2]).abs(),
        t00_01: (e[0] - e[1]).abs(),
        t00_10: (e[0] - e[2]).abs(),
        t01_11: (e[1] - e[3]).abs(),
    }
}

/// In the regime `w1 < w2 < -J < 0`, a pulse at `|w2| + J` addresses the
/// `|11> <-> |10>` line alone.
pub fn ising_cnot_check(p: &IsingPair) -> bool {
    let regime = p.omega1 < p.omega2 && p.omega2 < -p.j && -p.j < 0.0;
    let t = ising_transitions(p);
    let target = p.omega2.abs() + p.j;
    let gap = 1e-9 * (1.0 + target.abs());
    regime
        && (t.t11_10 - target).abs() < gap
        && [t.t00_01, t.t00_10, t.t01_11].iter().all(|&f| (f - target).abs() > gap)
}

/// `exp(-i phi/2 [-1/2 + S1z + S2z - 2 S1z S2z])`, which is `diag(1, 1, 1, e^{i phi})`.
pub fn ising_cphase(phi: f64) -> Mat {
    let h: Vec<f64> = (0..4)
        .map(|i| {
            let (s1, s2) = (0.5 * sign(i >> 1), 0.5 * sign(i & 1));
            -0.5 + s1 + s2 - 2.0 * s1 * s2
        })
        .collect();
    let h = real_mat(4, 4, &[h[0], 0., 0., 0., 0., h[1], 0., 0., 0., 0., h[2], 0., 0., 0., 0., h[3]]);
    expm_hermitian(&h, phi / 2.0)
}
