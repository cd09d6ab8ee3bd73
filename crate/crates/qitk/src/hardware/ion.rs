//! Cirac-Zoller pulses on a chain of three-level ions sharing one phonon mode.
//!
//! Register layout: ion 0 is the most significant digit (base 3), the phonon
//! (`g = 0`, `e = 1`) is the least significant digit (base 2).

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{QError, Result};
use crate::state::{c, cis, cr, identity, Mat, C64, TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IonPulseKind {
    /// Carrier pulse between `|0>` and `|1>`.
    V,
    /// Red sideband between `|0>|e>` and `|1>|g>`.
    U1,
    /// Red sideband between `|0>|e>` and the auxiliary `|2>|g>`.
    U2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IonPulse {
    pub kind: IonPulseKind,
    /// `theta` for V pulses, `kappa` for U pulses.
    pub angle: f64,
    pub phase: f64,
    pub ion: usize,
    /// Lamb-Dicke parameter; bookkeeping only.
    pub eta: f64,
}

impl IonPulse {
    pub fn v(ion: usize, theta: f64, phi: f64) -> Self {
        IonPulse { kind: IonPulseKind::V, angle: theta, phase: phi, ion, eta: 0.0 }
    }

    pub fn u(aux: usize, ion: usize, kappa: f64, phi: f64) -> Result<Self> {
        let kind = match aux {
            1 => IonPulseKind::U1,
            2 => IonPulseKind::U2,
            _ => return Err(QError::InvalidArgument(format!("auxiliary level {aux} must be 1 or 2"))),
        };
        Ok(IonPulse { kind, angle: kappa, phase: phi, ion, eta: 0.0 })
    }
}

pub const MAX_IONS: usize = 6;

fn ion_dim(n_ions: usize) -> usize {
    3usize.pow(n_ions as u32) * 2
}

/// Weight of ion `k`'s digit in the register index.
fn stride(n_ions: usize, k: usize) -> usize {
    3usize.pow((n_ions - 1 - k) as u32) * 2
}

/// Row-major block on the (lower, upper) pair.
fn two_level(cos: f64, sin: f64, phi: f64) -> [[C64; 2]; 2] {
    let m = c(0.0, -sin);
    [[cr(cos), m * cis(phi)], [m * cis(-phi), cr(cos)]]
}

/// Full unitary of one pulse on `n_ions` ions and the phonon mode.
pub fn ion_pulse_unitary(p: &IonPulse, n_ions: usize) -> Result<Mat> {
    if n_ions == 0 || n_ions > MAX_IONS {
        return Err(QError::CapExceeded { dim: n_ions, cap: MAX_IONS });
    }
    if p.ion >= n_ions {
        return Err(QError::Targets(format!("ion {} outside a chain of {n_ions}", p.ion)));
    }
    if !p.angle.is_finite() || !p.phase.is_finite() {
        return Err(QError::InvalidArgument("pulse angle and phase must be finite".into()));
    }
    let dim = ion_dim(n_ions);
    let s = stride(n_ions, p.ion);
    let (sin, cos) = (p.angle / 2.0).sin_cos();
    let block = two_level(cos, sin, p.phase);
    let mut u = identity(dim);
    for idx in 0..dim {
        let level = idx / s % 3;
        let phonon = idx % 2;
        // (lower, upper) basis pair touched by this pulse, if any
        let pair = match p.kind {
            IonPulseKind::V if level == 0 => Some((idx, idx + s)),
            IonPulseKind::U1 | IonPulseKind::U2 if level == 0 && phonon == 1 => {
                let aux = if p.kind == IonPulseKind::U1 { 1 } else { 2 };
                Some((idx, idx - 1 + aux * s))
            }
            _ => None,
        };
        if let Some((lo, hi)) = pair {
            for (a, &r) in [lo, hi].iter().enumerate() {
                for (b, &col) in [lo, hi].iter().enumerate() {
                    u[(r, col)] = block[a][b];
                }
            }
        }
    }
    Ok(u)
}

/// Product of pulses, the first applied first.
pub fn pulse_sequence(pulses: &[IonPulse], n_ions: usize) -> Result<Mat> {
    let mut u = identity(ion_dim(n_ions));
    for p in pulses {
        u = ion_pulse_unitary(p, n_ions)? * u;
    }
    Ok(u)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IonGate {
    pub full: Mat,
    /// Restriction to ions `i, j` in `{0, 1}`, other ions in `|0>`, phonon in `|g>`;
    /// ion `i` is the high bit.
    pub logical: Mat,
    /// Largest population that escapes the logical sector.
    pub leak: f64,
}

fn restrict(full: Mat, i: usize, j: usize, n_ions: usize) -> Result<IonGate> {
    let idx = |x: usize| (x >> 1) * stride(n_ions, i) + (x & 1) * stride(n_ions, j);
    let mut logical = Mat::zeros(4, 4);
    let mut leak: f64 = 0.0;
    for col in 0..4 {
        let mut kept = 0.0;
        for row in 0..4 {
            let a = full[(idx(row), idx(col))];
            logical[(row, col)] = a;
            kept += a.norm_sqr();
        }
        leak = leak.max(1.0 - kept);
    }
    if leak > TOL {
        return Err(QError::Sanity(format!(
            "population {leak:e} left in auxiliary or phonon levels"
        )));
    }
    Ok(IonGate { full, logical, leak: leak.max(0.0) })
}

fn check_pair(i: usize, j: usize, n_ions: usize) -> Result<()> {
    if i == j || i >= n_ions || j >= n_ions {
        return Err(QError::Targets(format!("ions ({i}, {j}) in a chain of {n_ions}")));
    }
    Ok(())
}

fn cphase_pulses(i: usize, j: usize) -> [IonPulse; 3] {
    let u1 = IonPulse { kind: IonPulseKind::U1, angle: PI, phase: 0.0, ion: i, eta: 0.0 };
    let u2 = IonPulse { kind: IonPulseKind::U2, angle: 2.0 * PI, phase: 0.0, ion: j, eta: 0.0 };
    [u1, u2, u1]
}

/// `U1^(i)(pi, 0) U2^(j)(2 pi, 0) U1^(i)(pi, 0)`: controlled sign with the
/// phonon as a bus.
pub fn cz_cphase(i: usize, j: usize, n_ions: usize) -> Result<IonGate> {
    check_pair(i, j, n_ions)?;
    restrict(pulse_sequence(&cphase_pulses(i, j), n_ions)?, i, j, n_ions)
}

/// Controlled sign flanked by carrier pulses on the target,
/// `V^(j)(pi/2, -pi/2) CPh V^(j)(pi/2, pi/2)`; equals CNOT exactly.
pub fn cz_cnot(i: usize, j: usize, n_ions: usize) -> Result<IonGate> {
    cnot_with_flanks(i, j, n_ions, -PI / 2.0)
}

/// Same sequence with `V^(j)(pi/2, pi/2)` on both sides. The two flanks
/// multiply to `ZX` instead of cancelling, so the result is `(1 x ZX) CNOT`.
pub fn cz_cnot_equal_flanks(i: usize, j: usize, n_ions: usize) -> Result<IonGate> {
    cnot_with_flanks(i, j, n_ions, PI / 2.0)
}

fn cnot_with_flanks(i: usize, j: usize, n_ions: usize, last_phase: f64) -> Result<IonGate> {
    check_pair(i, j, n_ions)?;
    let [a, b, c3] = cphase_pulses(i, j);
    let seq = [IonPulse::v(j, PI / 2.0, PI / 2.0), a, b, c3, IonPulse::v(j, PI / 2.0, last_phase)];
    restrict(pulse_sequence(&seq, n_ions)?, i, j, n_ions)
}
