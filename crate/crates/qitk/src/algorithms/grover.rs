//! Grover search with the phase-generalised kernel.
//!
//! The marked-item flip is `G1 = -|x0><x0| + beta (1 - |x0><x0|)` and the
//! diffusion is `G2 = delta - (1 + delta)|s><s|` with `|s>` the uniform
//! superposition; one iteration is `K = G2 G1`. The standard choice is
//! `beta = delta = 1`.

use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use crate::error::{QError, Result};
use crate::state::{c, cis, cr, mat, nearest_int, Mat, StateVector, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroverParams {
    pub beta: C64,
    pub delta: C64,
    /// `delta = e^{i phi}`
    pub phi: f64,
}

impl GroverParams {
    pub fn standard() -> GroverParams {
        GroverParams::phase(0.0)
    }

    /// `beta = delta = e^{i phi}`
    pub fn phase(phi: f64) -> GroverParams {
        GroverParams {
            beta: cis(phi),
            delta: cis(phi),
            phi,
        }
    }

    pub fn new(beta: C64, delta: C64) -> Result<GroverParams> {
        if (beta.norm() - 1.0).abs() > 1e-12 || (delta.norm() - 1.0).abs() > 1e-12 {
            return Err(QError::InvalidArgument("beta and delta must have unit modulus".into()));
        }
        Ok(GroverParams {
            beta,
            delta,
            phi: delta.arg(),
        })
    }
}

/// Kernel in the basis `{|x0>, |x_perp>}` where `|x_perp>` is the uniform
/// superposition of the `N - 1` unmarked items.
pub fn grover_reduced_kernel(n_items: u64, p: &GroverParams) -> Result<Mat> {
    if n_items < 2 {
        return Err(QError::InvalidArgument("Grover needs N >= 2".into()));
    }
    let n = n_items as f64;
    let (b, d) = (p.beta, p.delta);
    let one = cr(1.0);
    let s = (n - 1.0).sqrt();
    Ok(mat(
        2,
        2,
        &[
            (one + d * (1.0 - n)) / n,
            -b * (one + d) * s / n,
            (one + d) * s / n,
            b * (one + d - n) / n,
        ],
    ))
}

/// Initial uniform state in the reduced basis.
fn reduced_input(n_items: u64) -> [C64; 2] {
    let n = n_items as f64;
    [cr(1.0 / n.sqrt()), cr(((n - 1.0) / n).sqrt())]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroverSpectrum {
    #[serde(skip)]
    pub zeta1: C64,
    #[serde(skip)]
    pub zeta2: C64,
    /// Angular separation of the two eigenphases.
    pub delta_omega: f64,
}

/// Eigenvalues from the invariants, `zeta = Tr/2 -+ sqrt(Tr^2/4 - Det)`.
pub fn grover_spectrum(n_items: u64, p: &GroverParams) -> Result<GroverSpectrum> {
    let k = grover_reduced_kernel(n_items, p)?;
    let tr = k[(0, 0)] + k[(1, 1)];
    let det = k[(0, 0)] * k[(1, 1)] - k[(0, 1)] * k[(1, 0)];
    let root = (tr * tr / 4.0 - det).sqrt();
    let zeta1 = tr / 2.0 - root;
    let zeta2 = tr / 2.0 + root;
    let delta_omega = 2.0 * ((zeta1 - zeta2).norm() / 2.0).min(1.0).asin();
    Ok(GroverSpectrum {
        zeta1,
        zeta2,
        delta_omega,
    })
}

/// `|<x0| K^m |x_in>|^2` from the 2x2 kernel.
pub fn reduced_success(n_items: u64, p: &GroverParams, m: usize) -> Result<f64> {
    let k = grover_reduced_kernel(n_items, p)?;
    let [a0, a1] = reduced_input(n_items);
    let (mut x, mut y) = (a0, a1);
    for _ in 0..m {
        (x, y) = (k[(0, 0)] * x + k[(0, 1)] * y, k[(1, 0)] * x + k[(1, 1)] * y);
    }
    Ok(x.norm_sqr())
}

/// First local maximum of the success probability over `1..=max_m`, as
/// `(m, probability)`. Falls back to the last `m` if the curve is still rising.
pub fn grover_peak(n_items: u64, p: &GroverParams, max_m: usize) -> Result<(usize, f64)> {
    let k = grover_reduced_kernel(n_items, p)?;
    let [mut x, mut y] = reduced_input(n_items);
    let mut prev = (0, x.norm_sqr());
    for m in 1..=max_m {
        (x, y) = (k[(0, 0)] * x + k[(0, 1)] * y, k[(1, 0)] * x + k[(1, 1)] * y);
        let cur = x.norm_sqr();
        if m > 1 && cur < prev.1 {
            return Ok(prev);
        }
        prev = (m, cur);
    }
    Ok(prev)
}

/// `[pi sqrt(N) / (4 cos(phi/2))]` for the `beta = delta = e^{i phi}` family.
pub fn grover_optimal_m(n_items: u64, phi: f64) -> Result<u64> {
    if n_items < 2 || phi.abs() >= PI {
        return Err(QError::InvalidArgument(format!("need N >= 2 and |phi| < pi, got N={n_items}, phi={phi}")));
    }
    Ok(nearest_int(PI * (n_items as f64).sqrt() / (4.0 * (phi / 2.0).cos())) as u64)
}

/// `[(pi / (2 asin(1/sqrt N)) - 1) / 2]` for the standard kernel.
pub fn grover_exact_m(n_items: u64) -> Result<u64> {
    if n_items < 2 {
        return Err(QError::InvalidArgument("Grover needs N >= 2".into()));
    }
    let theta = (1.0 / (n_items as f64).sqrt()).asin();
    Ok(nearest_int(0.5 * (PI / (2.0 * theta) - 1.0)) as u64)
}

#[derive(Debug, Clone, Serialize)]
pub struct GroverResult {
    pub n_items: u64,
    pub iterations: usize,
    pub success_probability: f64,
    /// Reduced-kernel prediction for the same run.
    pub predicted: f64,
    pub outcome: u64,
    pub found: bool,
}

/// Full state-vector run on `n_qubits` qubits: `m` applications of the
/// kernel to the uniform state, then one measurement of the register.
pub fn grover_search<R: Rng + ?Sized>(
    n_qubits: usize,
    x0: u64,
    p: &GroverParams,
    m: usize,
    rng: &mut R,
) -> Result<GroverResult> {
    if n_qubits == 0 || n_qubits > 20 {
        return Err(QError::InvalidArgument(format!("{n_qubits} qubits unsupported")));
    }
    let n_items = 1u64 << n_qubits;
    if x0 >= n_items {
        return Err(QError::InvalidArgument(format!("marked item {x0} out of range")));
    }
    let amp = cr(1.0 / (n_items as f64).sqrt());
    let mut v = vec![amp; n_items as usize];
    let one = c(1.0, 0.0);
    for _ in 0..m {
        for (i, a) in v.iter_mut().enumerate() {
            *a *= if i as u64 == x0 { -one } else { p.beta };
        }
        // <s|v> |s> = mean(v) * 1
        let mean = v.iter().sum::<C64>() / n_items as f64;
        let shift = (one + p.delta) * mean;
        for a in v.iter_mut() {
            *a = p.delta * *a - shift;
        }
    }
    let state = StateVector::normalized(2, n_qubits, v)?;
    let success = state.amplitude(x0 as usize).norm_sqr();
    let sites: Vec<usize> = (0..n_qubits).rev().collect();
    let outcome = state.measure(&sites, rng)?.value() as u64;
    Ok(GroverResult {
        n_items,
        iterations: m,
        success_probability: success,
        predicted: reduced_success(n_items, p, m)?,
        outcome,
        found: outcome == x0,
    })
}
