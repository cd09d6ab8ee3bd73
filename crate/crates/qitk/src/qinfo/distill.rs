//! BBPSSW recurrence distillation on Werner pairs.
//!
//! Register order for the two-pair simulation is `[A1, B1, A2, B2]` from
//! most to least significant: pair 1 is the source, pair 2 the target.

use rand::Rng;
use serde::Serialize;

use super::{singlet, werner};
use crate::error::{QError, Result};
use crate::gates::{controlled, pauli_x, pauli_y};
use crate::state::{cr, identity, kron_all, DensityMatrix, Mat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistillMode {
    Analytic,
    Simulate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistillOutcome {
    pub f_out: f64,
    pub success_probability: f64,
}

/// Probability that the two target bits agree.
pub fn bbpssw_success_probability(f: f64) -> f64 {
    let g = 1.0 - f;
    f * f + 2.0 * f * g / 3.0 + 5.0 * g * g / 9.0
}

/// Singlet fidelity of the surviving pair after one successful round.
pub fn bbpssw_map(f: f64) -> f64 {
    let g = 1.0 - f;
    (f * f + g * g / 9.0) / bbpssw_success_probability(f)
}

fn on_site(u: &Mat, site: usize) -> Mat {
    // site 0 is A1 (most significant) through 3 for B2
    let mut f = vec![identity(2), identity(2), identity(2), identity(2)];
    f[site] = u.clone();
    kron_all(&f)
}

/// CNOT between two of the four sites, as a dense 16x16 permutation.
fn cnot(ctrl: usize, tgt: usize) -> Mat {
    let sig = |s: usize| 3 - s;
    let cx = controlled(&pauli_x(), 1);
    let mut m = Mat::zeros(16, 16);
    for col in 0..16 {
        let c = (col >> sig(ctrl)) & 1;
        let t = (col >> sig(tgt)) & 1;
        let sub = c * 2 + t;
        for out in 0..4 {
            let amp = cx[(out, sub)];
            if amp.norm() == 0.0 {
                continue;
            }
            let mut row = col & !(1 << sig(ctrl)) & !(1 << sig(tgt));
            row |= (out >> 1) << sig(ctrl);
            row |= (out & 1) << sig(tgt);
            m[(row, col)] += amp;
        }
    }
    m
}

fn simulate(f: f64) -> Result<DistillOutcome> {
    let w = werner(f)?.rho.into_matrix();
    let rho = w.kronecker(&w);
    let y = pauli_y();
    // unilateral Y turns the singlet into Phi+ on both pairs
    let twirl = on_site(&y, 0) * on_site(&y, 2);
    let bicnot = cnot(0, 2) * cnot(1, 3);
    let u = bicnot * twirl;
    let rho = &u * rho * u.adjoint();
    // keep target outcomes 00 and 11
    let mut proj = Mat::zeros(16, 16);
    for i in 0..16usize {
        if (i >> 1) & 1 == i & 1 {
            proj[(i, i)] = cr(1.0);
        }
    }
    let kept = &proj * rho * &proj;
    let p = kept.trace().re;
    let reduced = DensityMatrix::new(kept / cr(p))?.partial_trace(&[2, 2, 2, 2], &[0, 1])?;
    let back = reduced.conjugate(&y.kronecker(&identity(2)))?;
    let f_out = back.fidelity_to_pure(&singlet())?;
    // re-twirling to a Werner state keeps the singlet weight
    Ok(DistillOutcome {
        f_out,
        success_probability: p,
    })
}

/// One purification round. `Simulate` runs the full 16-dimensional
/// two-pair density matrix; `Analytic` evaluates the closed-form map.
pub fn bbpssw_round(f_in: f64, mode: DistillMode) -> Result<DistillOutcome> {
    if !(f_in > 0.5 && f_in <= 1.0) {
        return Err(QError::InvalidArgument(format!(
            "fidelity {f_in} is not in (1/2, 1]; the map does not purify"
        )));
    }
    match mode {
        DistillMode::Analytic => Ok(DistillOutcome {
            f_out: bbpssw_map(f_in),
            success_probability: bbpssw_success_probability(f_in),
        }),
        DistillMode::Simulate => simulate(f_in),
    }
}

/// Rounds of the map needed to go from `f0` above `target`, if within `max_rounds`.
pub fn rounds_to_reach(f0: f64, target: f64, max_rounds: usize) -> Option<usize> {
    let mut f = f0;
    for k in 0..=max_rounds {
        if f > target {
            return Some(k);
        }
        f = bbpssw_map(f);
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistillRow {
    pub round: usize,
    #[serde(rename = "F")]
    pub f: f64,
    pub success_rate: f64,
    pub pairs_remaining: u64,
}

/// Pair-budget trajectory: each round pairs up the survivors, every pair
/// of pairs succeeds independently with the round's success probability.
/// Row 0 is the initial ensemble.
pub fn distill_trajectory<R: Rng + ?Sized>(
    f0: f64,
    pairs: u64,
    rounds: usize,
    rng: &mut R,
) -> Result<Vec<DistillRow>> {
    if !(f0 > 0.5 && f0 <= 1.0) {
        return Err(QError::InvalidArgument(format!("fidelity {f0} is not in (1/2, 1]")));
    }
    let mut rows = vec![DistillRow {
        round: 0,
        f: f0,
        success_rate: 1.0,
        pairs_remaining: pairs,
    }];
    let mut f = f0;
    let mut n = pairs;
    for round in 1..=rounds {
        let attempts = n / 2;
        if attempts == 0 {
            break;
        }
        let p = bbpssw_success_probability(f);
        let ok = (0..attempts).filter(|_| rng.random::<f64>() < p).count() as u64;
        f = bbpssw_map(f);
        n = ok;
        rows.push(DistillRow {
            round,
            f,
            success_rate: ok as f64 / attempts as f64,
            pairs_remaining: n,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::RngSeed;

    #[test]
    fn three_quarters_gives_41_52() {
        let a = bbpssw_round(0.75, DistillMode::Analytic).unwrap();
        assert!((a.f_out - 41.0 / 52.0).abs() < 1e-15);
        let s = bbpssw_round(0.75, DistillMode::Simulate).unwrap();
        assert!((s.f_out - 41.0 / 52.0).abs() < 1e-10);
        assert!((s.success_probability - a.success_probability).abs() < 1e-10);
        assert!(s.success_probability > 0.25);
    }

    #[test]
    fn simulate_matches_map_on_grid() {
        for k in 1..=10 {
            let f = 0.5 + 0.05 * k as f64;
            let s = bbpssw_round(f, DistillMode::Simulate).unwrap();
            assert!((s.f_out - bbpssw_map(f)).abs() < 1e-10);
        }
    }

    #[test]
    fn fixed_point_and_iteration() {
        assert!((bbpssw_map(1.0) - 1.0).abs() < 1e-15);
        let n = rounds_to_reach(0.6, 0.99, 100).unwrap();
        assert!(n > 0 && n < 100);
        assert!(bbpssw_round(0.5, DistillMode::Analytic).is_err());
    }

    #[test]
    fn map_is_increasing() {
        let mut prev = bbpssw_map(0.5 + 1e-3);
        let mut f = 0.5 + 2e-3;
        while f <= 1.0 {
            let v = bbpssw_map(f);
            assert!(v > prev);
            prev = v;
            f += 1e-3;
        }
    }

    #[test]
    fn trajectory_halves_pairs() {
        let rows = distill_trajectory(0.75, 1 << 12, 4, &mut RngSeed(1).rng()).unwrap();
        assert_eq!(rows.len(), 5);
        for w in rows.windows(2) {
            assert!(w[1].pairs_remaining <= w[0].pairs_remaining / 2);
            assert!(w[1].f > w[0].f);
        }
    }
}
