//! Entanglement toolbox: Schmidt decomposition, entropies, Holevo
//! information, majorization, the partial-transpose test, Werner states
//! and BBPSSW distillation.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::Serialize;

use crate::error::{QError, Result};
use crate::state::{cr, strides, DensityMatrix, Mat, StateVector, C64, PSD_TOL};

pub mod distill;

pub use distill::{
    bbpssw_map, bbpssw_round, bbpssw_success_probability, distill_trajectory, rounds_to_reach, DistillMode,
    DistillOutcome, DistillRow,
};

/// `|psi> = sum_k sqrt(w_k) |u_k>|v_k>` with descending weights.
#[derive(Debug, Clone)]
pub struct SchmidtForm {
    pub weights: Vec<f64>,
    pub left_basis: Vec<Vec<C64>>,
    pub right_basis: Vec<Vec<C64>>,
    pub rank: usize,
}

impl SchmidtForm {
    pub fn reconstruct(&self) -> Vec<C64> {
        let da = self.left_basis.first().map_or(0, Vec::len);
        let db = self.right_basis.first().map_or(0, Vec::len);
        let mut out = vec![cr(0.0); da * db];
        for k in 0..self.rank {
            let s = self.weights[k].sqrt();
            for a in 0..da {
                for b in 0..db {
                    out[a * db + b] += self.left_basis[k][a] * self.right_basis[k][b] * s;
                }
            }
        }
        out
    }

    pub fn is_entangled(&self) -> bool {
        self.rank > 1
    }
}

/// Weights below this are treated as absent when counting the Schmidt rank.
const RANK_TOL: f64 = 1e-12;

/// Schmidt decomposition of a bipartite pure state with subsystem A on the
/// high-significance part of the index (`index = a * dB + b`).
pub fn schmidt(psi: &StateVector, da: usize, db: usize) -> Result<SchmidtForm> {
    if da * db != psi.dim() {
        return Err(QError::Dimension(format!(
            "{da} x {db} does not match state dimension {}",
            psi.dim()
        )));
    }
    let m = Mat::from_fn(da, db, |a, b| psi.amplitude(a * db + b));
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let mut weights = Vec::new();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for &k in &order {
        let w = svd.singular_values[k].powi(2);
        if w <= RANK_TOL {
            continue;
        }
        weights.push(w);
        left.push(u.column(k).iter().copied().collect());
        right.push(vt.row(k).iter().copied().collect());
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    Ok(SchmidtForm {
        rank: weights.len(),
        weights,
        left_basis: left,
        right_basis: right,
    })
}

/// `-sum p log2 p` over the entries, with `0 log 0 = 0` and tiny negatives clipped.
pub(crate) fn entropy_bits(p: &[f64]) -> f64 {
    p.iter()
        .map(|&x| if x > 0.0 { -x * x.log2() } else { 0.0 })
        .sum()
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_bits(&rho.eigenvalues())
}

/// Entropy of either reduced state of a bipartite pure state, in ebits.
pub fn entanglement_entropy(psi: &StateVector, da: usize, db: usize) -> Result<f64> {
    Ok(entropy_bits(&schmidt(psi, da, db)?.weights))
}

/// Weighted set of density matrices of a common dimension.
#[derive(Debug, Clone)]
pub struct Ensemble {
    members: Vec<(f64, DensityMatrix)>,
}

impl Ensemble {
    pub fn new(members: Vec<(f64, DensityMatrix)>) -> Result<Ensemble> {
        let dim = members
            .first()
            .ok_or_else(|| QError::InvalidArgument("empty ensemble".into()))?
            .1
            .dim();
        if members.iter().any(|(p, r)| *p < 0.0 || r.dim() != dim) {
            return Err(QError::InvalidArgument("bad ensemble member".into()));
        }
        let total: f64 = members.iter().map(|m| m.0).sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(QError::InvalidArgument(format!("probabilities sum to {total}")));
        }
        Ok(Ensemble { members })
    }

    pub fn members(&self) -> &[(f64, DensityMatrix)] {
        &self.members
    }

    pub fn average(&self) -> DensityMatrix {
        DensityMatrix::mixture(&self.members).expect("validated ensemble")
    }
}

/// `chi = S(sum p_i rho_i) - sum p_i S(rho_i)`
pub fn holevo_chi(e: &Ensemble) -> f64 {
    let avg = von_neumann_entropy(&e.average());
    let parts: f64 = e.members.iter().map(|(p, r)| p * von_neumann_entropy(r)).sum();
    (avg - parts).max(0.0)
}

const MAJ_TOL: f64 = 1e-12;

fn sorted_padded(x: &[f64], len: usize) -> Vec<f64> {
    let mut v = x.to_vec();
    v.resize(len, 0.0);
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// `x` is majorized by `y` (`x ≺ y`): every partial sum of the decreasingly
/// sorted `x` is at most that of `y`, with equal totals. Shorter vectors are
/// zero-padded.
pub fn is_majorized_by(x: &[f64], y: &[f64]) -> bool {
    let n = x.len().max(y.len());
    let xs = sorted_padded(x, n);
    let ys = sorted_padded(y, n);
    let (mut sx, mut sy) = (0.0, 0.0);
    for k in 0..n {
        sx += xs[k];
        sy += ys[k];
        if sx > sy + MAJ_TOL {
            return false;
        }
    }
    (sx - sy).abs() <= MAJ_TOL
}

/// `y ≻ x`, the same relation as [`is_majorized_by`] read from the other side.
pub fn majorizes(y: &[f64], x: &[f64]) -> bool {
    is_majorized_by(x, y)
}

/// Whether `psi` can be turned into `phi` by LOCC: `w(psi) ≺ w(phi)`.
pub fn locc_convertible(psi: &StateVector, phi: &StateVector, da: usize, db: usize) -> Result<bool> {
    let a = schmidt(psi, da, db)?.weights;
    let b = schmidt(phi, da, db)?.weights;
    Ok(is_majorized_by(&a, &b))
}

/// Transpose the indices of factor `subsystem` (factors listed most
/// significant first).
pub fn partial_transpose(rho: &DensityMatrix, dims: &[usize], subsystem: usize) -> Result<Mat> {
    if dims.iter().product::<usize>() != rho.dim() {
        return Err(QError::Dimension(format!("dims {dims:?} do not match {}", rho.dim())));
    }
    if subsystem >= dims.len() {
        return Err(QError::Dimension(format!("no subsystem {subsystem}")));
    }
    let st = strides(dims)[subsystem];
    let d = dims[subsystem];
    let m = rho.matrix();
    Ok(Mat::from_fn(rho.dim(), rho.dim(), |i, j| {
        let di = (i / st) % d;
        let dj = (j / st) % d;
        let i2 = i - di * st + dj * st;
        let j2 = j - dj * st + di * st;
        m[(i2, j2)]
    }))
}

/// Positive partial transpose with respect to every single factor.
pub fn peres_is_ppt(rho: &DensityMatrix, dims: &[usize]) -> Result<bool> {
    for s in 0..dims.len() {
        let pt = partial_transpose(rho, dims, s)?;
        if crate::state::hermitian_eigenvalues(&pt)[0] < -PSD_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Separability verdict, available only where PPT is also sufficient
/// (2x2 and 2x3 systems).
pub fn is_separable(rho: &DensityMatrix, dims: &[usize]) -> Result<bool> {
    match dims {
        [2, 2] | [2, 3] | [3, 2] => peres_is_ppt(rho, dims),
        _ => Err(QError::Unsupported(format!(
            "partial transpose decides separability only for 2x2 and 2x3, got {dims:?}"
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

/// `Phi± = (|00> ± |11>)/√2`, `Psi± = (|01> ± |10>)/√2`.
pub fn bell(kind: BellKind) -> StateVector {
    let h = FRAC_1_SQRT_2;
    let z = cr(0.0);
    let amps = match kind {
        BellKind::PhiPlus => vec![cr(h), z, z, cr(h)],
        BellKind::PhiMinus => vec![cr(h), z, z, cr(-h)],
        BellKind::PsiPlus => vec![z, cr(h), cr(h), z],
        BellKind::PsiMinus => vec![z, cr(h), cr(-h), z],
    };
    StateVector::new(2, 2, amps).expect("Bell state is normalised")
}

pub fn singlet() -> StateVector {
    bell(BellKind::PsiMinus)
}

/// `(|000> + |111>)/√2`
pub fn ghz() -> StateVector {
    let mut amps = vec![cr(0.0); 8];
    amps[0] = cr(FRAC_1_SQRT_2);
    amps[7] = cr(FRAC_1_SQRT_2);
    StateVector::new(2, 3, amps).expect("GHZ is normalised")
}

/// Singlet weight `f` with the remaining weight spread evenly over the
/// other three Bell states.
#[derive(Debug, Clone)]
pub struct WernerState {
    pub f: f64,
    pub rho: DensityMatrix,
}

pub fn werner(f: f64) -> Result<WernerState> {
    if !(0.0..=1.0).contains(&f) {
        return Err(QError::InvalidArgument(format!("Werner fidelity {f} outside [0, 1]")));
    }
    let p = singlet().density().into_matrix();
    let rest = (Mat::identity(4, 4) - &p) * cr((1.0 - f) / 3.0);
    let rho = DensityMatrix::new(p * cr(f) + rest)?;
    Ok(WernerState { f, rho })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{max_abs_diff, RngSeed};

    fn qutrit_pair() -> (StateVector, StateVector) {
        let z = cr(0.0);
        let psi = StateVector::new(
            3,
            2,
            vec![cr(2.0 / 3.0), z, z, z, cr(2.0 / 3.0), z, z, z, cr(1.0 / 3.0)],
        )
        .unwrap();
        let (a, b) = ((2.0f64 / 3.0).sqrt(), (1.0f64 / 6.0).sqrt());
        let phi = StateVector::new(3, 2, vec![cr(a), z, z, z, cr(b), z, z, z, cr(b)]).unwrap();
        (psi, phi)
    }

    #[test]
    fn schmidt_examples() {
        let s = schmidt(&StateVector::qubits(2, 1).unwrap(), 2, 2).unwrap();
        assert_eq!(s.rank, 1);
        assert!((s.weights[0] - 1.0).abs() < 1e-12);
        let s = schmidt(&bell(BellKind::PhiPlus), 2, 2).unwrap();
        assert_eq!(s.rank, 2);
        assert!(s.weights.iter().all(|w| (w - 0.5).abs() < 1e-12));
        let (psi, _) = qutrit_pair();
        let s = schmidt(&psi, 3, 3).unwrap();
        for (w, e) in s.weights.iter().zip([4.0 / 9.0, 4.0 / 9.0, 1.0 / 9.0]) {
            assert!((w - e).abs() < 1e-12);
        }
        let rec = s.reconstruct();
        for (x, y) in rec.iter().zip(psi.amplitudes()) {
            assert!((x - y).norm() < 1e-9);
        }
        assert!(schmidt(&psi, 2, 3).is_err());
    }

    #[test]
    fn qutrit_partial_trace() {
        let (psi, _) = qutrit_pair();
        let ra = psi.density().partial_trace(&[3, 3], &[0]).unwrap();
        let expected = Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            cr(4.0 / 9.0),
            cr(4.0 / 9.0),
            cr(1.0 / 9.0),
        ]));
        assert!(max_abs_diff(ra.matrix(), &expected) < 1e-12);
    }

    #[test]
    fn entropies() {
        assert!(von_neumann_entropy(&StateVector::qubits(1, 0).unwrap().density()).abs() < 1e-12);
        assert!((von_neumann_entropy(&DensityMatrix::maximally_mixed(2)) - 1.0).abs() < 1e-12);
        assert!((entanglement_entropy(&bell(BellKind::PhiPlus), 2, 2).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn holevo_examples() {
        let zero = StateVector::qubits(1, 0).unwrap().density();
        let one = StateVector::qubits(1, 1).unwrap().density();
        let plus = StateVector::normalized(2, 1, vec![cr(1.0), cr(1.0)]).unwrap().density();
        assert!(holevo_chi(&Ensemble::new(vec![(1.0, zero.clone())]).unwrap()).abs() < 1e-12);
        let e = Ensemble::new(vec![(0.5, zero.clone()), (0.5, one)]).unwrap();
        assert!((holevo_chi(&e) - 1.0).abs() < 1e-12);
        // rho_bar = [[3/4, 1/4], [1/4, 1/4]] has eigenvalues (2 ± √2)/4
        let e = Ensemble::new(vec![(0.5, zero), (0.5, plus)]).unwrap();
        let l1 = (2.0 + 2f64.sqrt()) / 4.0;
        let l2 = (2.0 - 2f64.sqrt()) / 4.0;
        let expected = -l1 * l1.log2() - l2 * l2.log2();
        assert!((holevo_chi(&e) - expected).abs() < 1e-12);
        assert!(holevo_chi(&e) < 1.0);
    }

    #[test]
    fn majorization_examples() {
        assert!(is_majorized_by(&[0.5, 0.5], &[1.0, 0.0]));
        assert!(majorizes(&[1.0, 0.0], &[0.5, 0.5]));
        assert!(!is_majorized_by(&[1.0, 0.0], &[0.5, 0.5]));
        let x = [0.2, 0.5, 0.3];
        assert!(is_majorized_by(&x, &x));
        let (psi, phi) = qutrit_pair();
        assert!(!locc_convertible(&psi, &phi, 3, 3).unwrap());
        assert!(!locc_convertible(&phi, &psi, 3, 3).unwrap());
        assert!(locc_convertible(&psi, &psi, 3, 3).unwrap());
    }

    #[test]
    fn peres_examples() {
        let prod = StateVector::qubits(2, 2).unwrap().density();
        assert!(peres_is_ppt(&prod, &[2, 2]).unwrap());
        let phi = bell(BellKind::PhiPlus).density();
        let pt = partial_transpose(&phi, &[2, 2], 1).unwrap();
        let ev = crate::state::hermitian_eigenvalues(&pt);
        assert!((ev[0] + 0.5).abs() < 1e-12);
        assert!(!is_separable(&phi, &[2, 2]).unwrap());
        for k in 0..=100 {
            let f = k as f64 / 100.0;
            let w = werner(f).unwrap();
            assert_eq!(peres_is_ppt(&w.rho, &[2, 2]).unwrap(), f <= 0.5 + 1e-12, "F={f}");
        }
        let big = DensityMatrix::maximally_mixed(9);
        assert!(matches!(is_separable(&big, &[3, 3]), Err(QError::Unsupported(_))));
    }

    #[test]
    fn werner_fidelity() {
        let w = werner(0.6).unwrap();
        assert!((w.rho.fidelity_to_pure(&singlet()).unwrap() - 0.6).abs() < 1e-12);
        for k in [BellKind::PhiPlus, BellKind::PhiMinus, BellKind::PsiPlus] {
            assert!((w.rho.fidelity_to_pure(&bell(k)).unwrap() - 0.4 / 3.0).abs() < 1e-12);
        }
        let w1 = werner(1.0).unwrap();
        assert!(max_abs_diff(w1.rho.matrix(), singlet().density().matrix()) < 1e-15);
        assert!(werner(1.1).is_err());
        let mixed = DensityMatrix::maximally_mixed(4);
        assert!((mixed.fidelity_to_pure(&singlet()).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn bell_correlations() {
        let mut rng = RngSeed(11).rng();
        for _ in 0..200 {
            let r = bell(BellKind::PhiPlus).measure(&[1, 0], &mut rng).unwrap();
            assert_eq!(r.outcome[0], r.outcome[1]);
        }
        let g = ghz();
        assert!((g.amplitude(0).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((g.amplitude(7).re - FRAC_1_SQRT_2).abs() < 1e-15);
    }
}
