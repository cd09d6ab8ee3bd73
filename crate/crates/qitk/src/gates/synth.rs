//! Exact synthesis of multiply-controlled one-qubit unitaries over
//! one-qubit gates and CNOT.
//!
//! Every one-qubit gate is emitted as the generic `U(delta, alpha, beta, gamma)`
//! so that synthesized circuits serialise by name and parameters.

use super::{euler_matrix, pauli_x, Circuit};
use crate::error::{QError, Result};
use crate::state::{check_unitary, cr, Mat, C64, TOL};

/// `U = Ph(delta) Rz(alpha) Ry(beta) Rz(gamma)` with `beta` in `[0, pi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerDecomposition {
    pub delta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EulerDecomposition {
    pub fn matrix(&self) -> Mat {
        euler_matrix(self.delta, self.alpha, self.beta, self.gamma)
    }

    pub fn params(&self) -> [f64; 4] {
        [self.delta, self.alpha, self.beta, self.gamma]
    }
}

fn check_2x2(u: &Mat) -> Result<()> {
    if u.nrows() != 2 || u.ncols() != 2 {
        return Err(QError::Dimension(format!(
            "expected a 2x2 matrix, got {}x{}",
            u.nrows(),
            u.ncols()
        )));
    }
    check_unitary(u)
}

pub fn euler_decompose(u: &Mat) -> Result<EulerDecomposition> {
    check_2x2(u)?;
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let delta = det.arg() / 2.0;
    let ub = u * C64::from_polar(1.0, -delta);
    let beta = 2.0 * ub[(1, 0)].norm().atan2(ub[(0, 0)].norm());
    // Rz Ry Rz has entries e^{+-i(alpha+gamma)/2} cos and e^{+-i(alpha-gamma)/2} sin
    let sum = if ub[(1, 1)].norm() > 1e-14 {
        2.0 * ub[(1, 1)].arg()
    } else {
        0.0
    };
    let diff = if ub[(1, 0)].norm() > 1e-14 {
        2.0 * ub[(1, 0)].arg()
    } else {
        0.0
    };
    Ok(EulerDecomposition {
        delta,
        alpha: (sum + diff) / 2.0,
        beta,
        gamma: (sum - diff) / 2.0,
    })
}

/// Angle triples of the three factors, each as `U(0, alpha, beta, gamma)` parameters.
fn abc_params(e: &EulerDecomposition) -> [[f64; 4]; 3] {
    let (a, b, g) = (e.alpha, e.beta, e.gamma);
    [
        [0.0, a, b / 2.0, 0.0],
        [0.0, 0.0, -b / 2.0, -(a + g) / 2.0],
        [0.0, (g - a) / 2.0, 0.0, 0.0],
    ]
}

/// Factors `U1, U2, U3` with `U1 U2 U3 = 1` and `U1 X U2 X U3 = u_bar`.
pub fn abc_factors(u_bar: &Mat) -> Result<(Mat, Mat, Mat)> {
    check_2x2(u_bar)?;
    let det = u_bar[(0, 0)] * u_bar[(1, 1)] - u_bar[(0, 1)] * u_bar[(1, 0)];
    if (det - cr(1.0)).norm() > TOL {
        return Err(QError::InvalidArgument(format!("determinant {det} is not 1")));
    }
    let e = euler_decompose(u_bar)?;
    let m = abc_params(&e).map(|p| euler_matrix(p[0], p[1], p[2], p[3]));
    let [u1, u2, u3] = m;
    Ok((u1, u2, u3))
}

/// A unitary `W` with `W^2 = u`, from Cayley-Hamilton.
pub fn sqrt_unitary(u: &Mat) -> Result<Mat> {
    check_2x2(u)?;
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let tr = u[(0, 0)] + u[(1, 1)];
    let s0 = det.sqrt();
    let s = if (tr + s0 * 2.0).norm() >= (tr - s0 * 2.0).norm() {
        s0
    } else {
        -s0
    };
    let norm = (tr + s * 2.0).sqrt();
    Ok((u + Mat::identity(2, 2) * s) / norm)
}

fn push_u(c: &mut Circuit, p: [f64; 4], site: usize) {
    c.add("U", &p, &[site]).expect("valid one-qubit gate");
}

fn push_cnot(c: &mut Circuit, ctrl: usize, tgt: usize) {
    c.add("CNOT", &[], &[ctrl, tgt]).expect("valid CNOT");
}

/// Six-gate controlled-`u`: U3, CNOT, U2, CNOT, U1 on the target, then the
/// phase gate `diag(1, e^{i delta})` on the control.
fn push_cu(c: &mut Circuit, u: &Mat, ctrl: usize, tgt: usize) {
    let e = euler_decompose(u).expect("unitary input");
    let [p1, p2, p3] = abc_params(&e);
    push_u(c, p3, tgt);
    push_cnot(c, ctrl, tgt);
    push_u(c, p2, tgt);
    push_cnot(c, ctrl, tgt);
    push_u(c, p1, tgt);
    push_u(c, [e.delta / 2.0, e.delta, 0.0, 0.0], ctrl);
}

/// Controlled-`u` with `ctrls`, recursing through `W = sqrt(u)`:
/// `C(c_n; W) C^{n-1}NOT C(c_n; W^dag) C^{n-1}NOT C^{n-1}(W)`.
fn push_mcu(c: &mut Circuit, u: &Mat, ctrls: &[usize], tgt: usize) {
    match ctrls.len() {
        0 => unreachable!("at least one control"),
        1 => push_cu(c, u, ctrls[0], tgt),
        n => {
            let w = sqrt_unitary(u).expect("unitary input");
            let wd = w.adjoint();
            let last = ctrls[n - 1];
            let rest = &ctrls[..n - 1];
            push_cu(c, &w, last, tgt);
            push_mcnot(c, rest, last, &[tgt]);
            push_cu(c, &wd, last, tgt);
            push_mcnot(c, rest, last, &[tgt]);
            push_mcu(c, &w, rest, tgt);
        }
    }
}

fn push_toffoli(c: &mut Circuit, a: usize, b: usize, tgt: usize) {
    push_mcu(c, &pauli_x(), &[a, b], tgt);
}

/// `C^m NOT` using the idle wires in `spare` as borrowed (dirty) ancillas.
fn push_mcnot(c: &mut Circuit, ctrls: &[usize], tgt: usize, spare: &[usize]) {
    let m = ctrls.len();
    match m {
        1 => push_cnot(c, ctrls[0], tgt),
        2 => push_toffoli(c, ctrls[0], ctrls[1], tgt),
        _ => {
            // split in two groups around one borrowed wire b
            let b = spare[0];
            let m1 = m.div_ceil(2);
            let g1 = &ctrls[..m1];
            let g2: Vec<usize> = ctrls[m1..].iter().copied().chain([b]).collect();
            let anc1: Vec<usize> = ctrls[m1..].iter().copied().chain([tgt]).collect();
            for _ in 0..2 {
                push_mcnot_borrowed(c, g1, b, &anc1);
                push_mcnot_borrowed(c, &g2, tgt, g1);
            }
        }
    }
}

/// `C^k NOT` from `4(k-2)` Toffolis over `k-2` borrowed ancillas.
fn push_mcnot_borrowed(c: &mut Circuit, ctrls: &[usize], tgt: usize, anc: &[usize]) {
    let k = ctrls.len();
    if k <= 2 {
        return push_mcnot(c, ctrls, tgt, anc);
    }
    assert!(anc.len() >= k - 2, "not enough borrowed wires");
    // chain[i] is the wire written by the Toffoli on control x_{i+1}; chain[k-2] = tgt
    let chain: Vec<usize> = anc[..k - 2].iter().copied().chain([tgt]).collect();
    let d = |c: &mut Circuit, i: usize| {
        // i in 3..=k: T(x_i, a_{i-2} -> a_{i-1})
        push_toffoli(c, ctrls[i - 1], chain[i - 3], chain[i - 2]);
    };
    for top in [k, k - 1] {
        for i in (3..=top).rev() {
            d(c, i);
        }
        push_toffoli(c, ctrls[0], ctrls[1], chain[0]);
        for i in 3..=top {
            d(c, i);
        }
    }
}

/// Circuit on `n + 1` qubits (target on site 0, controls on sites `1..=n`)
/// equal to the `n`-controlled `u`.
pub fn synthesize_controlled_u(u: &Mat, num_controls: usize) -> Result<Circuit> {
    check_2x2(u)?;
    if num_controls == 0 {
        return Err(QError::InvalidArgument("need at least one control".into()));
    }
    let mut c = Circuit::new(num_controls + 1);
    let ctrls: Vec<usize> = (1..=num_controls).collect();
    push_mcu(&mut c, u, &ctrls, 0);
    Ok(c)
}

fn borrowed_cost(k: usize) -> usize {
    match k {
        1 => 1,
        2 => 20,
        _ => 4 * (k - 2) * 20,
    }
}

/// Gate count of the `C^m NOT` used inside the recursion.
pub fn mcnot_cost(m: usize) -> usize {
    match m {
        0 => 0,
        1 => 1,
        2 => 20,
        _ => {
            let m1 = m.div_ceil(2);
            let m2 = m / 2;
            2 * borrowed_cost(m1) + 2 * borrowed_cost(m2 + 1)
        }
    }
}

/// Gate count of [`synthesize_controlled_u`]: `C(1) = 6` and
/// `C(n) = C(n-1) + 12 + 2 T(n-1)` with `T` linear in `n`.
pub fn controlled_u_cost(n: usize) -> usize {
    match n {
        0 => 1,
        1 => 6,
        _ => controlled_u_cost(n - 1) + 12 + 2 * mcnot_cost(n - 1),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{controlled, ry};
    use super::*;
    use crate::state::{identity, max_abs_diff, phase_aligned_diff, random_unitary};
    use rand::SeedableRng;

    #[test]
    fn euler_identity_and_ry() {
        let e = euler_decompose(&identity(2)).unwrap();
        assert_eq!(e.params(), [0.0; 4]);
        let e = euler_decompose(&ry(0.7)).unwrap();
        assert!((e.beta - 0.7).abs() < 1e-14);
        assert!(e.alpha.abs() < 1e-14 && e.gamma.abs() < 1e-14 && e.delta.abs() < 1e-14);
    }

    #[test]
    fn euler_reconstructs_random() {
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(5);
        for _ in 0..200 {
            let u = random_unitary(2, &mut rng);
            let e = euler_decompose(&u).unwrap();
            assert!(max_abs_diff(&e.matrix(), &u) < 1e-12);
            assert!((0.0..=std::f64::consts::PI).contains(&e.beta));
        }
    }

    #[test]
    fn abc_identities() {
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(6);
        let x = pauli_x();
        for k in 0..50 {
            let u = if k == 0 { identity(2) } else { random_unitary(2, &mut rng) };
            let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
            let ub = &u / det.sqrt();
            let (a, b, c) = abc_factors(&ub).unwrap();
            assert!(max_abs_diff(&(&a * &b * &c), &identity(2)) < 1e-12);
            assert!(max_abs_diff(&(&a * &x * &b * &x * &c), &ub) < 1e-12);
        }
        assert!(abc_factors(&(identity(2) * C64::i())).is_err());
    }

    #[test]
    fn sqrt_squares_back() {
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(7);
        for _ in 0..50 {
            let u = random_unitary(2, &mut rng);
            let w = sqrt_unitary(&u).unwrap();
            assert!(max_abs_diff(&(&w * &w), &u) < 1e-12);
        }
        let w = sqrt_unitary(&pauli_x()).unwrap();
        assert!(max_abs_diff(&(&w * &w), &pauli_x()) < 1e-14);
    }

    #[test]
    fn cnot_and_toffoli_from_synthesis() {
        let c1 = synthesize_controlled_u(&pauli_x(), 1).unwrap();
        assert_eq!(c1.len(), 6);
        assert!(phase_aligned_diff(&c1.unitary().unwrap(), &controlled(&pauli_x(), 1)) < 1e-12);
        let c2 = synthesize_controlled_u(&pauli_x(), 2).unwrap();
        assert_eq!(c2.len(), 20);
        assert!(max_abs_diff(&c2.unitary().unwrap(), &controlled(&pauli_x(), 2)) < 1e-12);
    }

    #[test]
    fn random_controlled_match_dense() {
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(8);
        for n in 1..=5 {
            let u = random_unitary(2, &mut rng);
            let c = synthesize_controlled_u(&u, n).unwrap();
            assert_eq!(c.len(), controlled_u_cost(n));
            assert_eq!(c.count("U") + c.count("CNOT"), c.len());
            let err = phase_aligned_diff(&c.unitary().unwrap(), &controlled(&u, n));
            assert!(err < 1e-9, "n={n}: {err}");
        }
    }

    #[test]
    fn cost_growth_is_quadratic() {
        for n in 2..40 {
            let inc = controlled_u_cost(n) - controlled_u_cost(n - 1);
            assert_eq!(inc, 12 + 2 * mcnot_cost(n - 1));
            assert!(mcnot_cost(n) <= 160 * n);
        }
    }
}
