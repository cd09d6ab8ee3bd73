use std::f64::consts::PI;

use super::Circuit;
use crate::error::{QError, Result};
use crate::state::{cis, Mat};

/// Quantum Fourier transform on `k` qudits of dimension `d`:
/// `|q> -> Q^{-1/2} sum_{q'} e^{2 pi i q q'/Q} |q'>`, `Q = d^k`.
///
/// Built from `k` generalised Hadamards, `k(k-1)/2` controlled phases
/// `e^{i theta a b}` with `theta = 2 pi / d^{l-j+1}`, and `floor(k/2)`
/// SWAPs reversing the output order.
pub fn qft_circuit(k: usize, d: usize) -> Result<Circuit> {
    if k == 0 || d < 2 {
        return Err(QError::InvalidArgument(format!("qft needs K >= 1 and d >= 2, got K={k}, d={d}")));
    }
    let mut c = Circuit::with_dim(k, d);
    for l in (0..k).rev() {
        c.add("H", &[], &[l])?;
        for j in (0..l).rev() {
            let theta = 2.0 * PI / (d as f64).powi((l - j + 1) as i32);
            c.add("CPH", &[theta], &[l, j])?;
        }
    }
    for i in 0..k / 2 {
        c.add("SWAP", &[], &[i, k - 1 - i])?;
    }
    Ok(c)
}

/// Dense DFT matrix with entries `e^{2 pi i a b / Q} / sqrt(Q)`.
pub fn dft_matrix(q: usize) -> Mat {
    let s = 1.0 / (q as f64).sqrt();
    Mat::from_fn(q, q, |a, b| cis(2.0 * PI * ((a * b) % q) as f64 / q as f64) * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qinfo::schmidt;
    use crate::state::{max_abs_diff, StateVector};

    #[test]
    fn single_qubit_is_hadamard() {
        let c = qft_circuit(1, 2).unwrap();
        let out = c.run(&StateVector::zero_qubits(1)).unwrap();
        assert!((out.amplitude(0).re - out.amplitude(1).re).abs() < 1e-15);
    }

    #[test]
    fn matches_dft() {
        for (k, d) in [(1, 2), (2, 2), (3, 2), (4, 2), (5, 2), (6, 2), (1, 3), (2, 3), (3, 3), (2, 5)] {
            let c = qft_circuit(k, d).unwrap();
            let q = d.pow(k as u32);
            let err = max_abs_diff(&c.unitary().unwrap(), &dft_matrix(q));
            assert!(err < 1e-10, "K={k} d={d}: {err}");
        }
    }

    #[test]
    fn gate_counts() {
        for k in 1..=8 {
            let c = qft_circuit(k, 2).unwrap();
            assert_eq!(c.count("H"), k);
            assert_eq!(c.count("CPH"), k * (k - 1) / 2);
            assert_eq!(c.count("SWAP"), k / 2);
        }
    }

    #[test]
    fn basis_inputs_stay_separable() {
        for k in 1..=5 {
            let c = qft_circuit(k, 2).unwrap();
            for x in [0, 1, (1 << k) - 1, 5 % (1 << k)] {
                let out = c.run(&StateVector::qubits(k, x).unwrap()).unwrap();
                for cut in 1..k {
                    let s = schmidt(&out, 1 << (k - cut), 1 << cut).unwrap();
                    assert_eq!(s.rank, 1);
                }
            }
        }
    }
}
