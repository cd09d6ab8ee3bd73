use rand::Rng;
use serde::Serialize;

use super::{hadamard_all, BooleanOracle};
use crate::error::{QError, Result};
use crate::state::StateVector;

/// Reduced row echelon form over F2; returns the pivot rows and their pivot columns.
fn rref(rows: &[u64], n: usize) -> Vec<(u64, usize)> {
    let mut basis: Vec<(u64, usize)> = Vec::new();
    for &r in rows {
        let mut v = r & mask(n);
        for &(b, p) in &basis {
            if (v >> p) & 1 == 1 {
                v ^= b;
            }
        }
        if v == 0 {
            continue;
        }
        let p = 63 - v.leading_zeros() as usize;
        for (b, bp) in basis.iter_mut() {
            if (*b >> p) & 1 == 1 {
                *b ^= v;
            }
            let _ = bp;
        }
        basis.push((v, p));
    }
    basis
}

fn mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub fn gf2_rank(rows: &[u64], n: usize) -> usize {
    rref(rows, n).len()
}

/// Basis of `{x : r . x = 0 mod 2 for every row r}` in F2^n.
pub fn gf2_nullspace(rows: &[u64], n: usize) -> Vec<u64> {
    let basis = rref(rows, n);
    let pivots: Vec<usize> = basis.iter().map(|&(_, p)| p).collect();
    let mut out = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut x = 1u64 << free;
        for &(b, p) in &basis {
            // row b: x_p + sum over free columns = 0
            if (b >> free) & 1 == 1 {
                x |= 1 << p;
            }
        }
        out.push(x);
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct SimonResult {
    pub period: u64,
    pub samples: Vec<u64>,
    pub queries: usize,
}

/// Recover the hidden period of a two-to-one `f` with `f(x) = f(x ^ p)`.
/// Runs the quantum subroutine until the samples span an `(n-1)`-dimensional
/// space, giving up after `10 n` rounds.
pub fn simon<R: Rng + ?Sized>(f: &BooleanOracle, rng: &mut R) -> Result<SimonResult> {
    let n = f.input_bits();
    let m = f.output_bits();
    let before = f.queries();
    let mut samples = Vec::new();
    for _ in 0..10 * n {
        let mut s = StateVector::zero_qubits(n + m);
        hadamard_all(&mut s, m..m + n)?;
        f.apply(&mut s)?;
        hadamard_all(&mut s, m..m + n)?;
        let source: Vec<usize> = (m..m + n).rev().collect();
        let y = s.measure(&source, rng)?.value() as u64;
        samples.push(y);
        if gf2_rank(&samples, n) == n - 1 {
            let ns = gf2_nullspace(&samples, n);
            if ns.len() != 1 {
                return Err(QError::Sanity("nullspace is not one-dimensional".into()));
            }
            return Ok(SimonResult {
                period: ns[0],
                samples,
                queries: f.queries() - before,
            });
        }
    }
    Err(QError::BudgetExhausted(format!(
        "samples span only {} of {} dimensions after {} rounds",
        gf2_rank(&samples, n),
        n - 1,
        10 * n
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::RngSeed;

    fn dot(a: u64, b: u64) -> u32 {
        (a & b).count_ones() % 2
    }

    fn brute_null(rows: &[u64], n: usize) -> Vec<u64> {
        (0..1u64 << n).filter(|x| rows.iter().all(|r| dot(*r, *x) == 0)).collect()
    }

    fn span(basis: &[u64]) -> Vec<u64> {
        let mut v: Vec<u64> = (0..1u64 << basis.len())
            .map(|sel| {
                basis
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| (sel >> i) & 1 == 1)
                    .fold(0, |acc, (_, b)| acc ^ b)
            })
            .collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn nullspace_examples() {
        assert_eq!(span(&gf2_nullspace(&[0b110, 0b011], 3)), vec![0, 0b111]);
        assert_eq!(gf2_nullspace(&[], 3).len(), 3);
        let ns = gf2_nullspace(&[0b100, 0b010], 3);
        assert_eq!(ns, vec![0b001]);
    }

    #[test]
    fn nullspace_matches_brute_force() {
        let mut rng = RngSeed(4).rng();
        for _ in 0..200 {
            let n = rng.random_range(1..7);
            let k = rng.random_range(0..6);
            let rows: Vec<u64> = (0..k).map(|_| rng.random_range(0..1u64 << n)).collect();
            assert_eq!(span(&gf2_nullspace(&rows, n)), brute_null(&rows, n));
        }
    }

    fn periodic(n: usize, p: u64) -> BooleanOracle {
        // label each pair {x, x^p} by its smaller element
        BooleanOracle::from_fn(n, n, |x| x.min(x ^ p)).unwrap()
    }

    #[test]
    fn recovers_periods() {
        let mut rng = RngSeed(5).rng();
        let f = BooleanOracle::from_table(2, 1, vec![0, 1, 1, 0]).unwrap();
        assert_eq!(simon(&f, &mut rng).unwrap().period, 0b11);
        let r = simon(&periodic(3, 0b101), &mut rng).unwrap();
        assert_eq!(r.period, 0b101);
        assert!(r.samples.iter().all(|&y| dot(y, 0b101) == 0));
        for p in 1..16 {
            let r = simon(&periodic(4, p), &mut rng).unwrap();
            assert_eq!(r.period, p);
        }
    }
}
