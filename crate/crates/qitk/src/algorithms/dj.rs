use rand::Rng;
use serde::Serialize;

use super::{hadamard_all, BooleanOracle};
use crate::error::{QError, Result};
use crate::state::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DjVerdict {
    Constant,
    Balanced,
}

#[derive(Debug, Clone, Serialize)]
pub struct DjResult {
    pub verdict: DjVerdict,
    /// Measured source register.
    pub outcome: u64,
    /// Probability of reading all zeros on the source register.
    pub prob_all_zero: f64,
    pub queries: usize,
}

/// Decide constant vs balanced with a single coherent query. The source
/// register sits on the high `n` sites, the target qubit on site 0.
pub fn deutsch_jozsa<R: Rng + ?Sized>(f: &BooleanOracle, rng: &mut R) -> Result<DjResult> {
    if f.output_bits() != 1 {
        return Err(QError::InvalidArgument("Deutsch-Jozsa needs a one-bit oracle".into()));
    }
    let n = f.input_bits();
    let before = f.queries();
    let mut s = StateVector::qubits(n + 1, 1)?;
    hadamard_all(&mut s, 0..=n)?;
    f.apply(&mut s)?;
    hadamard_all(&mut s, 1..=n)?;
    let source: Vec<usize> = (1..=n).rev().collect();
    let probs = s.marginal(&source)?;
    let rec = s.measure(&source, rng)?;
    let outcome = rec.value() as u64;
    Ok(DjResult {
        verdict: if outcome == 0 {
            DjVerdict::Constant
        } else {
            DjVerdict::Balanced
        },
        outcome,
        prob_all_zero: probs[0],
        queries: f.queries() - before,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::RngSeed;

    #[test]
    fn constant_and_balanced() {
        let mut rng = RngSeed(1).rng();
        for v in [0, 1] {
            let f = BooleanOracle::constant(3, v);
            let r = deutsch_jozsa(&f, &mut rng).unwrap();
            assert_eq!(r.verdict, DjVerdict::Constant);
            assert_eq!(r.outcome, 0);
            assert!((r.prob_all_zero - 1.0).abs() < 1e-12);
            assert_eq!(r.queries, 1);
        }
        let f = BooleanOracle::from_fn(3, 1, |x| x & 1).unwrap();
        let r = deutsch_jozsa(&f, &mut rng).unwrap();
        assert_eq!(r.verdict, DjVerdict::Balanced);
        assert!(r.prob_all_zero < 1e-12);
        assert_eq!(f.queries(), 1);
    }

    #[test]
    fn every_balanced_function_on_two_bits() {
        let mut rng = RngSeed(2).rng();
        for table in 0u64..16 {
            if table.count_ones() != 2 {
                continue;
            }
            let f = BooleanOracle::from_fn(2, 1, |x| (table >> x) & 1).unwrap();
            assert_eq!(deutsch_jozsa(&f, &mut rng).unwrap().verdict, DjVerdict::Balanced);
        }
    }
}
