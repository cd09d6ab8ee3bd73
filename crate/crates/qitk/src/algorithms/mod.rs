//! Deutsch-Jozsa, Simon, generalised Grover search and Shor order finding.

use std::cell::Cell;

use crate::error::{QError, Result};
use crate::state::StateVector;

pub mod dj;
pub mod grover;
pub mod numtheory;
pub mod shor;
pub mod simon;

pub use dj::{deutsch_jozsa, DjResult, DjVerdict};
pub use grover::{
    grover_exact_m, grover_optimal_m, grover_peak, grover_reduced_kernel, grover_search, grover_spectrum,
    reduced_success, GroverParams, GroverResult, GroverSpectrum,
};
pub use numtheory::{continued_fraction, convergents, gcd, mod_exp};
pub use shor::{
    factor, order_from_measurement, shor_order, shor_prob_q, statevector_distribution,
    AttemptOutcome, FactorAttempt, FactorOptions, FactorReport, OrderResult, QSampler,
    ShorBackend, ShorContext,
};
pub use simon::{gf2_nullspace, gf2_rank, simon, SimonResult};

/// Black-box `f: {0,1}^n -> {0,1}^m` applied coherently as
/// `|x>|y> -> |x>|y ^ f(x)>`, with `x` on the high sites and `y` on the
/// low `m` sites. Each coherent application counts as one query.
#[derive(Debug, Clone)]
pub struct BooleanOracle {
    n: usize,
    m: usize,
    table: Vec<u64>,
    queries: Cell<usize>,
}

impl BooleanOracle {
    pub fn from_fn(n: usize, m: usize, f: impl Fn(u64) -> u64) -> Result<BooleanOracle> {
        if n == 0 || n > 20 || m == 0 || m > 20 {
            return Err(QError::InvalidArgument(format!("oracle sizes n={n}, m={m} unsupported")));
        }
        let mask = (1u64 << m) - 1;
        let table: Vec<u64> = (0..1u64 << n).map(|x| f(x) & mask).collect();
        Ok(BooleanOracle {
            n,
            m,
            table,
            queries: Cell::new(0),
        })
    }

    pub fn from_table(n: usize, m: usize, table: Vec<u64>) -> Result<BooleanOracle> {
        if table.len() != 1 << n {
            return Err(QError::InvalidArgument(format!(
                "table has {} entries, expected {}",
                table.len(),
                1u64 << n
            )));
        }
        Self::from_fn(n, m, |x| table[x as usize])
    }

    pub fn constant(n: usize, value: u64) -> BooleanOracle {
        Self::from_fn(n, 1, |_| value).expect("small oracle")
    }

    pub fn input_bits(&self) -> usize {
        self.n
    }

    pub fn output_bits(&self) -> usize {
        self.m
    }

    pub fn queries(&self) -> usize {
        self.queries.get()
    }

    pub fn reset_queries(&self) {
        self.queries.set(0);
    }

    /// Classical lookup used to build fixtures and check answers; not counted.
    pub fn peek(&self, x: u64) -> u64 {
        self.table[x as usize]
    }

    /// One coherent query on a register of `n + m` qubits.
    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        if state.local_dim() != 2 || state.num_sites() != self.n + self.m {
            return Err(QError::Dimension(format!(
                "oracle needs {} qubits",
                self.n + self.m
            )));
        }
        let m = self.m;
        let mask = (1usize << m) - 1;
        state.permute_in_place(|i| {
            let x = i >> m;
            let y = i & mask;
            (x << m) | (y ^ self.table[x] as usize)
        })?;
        self.queries.set(self.queries.get() + 1);
        Ok(())
    }
}

/// Hadamard on each listed qubit.
pub(crate) fn hadamard_all(state: &mut StateVector, sites: impl IntoIterator<Item = usize>) -> Result<()> {
    let h = crate::gates::hadamard();
    for s in sites {
        state.apply_in_place(&h, &[s])?;
    }
    Ok(())
}
