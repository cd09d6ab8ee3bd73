//! CSS codes from a nested pair `C2 < C1`, and the Steane seven-qubit code
//! with ancilla syndrome extraction.
//!
//! Word position `j` (1-based, left to right) lives on qubit site `n - j`,
//! so a packed word is also the basis index of its ket.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::linear::{hamming_734, LinearCode};
use crate::error::{QError, Result};
use crate::gates::{hadamard, pauli_x, pauli_y, pauli_z, Circuit};
use crate::state::{cr, Mat, StateVector, C64};

#[derive(Debug, Clone)]
pub struct CssCode {
    pub c1: LinearCode,
    pub c2: LinearCode,
    /// Smallest member of each coset of `C2` in `C1`, ascending.
    pub coset_reps: Vec<u64>,
    pub basis: Vec<StateVector>,
}

impl CssCode {
    pub fn n(&self) -> usize {
        self.c1.n()
    }

    /// `sum_i amps[i] |i-bar>`
    pub fn encode(&self, amps: &[C64]) -> Result<StateVector> {
        if amps.len() != self.basis.len() {
            return Err(QError::Dimension(format!("{} logical amplitudes expected", self.basis.len())));
        }
        let mut out = vec![cr(0.0); 1 << self.n()];
        for (a, b) in amps.iter().zip(&self.basis) {
            for (o, x) in out.iter_mut().zip(b.amplitudes()) {
                *o += a * x;
            }
        }
        StateVector::new(2, self.n(), out)
    }
}

/// Coset states `|w-bar> = 2^{-k2/2} sum_{v in C2} |w + v>`.
pub fn css_code(c1: LinearCode, c2: LinearCode) -> Result<CssCode> {
    if !c2.is_subcode_of(&c1) {
        return Err(QError::InvalidArgument("C2 is not contained in C1".into()));
    }
    if c2.k() >= c1.k() {
        return Err(QError::InvalidArgument("C2 must be a proper subcode".into()));
    }
    let n = c1.n();
    if n > 20 {
        return Err(QError::CapExceeded { dim: n, cap: 20 });
    }
    let inner = c2.codewords()?;
    let mut reps: Vec<u64> = c1
        .codewords()?
        .into_iter()
        .map(|w| inner.iter().map(|v| w ^ v).min().expect("C2 has the zero word"))
        .collect();
    reps.sort_unstable();
    reps.dedup();
    let amp = cr(1.0 / (inner.len() as f64).sqrt());
    let basis = reps
        .iter()
        .map(|&w| {
            let mut v = vec![cr(0.0); 1 << n];
            for &c in &inner {
                v[(w ^ c) as usize] = amp;
            }
            StateVector::new(2, n, v)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CssCode {
        c1,
        c2,
        coset_reps: reps,
        basis,
    })
}

/// Hamming `[7,4,3]` with its dual `[7,3,4]` as the inner code.
pub fn steane_code() -> CssCode {
    let c1 = hamming_734();
    let c2 = c1.dual();
    css_code(c1, c2).expect("dual of Hamming is its even subcode")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> Mat {
        match self {
            Pauli::X => pauli_x(),
            Pauli::Y => pauli_y(),
            Pauli::Z => pauli_z(),
        }
    }
}

/// Product of single-qubit Paulis on distinct 1-based positions, e.g. `X3` or `Y1Z5`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PauliString(pub Vec<(Pauli, usize)>);

impl PauliString {
    pub fn single(p: Pauli, position: usize) -> PauliString {
        PauliString(vec![(p, position)])
    }

    pub fn weight(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, s: &StateVector) -> Result<StateVector> {
        let n = s.num_sites();
        let mut out = s.clone();
        for &(p, pos) in &self.0 {
            if pos == 0 || pos > n {
                return Err(QError::Targets(format!("position {pos} outside 1..={n}")));
            }
            out.apply_in_place(&p.matrix(), &[n - pos])?;
        }
        Ok(out)
    }
}

impl FromStr for PauliString {
    type Err = QError;

    fn from_str(s: &str) -> Result<PauliString> {
        let s = s.trim();
        if s.is_empty() || s == "I" {
            return Ok(PauliString(vec![]));
        }
        let mut out: Vec<(Pauli, usize)> = Vec::new();
        let mut chars = s.chars().peekable();
        while let Some(c) = chars.next() {
            let p = match c.to_ascii_uppercase() {
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => return Err(QError::InvalidArgument(format!("bad Pauli string `{s}`"))),
            };
            let mut digits = String::new();
            while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                digits.push(*d);
                chars.next();
            }
            let pos: usize = digits
                .parse()
                .map_err(|_| QError::InvalidArgument(format!("missing position in `{s}`")))?;
            if out.iter().any(|&(_, q)| q == pos) {
                return Err(QError::InvalidArgument(format!("position {pos} repeated")));
            }
            out.push((p, pos));
        }
        Ok(PauliString(out))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "I");
        }
        for (p, pos) in &self.0 {
            write!(f, "{p:?}{pos}")?;
        }
        Ok(())
    }
}

/// Parity rows whose syndrome reads the error position in reversed binary:
/// bit `i` of the syndrome string carries `2^i`.
const STEANE_H: [&str; 3] = ["1010101", "0110011", "0001111"];

#[derive(Debug, Clone, Serialize)]
pub struct SteaneCorrection {
    #[serde(skip)]
    pub state: StateVector,
    /// Ancilla readout for bit flips, e.g. "110".
    pub bit_syndrome: String,
    /// Same, taken between the two Hadamard layers.
    pub phase_syndrome: String,
    pub x_fixed: Option<usize>,
    pub z_fixed: Option<usize>,
}

fn steane_rows() -> Vec<u64> {
    STEANE_H.iter().map(|r| u64::from_str_radix(r, 2).expect("binary")).collect()
}

/// Copy `H v` into three ancillas with CNOTs, read them, undo the flip.
/// Returns the syndrome string and the corrected position.
fn bit_flip_pass(s: &StateVector) -> Result<(StateVector, String, Option<usize>)> {
    let n = 7;
    let data = s.tensor(&StateVector::zero_qubits(3))?;
    let mut c = Circuit::new(n + 3);
    for (r, row) in steane_rows().into_iter().enumerate() {
        let anc = 2 - r;
        for pos in 1..=n {
            if (row >> (n - pos)) & 1 == 1 {
                c.add("CNOT", &[], &[n - pos + 3, anc])?;
            }
        }
    }
    let out = c.run(&data)?;
    let anc = [2, 1, 0];
    let probs = out.marginal(&anc)?;
    let (k, &p) = probs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("eight outcomes");
    if p < 1.0 - 1e-9 {
        return Err(QError::InvalidState("syndrome is not definite; error outside the correctable set".into()));
    }
    let bits = [(k >> 2) & 1, (k >> 1) & 1, k & 1];
    let (_, post) = out.project(&anc, &bits)?;
    let mut sys = post.discard_sites(&anc)?;
    let syndrome: String = bits.iter().map(|b| b.to_string()).collect();
    let pos = bits[0] + 2 * bits[1] + 4 * bits[2];
    let fixed = if pos == 0 {
        None
    } else {
        sys.apply_in_place(&pauli_x(), &[n - pos])?;
        Some(pos)
    };
    Ok((sys, syndrome, fixed))
}

fn hadamard_layer(s: &mut StateVector) -> Result<()> {
    let h = hadamard();
    for site in 0..s.num_sites() {
        s.apply_in_place(&h, &[site])?;
    }
    Ok(())
}

/// Syndrome extraction and recovery on a possibly corrupted code state:
/// one pass for bit flips, then one between Hadamard layers for phase flips.
pub fn steane_recover(corrupted: &StateVector) -> Result<SteaneCorrection> {
    if corrupted.local_dim() != 2 || corrupted.num_sites() != 7 {
        return Err(QError::Dimension("Steane recovery acts on seven qubits".into()));
    }
    let (mut s, bit_syndrome, x_fixed) = bit_flip_pass(corrupted)?;
    hadamard_layer(&mut s)?;
    let (mut s, phase_syndrome, z_fixed) = bit_flip_pass(&s)?;
    hadamard_layer(&mut s)?;
    Ok(SteaneCorrection {
        state: s,
        bit_syndrome,
        phase_syndrome,
        x_fixed,
        z_fixed,
    })
}

/// Apply `error` to an encoded state and recover. Errors of weight above
/// one are outside what the code corrects and are refused.
pub fn steane_correct(encoded: &StateVector, error: &PauliString) -> Result<SteaneCorrection> {
    if error.weight() > 1 {
        return Err(QError::Unsupported(format!(
            "{error} has weight {}; the Steane code corrects one error",
            error.weight()
        )));
    }
    steane_recover(&error.apply(encoded)?)
}
