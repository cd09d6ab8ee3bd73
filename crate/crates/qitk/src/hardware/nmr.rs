//! NMR spin choreography on deviation density matrices, tracked as
//! product-operator coefficients.
//!
//! A term is a string of per-spin labels from `I, X, Y, Z`, spin 1 first.
//! Its operator is `(1/2) sigma^a1 x ... x sigma^an`, so `"ZI"` is `S1z`,
//! `"XZ"` is `2 S1x S2z` and `"II"` is `1/2`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use serde::Serialize;

use crate::error::{QError, Result};
use crate::gates::{controlled, pauli_x, pauli_y, pauli_z};
use crate::state::{c, cr, identity, kron_all, phase_aligned_diff, Mat, C64};

pub const MAX_SPINS: usize = 6;
const LABELS: [char; 4] = ['I', 'X', 'Y', 'Z'];
const COEFF_TOL: f64 = 1e-12;

/// `a b = phase * result` for single-spin Pauli labels.
fn pauli_mul(a: usize, b: usize) -> (C64, usize) {
    match (a, b) {
        (0, x) | (x, 0) => (cr(1.0), x),
        _ if a == b => (cr(1.0), 0),
        _ => {
            let k = 6 - a - b;
            // cyclic order X -> Y -> Z
            let phase = if (b + 3 - a) % 3 == 1 { c(0.0, 1.0) } else { c(0.0, -1.0) };
            (phase, k)
        }
    }
}

fn pauli_matrix(label: usize) -> Mat {
    match label {
        0 => identity(2),
        1 => pauli_x(),
        2 => pauli_y_hermitian(),
        _ => pauli_z(),
    }
}

/// The Hermitian `sigma_y = i XZ`; the crate's `Y` gate is the real `XZ`.
fn pauli_y_hermitian() -> Mat {
    pauli_y() * c(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductOperatorState {
    pub spins: usize,
    /// Indexed by the base-4 digits of the term, spin 1 most significant.
    pub coeffs: Vec<f64>,
}

impl ProductOperatorState {
    pub fn zero(spins: usize) -> Result<Self> {
        if spins == 0 || spins > MAX_SPINS {
            return Err(QError::CapExceeded { dim: spins, cap: MAX_SPINS });
        }
        Ok(ProductOperatorState { spins, coeffs: vec![0.0; 1 << (2 * spins)] })
    }

    pub fn from_terms(spins: usize, terms: &[(&str, f64)]) -> Result<Self> {
        let mut s = Self::zero(spins)?;
        for &(t, v) in terms {
            let k = s.term_index(t)?;
            s.coeffs[k] += v;
        }
        Ok(s)
    }

    fn digits(&self, k: usize) -> Vec<usize> {
        (0..self.spins).map(|i| (k >> (2 * (self.spins - 1 - i))) & 3).collect()
    }

    fn index(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, &d| acc * 4 + d)
    }

    fn term_index(&self, label: &str) -> Result<usize> {
        let digits: Option<Vec<usize>> = label
            .chars()
            .map(|ch| LABELS.iter().position(|&l| l == ch.to_ascii_uppercase()))
            .collect();
        match digits {
            Some(d) if d.len() == self.spins => Ok(self.index(&d)),
            _ => Err(QError::InvalidArgument(format!("bad product-operator label {label:?}"))),
        }
    }

    pub fn label(&self, k: usize) -> String {
        self.digits(k).iter().map(|&d| LABELS[d]).collect()
    }

    pub fn coeff(&self, label: &str) -> Result<f64> {
        Ok(self.coeffs[self.term_index(label)?])
    }

    /// Nonzero terms in index order.
    pub fn terms(&self) -> Vec<(String, f64)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() > COEFF_TOL)
            .map(|(k, &v)| (self.label(k), v))
            .collect()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        if self.spins != other.spins {
            return f64::INFINITY;
        }
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_matrix(&self) -> Mat {
        let dim = 1 << self.spins;
        let mut m = Mat::zeros(dim, dim);
        for (k, &v) in self.coeffs.iter().enumerate() {
            if v != 0.0 {
                let factors: Vec<Mat> = self.digits(k).into_iter().map(pauli_matrix).collect();
                m += kron_all(&factors).scale(0.5 * v);
            }
        }
        m
    }

    /// Inverse of `to_matrix`; the imaginary part of each trace is dropped.
    pub fn from_matrix(spins: usize, m: &Mat) -> Result<Self> {
        let mut s = Self::zero(spins)?;
        if m.nrows() != 1 << spins || m.ncols() != 1 << spins {
            return Err(QError::Dimension(format!("expected a {0}x{0} matrix", 1 << spins)));
        }
        for k in 0..s.coeffs.len() {
            let factors: Vec<Mat> = s.digits(k).into_iter().map(pauli_matrix).collect();
            s.coeffs[k] = (kron_all(&factors) * m).trace().re / 2.0;
        }
        Ok(s)
    }

    /// `exp(-i phi/2 G) rho exp(i phi/2 G)` for a Pauli string `G`.
    fn rotate(&self, generator: &[usize], phi: f64) -> Self {
        let (s, co) = phi.sin_cos();
        let mut out = vec![0.0; self.coeffs.len()];
        for (k, &v) in self.coeffs.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let digits = self.digits(k);
            let mut phase = cr(1.0);
            let mut prod = Vec::with_capacity(self.spins);
            for (&g, &p) in generator.iter().zip(&digits) {
                let (ph, r) = pauli_mul(g, p);
                phase *= ph;
                prod.push(r);
            }
            if phase.re.abs() > 0.5 {
                // G and P commute
                out[k] += v;
            } else {
                out[k] += co * v;
                // -i sin(phi) G P with G P = phase Q
                out[self.index(&prod)] += s * (c(0.0, -1.0) * phase).re * v;
            }
        }
        ProductOperatorState { spins: self.spins, coeffs: out }
    }

    /// Drop every term with a transverse factor.
    fn dephase(&self) -> Self {
        let mut out = self.clone();
        for k in 0..out.coeffs.len() {
            if self.digits(k).iter().any(|&d| d == 1 || d == 2) {
                out.coeffs[k] = 0.0;
            }
        }
        out
    }
}

impl fmt::Display for ProductOperatorState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (l, v)) in terms.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v:+.6}*{l}")?;
        }
        Ok(())
    }
}

/// Pulses; spins are numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum NmrPulse {
    /// `[phi]_i^x = exp(-i phi S_i^x)`
    X { spin: usize, phi: f64 },
    /// `[phi]_i^y`
    Y { spin: usize, phi: f64 },
    /// Chemical-shift evolution `exp(-i phi S_i^z)`.
    Z { spin: usize, phi: f64 },
    /// `[phi]_{ab}^J = exp(-i 2 phi S_a^z S_b^z)`
    J { a: usize, b: usize, phi: f64 },
    /// Idealized field gradient: erases transverse terms.
    Grad,
}

impl fmt::Display for NmrPulse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            NmrPulse::X { spin, phi } => write!(f, "[{phi:.6}]_{spin}^x"),
            NmrPulse::Y { spin, phi } => write!(f, "[{phi:.6}]_{spin}^y"),
            NmrPulse::Z { spin, phi } => write!(f, "[{phi:.6}]_{spin}^z"),
            NmrPulse::J { a, b, phi } => write!(f, "[{phi:.6}]_{a}{b}^J"),
            NmrPulse::Grad => write!(f, "[grad]^z"),
        }
    }
}

impl NmrPulse {
    /// Pauli generator and angle, `None` for the gradient.
    fn generator(&self, spins: usize) -> Result<Option<(Vec<usize>, f64)>> {
        let check = |i: usize| {
            if i == 0 || i > spins {
                Err(QError::Targets(format!("spin {i} outside 1..={spins}")))
            } else {
                Ok(i - 1)
            }
        };
        let single = |i: usize, axis: usize, phi: f64| -> Result<Option<(Vec<usize>, f64)>> {
            let mut g = vec![0; spins];
            g[check(i)?] = axis;
            Ok(Some((g, phi)))
        };
        match *self {
            NmrPulse::X { spin, phi } => single(spin, 1, phi),
            NmrPulse::Y { spin, phi } => single(spin, 2, phi),
            NmrPulse::Z { spin, phi } => single(spin, 3, phi),
            NmrPulse::J { a, b, phi } => {
                let (a, b) = (check(a)?, check(b)?);
                if a == b {
                    return Err(QError::Targets("scalar coupling needs two distinct spins".into()));
                }
                let mut g = vec![0; spins];
                g[a] = 3;
                g[b] = 3;
                Ok(Some((g, phi)))
            }
            NmrPulse::Grad => Ok(None),
        }
    }

    /// Propagator on `2^spins` levels; the gradient has none.
    pub fn propagator(&self, spins: usize) -> Result<Option<Mat>> {
        Ok(self.generator(spins)?.map(|(g, phi)| {
            let p = kron_all(&g.into_iter().map(pauli_matrix).collect::<Vec<_>>());
            let (s, co) = (phi / 2.0).sin_cos();
            identity(1 << spins).scale(co) - p * c(0.0, s)
        }))
    }
}

/// Apply one pulse by the product-operator rules.
pub fn nmr_pulse(pulse: &NmrPulse, state: &ProductOperatorState) -> Result<ProductOperatorState> {
    Ok(match pulse.generator(state.spins)? {
        Some((g, phi)) => state.rotate(&g, phi),
        None => state.dephase(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct NmrStep {
    pub pulse: String,
    pub state: ProductOperatorState,
}

#[derive(Debug, Clone, Serialize)]
pub struct NmrTrace {
    pub steps: Vec<NmrStep>,
}

impl NmrTrace {
    pub fn last(&self) -> &ProductOperatorState {
        &self.steps.last().expect("trace has a start").state
    }

    /// Rows `step,pulse,term,coefficient`, nonzero terms only.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,pulse,term,coefficient\n");
        for (i, s) in self.steps.iter().enumerate() {
            for (t, v) in s.state.terms() {
                out.push_str(&format!("{i},{},{t},{v}\n", s.pulse));
            }
        }
        out
    }
}

/// Run pulses in time order, checking each state against `expect` when given.
pub fn run_sequence(
    start: ProductOperatorState,
    pulses: &[NmrPulse],
    expect: Option<&[ProductOperatorState]>,
) -> Result<NmrTrace> {
    let mut steps = vec![NmrStep { pulse: "start".into(), state: start }];
    for (i, p) in pulses.iter().enumerate() {
        let next = nmr_pulse(p, &steps[i].state)?;
        if let Some(want) = expect.and_then(|e| e.get(i)) {
            let d = next.distance(want);
            if d > 1e-10 {
                return Err(QError::Sanity(format!("after {p}: got {next}, expected {want} (off by {d:e})")));
            }
        }
        steps.push(NmrStep { pulse: p.to_string(), state: next });
    }
    Ok(NmrTrace { steps })
}

pub fn thermal_deviation() -> ProductOperatorState {
    ProductOperatorState::from_terms(2, &[("ZI", 1.0), ("IZ", 1.0)]).expect("valid labels")
}

pub const PSEUDO_PURE_PULSES: [NmrPulse; 6] = [
    NmrPulse::X { spin: 2, phi: PI / 3.0 },
    NmrPulse::Grad,
    NmrPulse::X { spin: 1, phi: PI / 4.0 },
    NmrPulse::J { a: 1, b: 2, phi: PI / 2.0 },
    NmrPulse::Y { spin: 1, phi: -PI / 4.0 },
    NmrPulse::Grad,
];

fn pseudo_pure_lines() -> Vec<ProductOperatorState> {
    let r = FRAC_1_SQRT_2;
    let h = 3f64.sqrt() / 2.0;
    let lines: [&[(&str, f64)]; 6] = [
        &[("ZI", 1.0), ("IZ", 0.5), ("IY", -h)],
        &[("ZI", 1.0), ("IZ", 0.5)],
        &[("ZI", r), ("YI", -r), ("IZ", 0.5)],
        &[("ZI", r), ("XZ", r), ("IZ", 0.5)],
        &[("ZI", 0.5), ("XI", -0.5), ("XZ", 0.5), ("IZ", 0.5), ("ZZ", 0.5)],
        &[("ZI", 0.5), ("IZ", 0.5), ("ZZ", 0.5)],
    ];
    lines
        .iter()
        .map(|t| ProductOperatorState::from_terms(2, t).expect("valid labels"))
        .collect()
}

/// Thermal `S1z + S2z` to the pseudo-pure `(S1z + S2z + 2 S1z S2z)/2`,
/// each intermediate line checked.
pub fn nmr_prepare_pseudo_pure() -> Result<NmrTrace> {
    run_sequence(thermal_deviation(), &PSEUDO_PURE_PULSES, Some(&pseudo_pure_lines()))
}

/// `rho_|00> = (1/2)(1/2 + S1z + S2z + 2 S1z S2z)`
pub fn ground_state_density() -> ProductOperatorState {
    ProductOperatorState::from_terms(2, &[("II", 0.5), ("ZI", 0.5), ("IZ", 0.5), ("ZZ", 0.5)])
        .expect("valid labels")
}

/// `(1/2)(1/2 + 2 S1z S2z + 2 S1x S2x - 2 S1y S2y)`
pub fn bell_density() -> ProductOperatorState {
    ProductOperatorState::from_terms(2, &[("II", 0.5), ("ZZ", 0.5), ("XX", 0.5), ("YY", -0.5)])
        .expect("valid labels")
}

/// Time order of `[pi/2]_2^x [-pi/2]_1^y [pi/2]_12^J [pi/2]_1^y [-pi/2]_2^x`.
pub const BELL_PULSES: [NmrPulse; 5] = [
    NmrPulse::X { spin: 2, phi: -PI / 2.0 },
    NmrPulse::Y { spin: 1, phi: PI / 2.0 },
    NmrPulse::J { a: 1, b: 2, phi: PI / 2.0 },
    NmrPulse::Y { spin: 1, phi: -PI / 2.0 },
    NmrPulse::X { spin: 2, phi: PI / 2.0 },
];

/// `rho_|00>` through the Bell pulses, checked against the Bell deviation.
pub fn nmr_bell_sequence() -> Result<NmrTrace> {
    let trace = run_sequence(ground_state_density(), &BELL_PULSES, None)?;
    let d = trace.last().distance(&bell_density());
    if d > 1e-10 {
        return Err(QError::Sanity(format!("Bell sequence ends at {}", trace.last())));
    }
    Ok(trace)
}

/// Time order of `[-pi/2]_2^y [-pi/2]_2^z [pi/2]_1^z [pi/2]_12^J [pi/2]_2^y`.
pub const CNOT_PULSES: [NmrPulse; 5] = [
    NmrPulse::Y { spin: 2, phi: PI / 2.0 },
    NmrPulse::J { a: 1, b: 2, phi: PI / 2.0 },
    NmrPulse::Z { spin: 1, phi: PI / 2.0 },
    NmrPulse::Z { spin: 2, phi: -PI / 2.0 },
    NmrPulse::Y { spin: 2, phi: -PI / 2.0 },
];

/// Composite propagator of a gradient-free sequence.
pub fn sequence_propagator(pulses: &[NmrPulse], spins: usize) -> Result<Mat> {
    let mut u = identity(1 << spins);
    for p in pulses {
        let step = p
            .propagator(spins)?
            .ok_or_else(|| QError::Unsupported("a gradient has no propagator".into()))?;
        u = step * u;
    }
    Ok(u)
}

/// Propagator of the CNOT pulses (spin 1 controls), checked against CNOT
/// up to a global phase.
pub fn nmr_cnot_sequence() -> Result<Mat> {
    let u = sequence_propagator(&CNOT_PULSES, 2)?;
    let d = phase_aligned_diff(&u, &controlled(&pauli_x(), 1));
    if d > 1e-10 {
        return Err(QError::Sanity(format!("CNOT pulses miss CNOT by {d:e}")));
    }
    Ok(u)
}
