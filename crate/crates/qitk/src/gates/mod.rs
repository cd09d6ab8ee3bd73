//! Gate library, circuits, exact universal synthesis and the QFT builder.
//!
//! Gate matrices index their own sub-register with `targets[0]` as the most
//! significant digit, so `CNOT` on `[control, target]` is the textbook
//! 4x4 permutation. `Y` is the real antisymmetric `-i sigma_y`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{QError, Result};
use crate::state::{c, check_unitary, cis, cr, identity, mat, Mat, C64};

pub mod circuit;
pub mod qft;
pub mod synth;

pub use circuit::{circuit_unitary, fanout_circuit, ghz_circuit, run, Circuit, Step};
pub use qft::{dft_matrix, qft_circuit};
pub use synth::{
    abc_factors, controlled_u_cost, euler_decompose, mcnot_cost, sqrt_unitary,
    synthesize_controlled_u, EulerDecomposition,
};

/// A named unitary acting on `arity` sites of dimension `local_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    name: String,
    params: Vec<f64>,
    local_dim: usize,
    arity: usize,
    matrix: Mat,
}

impl Gate {
    /// Wrap an arbitrary unitary. Gates built this way serialise only if
    /// `name` and `params` reconstruct them through [`gate_for`].
    pub fn new(name: impl Into<String>, params: Vec<f64>, local_dim: usize, matrix: Mat) -> Result<Gate> {
        check_unitary(&matrix)?;
        let mut arity = 0;
        let mut size = 1;
        while size < matrix.nrows() {
            size *= local_dim;
            arity += 1;
        }
        if size != matrix.nrows() || arity == 0 {
            return Err(QError::Dimension(format!(
                "{}x{} is not a power of {local_dim}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Gate {
            name: name.into(),
            params,
            local_dim,
            arity,
            matrix,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn dagger(&self) -> Gate {
        Gate {
            name: format!("{}^dag", self.name),
            params: self.params.clone(),
            local_dim: self.local_dim,
            arity: self.arity,
            matrix: self.matrix.adjoint(),
        }
    }
}

fn want(name: &str, params: &[f64], n: usize) -> Result<()> {
    if params.len() != n {
        return Err(QError::InvalidArgument(format!(
            "gate {name} takes {n} parameter(s), got {}",
            params.len()
        )));
    }
    if params.iter().any(|p| !p.is_finite()) {
        return Err(QError::InvalidArgument(format!("gate {name}: non-finite angle")));
    }
    Ok(())
}

pub fn rx(theta: f64) -> Mat {
    let (s, co) = (theta / 2.0).sin_cos();
    mat(2, 2, &[cr(co), c(0.0, -s), c(0.0, -s), cr(co)])
}

pub fn ry(theta: f64) -> Mat {
    let (s, co) = (theta / 2.0).sin_cos();
    mat(2, 2, &[cr(co), cr(-s), cr(s), cr(co)])
}

pub fn rz(theta: f64) -> Mat {
    mat(2, 2, &[cis(-theta / 2.0), cr(0.0), cr(0.0), cis(theta / 2.0)])
}

pub fn ph(delta: f64) -> Mat {
    identity(2) * cis(delta)
}

/// `Ph(delta) Rz(alpha) Ry(beta) Rz(gamma)`
pub fn euler_matrix(delta: f64, alpha: f64, beta: f64, gamma: f64) -> Mat {
    ph(delta) * rz(alpha) * ry(beta) * rz(gamma)
}

pub fn pauli_x() -> Mat {
    mat(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)])
}

pub fn pauli_z() -> Mat {
    mat(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(-1.0)])
}

/// `-i sigma_y`
pub fn pauli_y() -> Mat {
    mat(2, 2, &[cr(0.0), cr(-1.0), cr(1.0), cr(0.0)])
}

pub fn hadamard() -> Mat {
    mat(2, 2, &[cr(1.0), cr(1.0), cr(1.0), cr(-1.0)]) * cr(FRAC_1_SQRT_2)
}

/// Block-diagonal controlled-`u` with `n` controls above the target block.
pub fn controlled(u: &Mat, n: usize) -> Mat {
    let k = u.nrows();
    let dim = k << n;
    let mut m = identity(dim);
    let off = dim - k;
    for i in 0..k {
        for j in 0..k {
            m[(off + i, off + j)] = u[(i, j)];
        }
    }
    m
}

fn permutation(dim: usize, f: impl Fn(usize) -> usize) -> Mat {
    let mut m = Mat::zeros(dim, dim);
    for i in 0..dim {
        m[(f(i), i)] = cr(1.0);
    }
    m
}

/// Generalised Hadamard `omega^{ab} / sqrt(d)` with `omega = e^{2 pi i/d}`.
pub fn qudit_hadamard(d: usize) -> Mat {
    let s = 1.0 / (d as f64).sqrt();
    Mat::from_fn(d, d, |a, b| cis(2.0 * PI * ((a * b) % d) as f64 / d as f64) * s)
}

/// Two-qudit phase `|a b> -> e^{i theta a b} |a b>`.
pub fn qudit_cphase(d: usize, theta: f64) -> Mat {
    Mat::from_fn(d * d, d * d, |i, j| {
        if i == j {
            cis(theta * ((i / d) * (i % d)) as f64)
        } else {
            cr(0.0)
        }
    })
}

pub fn qudit_swap(d: usize) -> Mat {
    permutation(d * d, |i| (i % d) * d + i / d)
}

/// Qubit gate by name. Names are case-insensitive.
pub fn standard_gate(name: &str, params: &[f64]) -> Result<Gate> {
    gate_for(name, params, 2)
}

/// Gate by name for the given local dimension. Qudit registers support
/// `H`, `CPH(theta)`, `SWAP`, `X` (cyclic shift) and `I`.
pub fn gate_for(name: &str, params: &[f64], local_dim: usize) -> Result<Gate> {
    let key = name.to_ascii_uppercase();
    if local_dim < 2 {
        return Err(QError::Dimension(format!("local dimension {local_dim}")));
    }
    if local_dim != 2 {
        let d = local_dim;
        let m = match key.as_str() {
            "I" => {
                want(&key, params, 0)?;
                identity(d)
            }
            "H" => {
                want(&key, params, 0)?;
                qudit_hadamard(d)
            }
            "X" => {
                want(&key, params, 0)?;
                permutation(d, |i| (i + 1) % d)
            }
            "CPH" => {
                want(&key, params, 1)?;
                qudit_cphase(d, params[0])
            }
            "SWAP" => {
                want(&key, params, 0)?;
                qudit_swap(d)
            }
            _ => return Err(QError::UnknownGate(format!("{name} (d={d})"))),
        };
        return Gate::new(key, params.to_vec(), d, m);
    }
    let m = match key.as_str() {
        "I" | "ID" => {
            want(&key, params, 0)?;
            identity(2)
        }
        "X" | "NOT" => {
            want(&key, params, 0)?;
            pauli_x()
        }
        "Y" => {
            want(&key, params, 0)?;
            pauli_y()
        }
        "Z" => {
            want(&key, params, 0)?;
            pauli_z()
        }
        "H" => {
            want(&key, params, 0)?;
            hadamard()
        }
        "SQRT_NOT" | "SNOT" => {
            want(&key, params, 0)?;
            let p = c(0.5, 0.5);
            let q = c(0.5, -0.5);
            mat(2, 2, &[p, q, q, p])
        }
        "PH" => {
            want(&key, params, 1)?;
            ph(params[0])
        }
        "RX" => {
            want(&key, params, 1)?;
            rx(params[0])
        }
        "RY" => {
            want(&key, params, 1)?;
            ry(params[0])
        }
        "RZ" => {
            want(&key, params, 1)?;
            rz(params[0])
        }
        // i e^{-i theta sigma_x / 2}
        "S" => {
            want(&key, params, 1)?;
            rx(params[0]) * C64::i()
        }
        "U" => {
            want(&key, params, 4)?;
            euler_matrix(params[0], params[1], params[2], params[3])
        }
        "CNOT" | "CX" => {
            want(&key, params, 0)?;
            controlled(&pauli_x(), 1)
        }
        "CZ" => {
            want(&key, params, 0)?;
            controlled(&pauli_z(), 1)
        }
        "CPH" => {
            want(&key, params, 1)?;
            controlled(&mat(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cis(params[0])]), 1)
        }
        "SWAP" => {
            want(&key, params, 0)?;
            qudit_swap(2)
        }
        "SQRT_SWAP" => {
            want(&key, params, 0)?;
            let p = c(0.5, 0.5);
            let q = c(0.5, -0.5);
            let mut m = identity(4);
            m[(1, 1)] = p;
            m[(1, 2)] = q;
            m[(2, 1)] = q;
            m[(2, 2)] = p;
            m
        }
        "TOFFOLI" | "CCNOT" => {
            want(&key, params, 0)?;
            controlled(&pauli_x(), 2)
        }
        "FREDKIN" | "CSWAP" => {
            want(&key, params, 0)?;
            controlled(&qudit_swap(2), 1)
        }
        "DEUTSCH" | "D" => {
            want(&key, params, 1)?;
            controlled(&(rx(params[0]) * C64::i()), 2)
        }
        _ => return Err(QError::UnknownGate(name.to_string())),
    };
    Gate::new(key, params.to_vec(), 2, m)
}

/// Names accepted by [`standard_gate`] together with their parameter counts.
pub const STANDARD_GATES: &[(&str, usize)] = &[
    ("I", 0),
    ("X", 0),
    ("Y", 0),
    ("Z", 0),
    ("H", 0),
    ("SQRT_NOT", 0),
    ("PH", 1),
    ("RX", 1),
    ("RY", 1),
    ("RZ", 1),
    ("S", 1),
    ("U", 4),
    ("CNOT", 0),
    ("CZ", 0),
    ("CPH", 1),
    ("SWAP", 0),
    ("SQRT_SWAP", 0),
    ("TOFFOLI", 0),
    ("FREDKIN", 0),
    ("DEUTSCH", 1),
];
