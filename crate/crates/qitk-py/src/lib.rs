//! Python bindings. Results that are records in Rust come back as plain
//! dicts; matrices are lists of rows of Python complex numbers.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;
use serde::Serialize;
use serde_json::Value;

use qitk::algorithms::{self as alg, FactorOptions, GroverParams, ShorBackend};
use qitk::codes;
use qitk::gates;
use qitk::hardware;
use qitk::protocols;
use qitk::qinfo;
use qitk::state::{self, Mat, RngSeed};
use qitk::QError;

fn err(e: QError) -> PyErr {
    match e {
        QError::Sanity(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn json_to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    match v {
        Value::Null => Ok(py.None()),
        Value::Bool(b) => b.into_py_any(py),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.into_py_any(py),
            (None, Some(i)) => i.into_py_any(py),
            _ => n.as_f64().unwrap_or(f64::NAN).into_py_any(py),
        },
        Value::String(s) => s.into_py_any(py),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for x in items {
                list.append(json_to_py(py, x)?)?;
            }
            list.into_py_any(py)
        }
        Value::Object(map) => {
            let d = PyDict::new(py);
            for (k, x) in map {
                d.set_item(k, json_to_py(py, x)?)?;
            }
            d.into_py_any(py)
        }
    }
}

fn to_py<T: Serialize>(py: Python<'_>, x: &T) -> PyResult<Py<PyAny>> {
    let v = serde_json::to_value(x).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    json_to_py(py, &v)
}

fn mat_to_rows(m: &Mat) -> Vec<Vec<Complex64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn rows_to_mat(rows: Vec<Vec<Complex64>>) -> PyResult<Mat> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(PyValueError::new_err("matrix rows must be nonempty and of equal length"));
    }
    Ok(Mat::from_fn(n, rows[0].len(), |i, j| rows[i][j]))
}

/// Pure state of `num_sites` sites of dimension `local_dim`; site 0 is the
/// least significant digit of the amplitude index.
#[pyclass(name = "StateVector", module = "qitk_py", from_py_object)]
#[derive(Clone)]
struct PyStateVector {
    inner: state::StateVector,
}

#[pymethods]
impl PyStateVector {
    #[new]
    fn new(local_dim: usize, num_sites: usize, amplitudes: Vec<Complex64>) -> PyResult<Self> {
        let inner = state::StateVector::new(local_dim, num_sites, amplitudes).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (n, index = 0))]
    fn qubits(n: usize, index: usize) -> PyResult<Self> {
        Ok(Self { inner: state::StateVector::qubits(n, index).map_err(err)? })
    }

    #[staticmethod]
    fn bloch(theta: f64, phi: f64) -> Self {
        Self { inner: state::StateVector::bloch(theta, phi) }
    }

    #[staticmethod]
    fn random(local_dim: usize, num_sites: usize, seed: u64) -> Self {
        Self { inner: state::random_state(local_dim, num_sites, &mut RngSeed(seed).rng()) }
    }

    #[getter]
    fn local_dim(&self) -> usize {
        self.inner.local_dim()
    }

    #[getter]
    fn num_sites(&self) -> usize {
        self.inner.num_sites()
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.amplitudes().to_vec()
    }

    fn probabilities(&self) -> Vec<f64> {
        self.inner.probabilities()
    }

    fn norm_sqr(&self) -> f64 {
        self.inner.norm_sqr()
    }

    /// `|<self|other>|`
    fn overlap(&self, other: &PyStateVector) -> PyResult<f64> {
        self.inner.overlap(&other.inner).map_err(err)
    }

    /// Apply a dense unitary; the first target is the most significant.
    fn apply_unitary(&self, matrix: Vec<Vec<Complex64>>, targets: Vec<usize>) -> PyResult<Self> {
        let u = rows_to_mat(matrix)?;
        Ok(Self { inner: self.inner.apply_unitary(&u, &targets).map_err(err)? })
    }

    #[pyo3(signature = (name, targets, params = vec![]))]
    fn apply_gate(&self, name: &str, targets: Vec<usize>, params: Vec<f64>) -> PyResult<Self> {
        let g = gates::gate_for(name, &params, self.inner.local_dim()).map_err(err)?;
        Ok(Self { inner: self.inner.apply_unitary(g.matrix(), &targets).map_err(err)? })
    }

    /// Measure `targets`; returns `(outcome digits, probability, post-state)`.
    fn measure(&self, targets: Vec<usize>, seed: u64) -> PyResult<(Vec<usize>, f64, Self)> {
        let rec = self.inner.measure(&targets, &mut RngSeed(seed).rng()).map_err(err)?;
        let (p, post) = self.inner.project(&targets, &rec.outcome).map_err(err)?;
        Ok((rec.outcome.clone(), p, Self { inner: post }))
    }

    fn entanglement_entropy(&self, da: usize, db: usize) -> PyResult<f64> {
        qinfo::entanglement_entropy(&self.inner, da, db).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("StateVector(local_dim={}, num_sites={})", self.inner.local_dim(), self.inner.num_sites())
    }
}

/// Gate sequence over `num_sites` sites.
#[pyclass(name = "Circuit", module = "qitk_py")]
struct PyCircuit {
    inner: gates::Circuit,
}

#[pymethods]
impl PyCircuit {
    #[new]
    #[pyo3(signature = (num_sites, local_dim = 2))]
    fn new(num_sites: usize, local_dim: usize) -> Self {
        Self { inner: gates::Circuit::with_dim(num_sites, local_dim) }
    }

    #[staticmethod]
    #[pyo3(signature = (k, d = 2))]
    fn qft(k: usize, d: usize) -> PyResult<Self> {
        Ok(Self { inner: gates::qft_circuit(k, d).map_err(err)? })
    }

    /// `n`-controlled version of a 2x2 unitary; target on site 0.
    #[staticmethod]
    fn controlled_u(matrix: Vec<Vec<Complex64>>, controls: usize) -> PyResult<Self> {
        let u = rows_to_mat(matrix)?;
        Ok(Self { inner: gates::synthesize_controlled_u(&u, controls).map_err(err)? })
    }

    #[pyo3(signature = (name, targets, params = vec![]))]
    fn add(&mut self, name: &str, targets: Vec<usize>, params: Vec<f64>) -> PyResult<()> {
        self.inner.add(name, &params, &targets).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn gate_counts(&self) -> std::collections::BTreeMap<String, usize> {
        self.inner.gate_counts()
    }

    fn unitary(&self) -> PyResult<Vec<Vec<Complex64>>> {
        Ok(mat_to_rows(&self.inner.unitary().map_err(err)?))
    }

    fn run(&self, state: &PyStateVector) -> PyResult<PyStateVector> {
        Ok(PyStateVector { inner: self.inner.run(&state.inner).map_err(err)? })
    }

    fn to_json(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        json_to_py(py, &self.inner.to_json().map_err(err)?)
    }
}

#[pyfunction]
fn gate_matrix(name: &str, params: Vec<f64>) -> PyResult<Vec<Vec<Complex64>>> {
    Ok(mat_to_rows(gates::standard_gate(name, &params).map_err(err)?.matrix()))
}

#[pyfunction]
fn dft_matrix(q: usize) -> Vec<Vec<Complex64>> {
    mat_to_rows(&gates::dft_matrix(q))
}

/// Largest entry of `|a - b|` after aligning global phase.
#[pyfunction]
fn phase_aligned_diff(a: Vec<Vec<Complex64>>, b: Vec<Vec<Complex64>>) -> PyResult<f64> {
    Ok(state::phase_aligned_diff(&rows_to_mat(a)?, &rows_to_mat(b)?))
}

#[pyfunction]
#[pyo3(signature = (n, a = None, backend = None, seed = 0, budget = 20))]
fn factor(py: Python<'_>, n: u64, a: Option<u64>, backend: Option<&str>, seed: u64, budget: usize) -> PyResult<Py<PyAny>> {
    let backend = match backend {
        None => None,
        Some("statevector") => Some(ShorBackend::Statevector),
        Some("analytic") => Some(ShorBackend::Analytic),
        Some(other) => return Err(PyValueError::new_err(format!("unknown backend {other:?}"))),
    };
    let opts = FactorOptions { forced_a: a, budget, backend };
    let rep = alg::factor(n, &opts, &mut RngSeed(seed).rng()).map_err(err)?;
    to_py(py, &rep)
}

#[pyfunction]
fn shor_prob_q(q: u64, r: u64, big_q: u64) -> f64 {
    alg::shor_prob_q(q, r, big_q)
}

#[pyfunction]
#[pyo3(signature = (qubits, marked, iterations, phi = 0.0, seed = 0))]
fn grover_search(py: Python<'_>, qubits: usize, marked: u64, iterations: usize, phi: f64, seed: u64) -> PyResult<Py<PyAny>> {
    let p = GroverParams::phase(phi);
    let r = alg::grover_search(qubits, marked, &p, iterations, &mut RngSeed(seed).rng()).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
fn grover_optimal_m(n_items: u64, phi: f64) -> PyResult<u64> {
    alg::grover_optimal_m(n_items, phi).map_err(err)
}

/// Teleport a Bloch-sphere state; returns `(bits, fidelity)`.
#[pyfunction]
#[pyo3(signature = (psi, seed = 0))]
fn teleport(psi: &PyStateVector, seed: u64) -> PyResult<((u8, u8), f64)> {
    let t = protocols::teleport(&psi.inner, &mut RngSeed(seed).rng()).map_err(err)?;
    let f = t.bob_state.overlap(&psi.inner).map_err(err)?.powi(2);
    Ok((t.bits, f))
}

#[pyfunction]
fn dense_coding(x: u8, z: u8) -> PyResult<(u8, u8)> {
    Ok(protocols::dense_coding((x, z)).map_err(err)?.0)
}

#[pyfunction]
#[pyo3(signature = (n, eve = false, loss = 0.0, check = 72, seed = 0))]
fn bb84(py: Python<'_>, n: usize, eve: bool, loss: f64, check: usize, seed: u64) -> PyResult<Py<PyAny>> {
    let s = protocols::bb84_session(n, protocols::Bb84Options { eve, loss }, &mut RngSeed(seed).rng()).map_err(err)?;
    to_py(py, &s.summary(check.min(s.sifted_len())))
}

#[pyfunction]
#[pyo3(signature = (n, check = 72, seed = 0))]
fn bbm92(py: Python<'_>, n: usize, check: usize, seed: u64) -> PyResult<Py<PyAny>> {
    let s = protocols::bbm92_session(n, &mut RngSeed(seed).rng()).map_err(err)?;
    to_py(py, &s.summary(check.min(s.sifted_len())))
}

#[pyfunction]
fn bbpssw_map(f: f64) -> f64 {
    qinfo::bbpssw_map(f)
}

/// One purification round by direct density-matrix simulation.
#[pyfunction]
fn bbpssw_simulate(py: Python<'_>, f: f64) -> PyResult<Py<PyAny>> {
    to_py(py, &qinfo::bbpssw_round(f, qinfo::DistillMode::Simulate).map_err(err)?)
}

#[pyfunction]
fn von_neumann_entropy(rho: Vec<Vec<Complex64>>) -> PyResult<f64> {
    let d = state::DensityMatrix::new(rows_to_mat(rho)?).map_err(err)?;
    Ok(qinfo::von_neumann_entropy(&d))
}

/// Encode `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`, apply `error`
/// (e.g. `"X3"`), recover; returns the syndromes and output fidelity.
#[pyfunction]
#[pyo3(signature = (error, theta = 1.0, phi = 0.5))]
fn steane_correct(py: Python<'_>, error: &str, theta: f64, phi: f64) -> PyResult<Py<PyAny>> {
    let e: codes::PauliString = error.parse().map_err(err)?;
    let enc = codes::steane_code().encode(state::StateVector::bloch(theta, phi).amplitudes()).map_err(err)?;
    let fix = codes::steane_correct(&enc, &e).map_err(err)?;
    let fidelity = fix.state.overlap(&enc).map_err(err)?.powi(2);
    let d = PyDict::new(py);
    d.set_item("correction", to_py(py, &fix)?)?;
    d.set_item("fidelity", fidelity)?;
    d.into_py_any(py)
}

/// Syndrome-decode a received seven-bit word with the [7,4] Hamming code.
#[pyfunction]
fn hamming_decode(word: &str) -> PyResult<(String, String)> {
    let code = codes::hamming_734();
    let (u, n) = codes::parse_word(word).map_err(err)?;
    if n != 7 {
        return Err(PyValueError::new_err("word must have 7 bits"));
    }
    let d = codes::decode(&code, u, &codes::coset_leader_table(&code).map_err(err)?).map_err(err)?;
    Ok((codes::format_word(d.codeword, 7), codes::format_word(d.message, 4)))
}

#[pyfunction]
fn typical_count(py: Python<'_>, p: f64, n: usize, tol: f64) -> PyResult<Py<PyAny>> {
    to_py(py, &codes::typical_count(p, n, tol).map_err(err)?)
}

/// `(error, leak)` of the ion-trap controlled sign and CNOT.
#[pyfunction]
#[pyo3(signature = (control = 0, target = 1, ions = 2))]
fn ion_trap_gates(control: usize, target: usize, ions: usize) -> PyResult<((f64, f64), (f64, f64))> {
    let cz = hardware::cz_cphase(control, target, ions).map_err(err)?;
    let cx = hardware::cz_cnot(control, target, ions).map_err(err)?;
    let z = gates::controlled(&gates::pauli_z(), 1);
    let x = gates::controlled(&gates::pauli_x(), 1);
    Ok((
        (state::phase_aligned_diff(&cz.logical, &z), cz.leak),
        (state::phase_aligned_diff(&cx.logical, &x), cx.leak),
    ))
}

/// Perturbative and exact exchange splitting `nu_J` in Hz.
#[pyfunction]
#[pyo3(signature = (b_tesla = 2.0, j_hz = 30e9))]
fn kane_nu_j(b_tesla: f64, j_hz: f64) -> PyResult<(f64, f64)> {
    let p = hardware::KaneParams::phosphorus(b_tesla).with_j(j_hz);
    let pert = hardware::kane_omega_j(&p).map_err(err)?;
    Ok((pert, hardware::kane_sector(&p).map_err(err)?.omega_j()))
}

/// Product-operator trace of an NMR sequence: `"pseudo_pure"` or `"bell"`.
#[pyfunction]
fn nmr_trace(sequence: &str) -> PyResult<Vec<(String, std::collections::BTreeMap<String, f64>)>> {
    let t = match sequence {
        "pseudo_pure" => hardware::nmr_prepare_pseudo_pure(),
        "bell" => hardware::nmr_bell_sequence(),
        other => return Err(PyValueError::new_err(format!("unknown sequence {other:?}"))),
    }
    .map_err(err)?;
    Ok(t.steps.iter().map(|s| (s.pulse.clone(), s.state.terms().into_iter().collect())).collect())
}

#[pyfunction]
#[pyo3(signature = (states, allow_long = false))]
fn busy_beaver(states: usize, allow_long: bool) -> PyResult<(usize, u64)> {
    let r = qitk::turing::busy_beaver_search(states, None, allow_long).map_err(err)?;
    Ok((r.sigma, r.sigma_prime))
}

/// Run the command-line front end in-process; returns `(code, stdout, stderr)`.
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String, String) {
    let out = qitk::cli::run_cli(std::iter::once("qitk".to_string()).chain(args));
    (out.code, out.stdout, out.stderr)
}

#[pymodule]
fn qitk_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyStateVector>()?;
    m.add_class::<PyCircuit>()?;
    m.add_function(wrap_pyfunction!(gate_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(dft_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(phase_aligned_diff, m)?)?;
    m.add_function(wrap_pyfunction!(factor, m)?)?;
    m.add_function(wrap_pyfunction!(shor_prob_q, m)?)?;
    m.add_function(wrap_pyfunction!(grover_search, m)?)?;
    m.add_function(wrap_pyfunction!(grover_optimal_m, m)?)?;
    m.add_function(wrap_pyfunction!(teleport, m)?)?;
    m.add_function(wrap_pyfunction!(dense_coding, m)?)?;
    m.add_function(wrap_pyfunction!(bb84, m)?)?;
    m.add_function(wrap_pyfunction!(bbm92, m)?)?;
    m.add_function(wrap_pyfunction!(bbpssw_map, m)?)?;
    m.add_function(wrap_pyfunction!(bbpssw_simulate, m)?)?;
    m.add_function(wrap_pyfunction!(von_neumann_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(steane_correct, m)?)?;
    m.add_function(wrap_pyfunction!(hamming_decode, m)?)?;
    m.add_function(wrap_pyfunction!(typical_count, m)?)?;
    m.add_function(wrap_pyfunction!(ion_trap_gates, m)?)?;
    m.add_function(wrap_pyfunction!(kane_nu_j, m)?)?;
    m.add_function(wrap_pyfunction!(nmr_trace, m)?)?;
    m.add_function(wrap_pyfunction!(busy_beaver, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
