//! Complex linear-algebra substrate: state vectors, density matrices,
//! tensor products, partial traces and Born-rule measurement.
//!
//! Sites are indexed least significant first: the basis label of
//! `|x_{n-1} ... x_1 x_0>` is `x = sum x_i d^i`. Tensor products put the
//! left factor on the high-significance sites, so `|0> (x) |1>` is index 1.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QError, Result};

pub type C64 = Complex<f64>;
pub type Mat = DMatrix<C64>;

/// Tolerance for algebraic identities (norms, unitarity, traces).
pub const TOL: f64 = 1e-10;
/// Tolerance for positivity of eigenvalues.
pub const PSD_TOL: f64 = 1e-8;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `e^{i theta}`
#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// Build a matrix from row-major entries.
pub fn mat(rows: usize, cols: usize, entries: &[C64]) -> Mat {
    DMatrix::from_row_slice(rows, cols, entries)
}

pub fn real_mat(rows: usize, cols: usize, entries: &[f64]) -> Mat {
    let v: Vec<C64> = entries.iter().map(|&x| cr(x)).collect();
    mat(rows, cols, &v)
}

pub fn identity(dim: usize) -> Mat {
    DMatrix::identity(dim, dim)
}

pub fn dagger(m: &Mat) -> Mat {
    m.adjoint()
}

/// Kronecker product with `a` as the most significant factor.
pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

pub fn kron_all(factors: &[Mat]) -> Mat {
    factors
        .iter()
        .skip(1)
        .fold(factors[0].clone(), |acc, f| acc.kronecker(f))
}

/// Largest entry of `|U U^dagger - 1|`.
pub fn unitarity_deviation(u: &Mat) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    let p = u * u.adjoint();
    max_abs_diff(&p, &identity(u.nrows()))
}

pub fn is_unitary(u: &Mat, tol: f64) -> bool {
    unitarity_deviation(u) <= tol
}

pub fn check_unitary(u: &Mat) -> Result<()> {
    let dev = unitarity_deviation(u);
    if dev <= TOL {
        Ok(())
    } else {
        Err(QError::NotUnitary(dev))
    }
}

pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest elementwise deviation after aligning the global phase of `b` to `a`.
pub fn phase_aligned_diff(a: &Mat, b: &Mat) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    let overlap: C64 = a.iter().zip(b.iter()).map(|(x, y)| y.conj() * x).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        cr(1.0)
    };
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - phase * y).norm())
        .fold(0.0, f64::max)
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &Mat) -> Vec<f64> {
    let h = (m + m.adjoint()).scale(0.5);
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and
/// the matching eigenvectors as columns.
pub fn hermitian_eigen(m: &Mat) -> (Vec<f64>, Mat) {
    let h = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(h);
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = Mat::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vecs.set_column(k, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// `exp(-i t H)` for Hermitian `H`.
pub fn expm_hermitian(h: &Mat, t: f64) -> Mat {
    let (vals, vecs) = hermitian_eigen(h);
    let n = h.nrows();
    let mut d = Mat::zeros(n, n);
    for (k, v) in vals.iter().enumerate() {
        d[(k, k)] = cis(-t * v);
    }
    &vecs * d * vecs.adjoint()
}

/// Nearest integer `[x] = floor(x + 1/2)`.
pub fn nearest_int(x: f64) -> i64 {
    (x + 0.5).floor() as i64
}

/// Seed for the crate's single generator family. Identical seeds give
/// identical sampling sequences; `split` derives independent streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

pub type QRng = ChaCha20Rng;

impl RngSeed {
    pub fn rng(self) -> QRng {
        ChaCha20Rng::seed_from_u64(self.0)
    }

    pub fn split(self, stream: u64) -> RngSeed {
        // splitmix64 finaliser over (seed, stream)
        let mut z = self
            .0
            .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(stream.wrapping_add(1)));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        RngSeed(z ^ (z >> 31))
    }
}

/// Draw an index with the given (approximately normalised) weights.
pub fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            last = i;
        }
        acc += w;
        if u < acc {
            return i;
        }
    }
    last
}

/// Standard complex normal sample (Box-Muller).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    C64::from_polar((-2.0 * u1.ln()).sqrt(), 2.0 * std::f64::consts::PI * u2) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random unitary via Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Mat {
    let mut m = Mat::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    for j in 0..dim {
        for k in 0..j {
            let proj: C64 = (0..dim).map(|i| m[(i, k)].conj() * m[(i, j)]).sum();
            for i in 0..dim {
                let v = m[(i, k)];
                m[(i, j)] -= proj * v;
            }
        }
        let n: f64 = (0..dim).map(|i| m[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..dim {
            m[(i, j)] /= n;
        }
    }
    m
}

/// Haar-random pure state.
pub fn random_state<R: Rng + ?Sized>(local_dim: usize, num_sites: usize, rng: &mut R) -> StateVector {
    let amps = (0..pow(local_dim, num_sites)).map(|_| complex_gaussian(rng)).collect();
    StateVector::normalized(local_dim, num_sites, amps).expect("nonzero Gaussian vector")
}

fn pow(d: usize, n: usize) -> usize {
    d.pow(n as u32)
}

/// Normalised complex amplitude array over `num_sites` qudits of dimension `local_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    local_dim: usize,
    num_sites: usize,
    amps: Vec<C64>,
}

/// Outcome of a projective measurement on a subset of sites.
#[derive(Debug, Clone)]
pub struct MeasurementRecord {
    /// One digit per measured site, in the order the targets were given.
    pub outcome: Vec<usize>,
    pub probability: f64,
    pub post_state: StateVector,
}

impl MeasurementRecord {
    /// Outcome digits read as a number with the first target most significant.
    pub fn value(&self) -> usize {
        let d = self.post_state.local_dim;
        self.outcome.iter().fold(0, |acc, &x| acc * d + x)
    }
}

#[derive(Serialize)]
struct StateJson {
    dims: Vec<usize>,
    amplitudes: Vec<[f64; 2]>,
}

impl StateVector {
    pub fn new(local_dim: usize, num_sites: usize, amps: Vec<C64>) -> Result<Self> {
        let s = Self::new_unnormalized(local_dim, num_sites, amps)?;
        let n = s.norm_sqr();
        if (n - 1.0).abs() > TOL {
            return Err(QError::InvalidState(format!("norm^2 = {n}, expected 1")));
        }
        Ok(s)
    }

    /// Rescale arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(local_dim: usize, num_sites: usize, amps: Vec<C64>) -> Result<Self> {
        let mut s = Self::new_unnormalized(local_dim, num_sites, amps)?;
        let n = s.norm_sqr().sqrt();
        if n == 0.0 {
            return Err(QError::InvalidState("zero vector".into()));
        }
        s.amps.iter_mut().for_each(|a| *a /= n);
        Ok(s)
    }

    fn new_unnormalized(local_dim: usize, num_sites: usize, amps: Vec<C64>) -> Result<Self> {
        if local_dim < 2 || num_sites < 1 {
            return Err(QError::Dimension(format!(
                "need local_dim >= 2 and num_sites >= 1, got d={local_dim}, n={num_sites}"
            )));
        }
        let dim = local_dim
            .checked_pow(num_sites as u32)
            .ok_or_else(|| QError::Dimension("dimension overflow".into()))?;
        if amps.len() != dim {
            return Err(QError::Dimension(format!(
                "{} amplitudes for dimension {dim}",
                amps.len()
            )));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(QError::InvalidState("non-finite amplitude".into()));
        }
        Ok(Self {
            local_dim,
            num_sites,
            amps,
        })
    }

    pub fn basis(local_dim: usize, num_sites: usize, index: usize) -> Result<Self> {
        let dim = pow(local_dim, num_sites);
        if index >= dim {
            return Err(QError::InvalidState(format!(
                "basis index {index} out of range {dim}"
            )));
        }
        let mut amps = vec![cr(0.0); dim];
        amps[index] = cr(1.0);
        Self::new(local_dim, num_sites, amps)
    }

    /// `|0...0>` on `n` qubits.
    pub fn zero_qubits(n: usize) -> Self {
        Self::basis(2, n, 0).expect("valid basis state")
    }

    pub fn qubits(n: usize, index: usize) -> Result<Self> {
        Self::basis(2, n, index)
    }

    /// `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`
    pub fn bloch(theta: f64, phi: f64) -> Self {
        let amps = vec![cr((theta / 2.0).cos()), cis(phi) * (theta / 2.0).sin()];
        Self::new(2, 1, amps).expect("Bloch state is normalised")
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(QError::Dimension("inner product of unequal dimensions".into()));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|`, the phase-insensitive overlap.
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn digit(&self, index: usize, site: usize) -> usize {
        (index / pow(self.local_dim, site)) % self.local_dim
    }

    fn check_targets(&self, targets: &[usize]) -> Result<()> {
        for (i, &t) in targets.iter().enumerate() {
            if t >= self.num_sites {
                return Err(QError::Targets(format!(
                    "site {t} out of range for {} sites",
                    self.num_sites
                )));
            }
            if targets[..i].contains(&t) {
                return Err(QError::Targets(format!("repeated target {t}")));
            }
        }
        Ok(())
    }

    /// Marginal distribution of the given sites; outcome index has
    /// `targets[0]` as its most significant digit.
    pub fn marginal(&self, targets: &[usize]) -> Result<Vec<f64>> {
        self.check_targets(targets)?;
        let d = self.local_dim;
        let mut out = vec![0.0; pow(d, targets.len())];
        for (i, a) in self.amps.iter().enumerate() {
            let key = targets.iter().fold(0, |acc, &t| acc * d + self.digit(i, t));
            out[key] += a.norm_sqr();
        }
        Ok(out)
    }

    pub fn density(&self) -> DensityMatrix {
        let v = nalgebra::DVector::from_column_slice(&self.amps);
        let m = &v * v.adjoint();
        DensityMatrix {
            dim: self.dim(),
            m,
        }
    }

    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        tensor(self, other)
    }

    /// Apply a `d^k x d^k` unitary to the listed sites. `targets[0]` is the
    /// most significant digit of the gate's own basis index.
    pub fn apply_unitary(&self, u: &Mat, targets: &[usize]) -> Result<StateVector> {
        check_unitary(u)?;
        let mut out = self.clone();
        out.apply_in_place(u, targets)?;
        Ok(out)
    }

    /// Same as `apply_unitary` without the unitarity check; used by the
    /// circuit engine whose gates are validated at construction.
    pub fn apply_in_place(&mut self, u: &Mat, targets: &[usize]) -> Result<()> {
        self.check_targets(targets)?;
        let d = self.local_dim;
        let k = targets.len();
        let block = pow(d, k);
        if u.nrows() != block || u.ncols() != block {
            return Err(QError::Dimension(format!(
                "{}x{} matrix on {k} sites of dimension {d}",
                u.nrows(),
                u.ncols()
            )));
        }
        apply_kernel(&mut self.amps, d, self.num_sites, u, targets);
        Ok(())
    }

    /// Apply a classical permutation `index -> perm(index)` of basis states.
    pub fn permute_in_place(&mut self, perm: impl Fn(usize) -> usize) -> Result<()> {
        let mut out = vec![cr(0.0); self.amps.len()];
        let mut hit = vec![false; self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let j = perm(i);
            if j >= out.len() || hit[j] {
                return Err(QError::InvalidArgument("map is not a permutation".into()));
            }
            hit[j] = true;
            out[j] = *a;
        }
        self.amps = out;
        Ok(())
    }

    /// Multiply each amplitude by a basis-dependent phase.
    pub fn phase_in_place(&mut self, phase: impl Fn(usize) -> C64) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a *= phase(i);
        }
    }

    /// Conditional state after finding `outcome` on `targets`, with its probability.
    /// The measured sites stay in the register, collapsed.
    pub fn project(&self, targets: &[usize], outcome: &[usize]) -> Result<(f64, StateVector)> {
        self.check_targets(targets)?;
        if outcome.len() != targets.len() || outcome.iter().any(|&o| o >= self.local_dim) {
            return Err(QError::InvalidArgument("outcome does not match targets".into()));
        }
        let mut amps = self.amps.clone();
        for (i, a) in amps.iter_mut().enumerate() {
            if targets
                .iter()
                .zip(outcome)
                .any(|(&t, &o)| self.digit(i, t) != o)
            {
                *a = cr(0.0);
            }
        }
        let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if p <= 0.0 {
            return Ok((0.0, self.clone()));
        }
        let s = p.sqrt();
        amps.iter_mut().for_each(|a| *a /= s);
        Ok((
            p,
            StateVector {
                local_dim: self.local_dim,
                num_sites: self.num_sites,
                amps,
            },
        ))
    }

    pub fn measure<R: Rng + ?Sized>(&self, targets: &[usize], rng: &mut R) -> Result<MeasurementRecord> {
        let probs = self.marginal(targets)?;
        let key = sample_index(&probs, rng);
        let d = self.local_dim;
        let k = targets.len();
        let outcome: Vec<usize> = (0..k).map(|j| (key / pow(d, k - 1 - j)) % d).collect();
        let (probability, post_state) = self.project(targets, &outcome)?;
        Ok(MeasurementRecord {
            outcome,
            probability,
            post_state,
        })
    }

    /// Drop sites that are known to be in a definite basis state, returning
    /// the state of the remaining sites (in their original order).
    pub fn discard_sites(&self, sites: &[usize]) -> Result<StateVector> {
        self.check_targets(sites)?;
        let keep: Vec<usize> = (0..self.num_sites).filter(|s| !sites.contains(s)).collect();
        if keep.is_empty() {
            return Err(QError::InvalidArgument("cannot discard every site".into()));
        }
        let d = self.local_dim;
        let mut out = vec![cr(0.0); pow(d, keep.len())];
        let mut fixed: Option<Vec<usize>> = None;
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() < 1e-24 {
                continue;
            }
            let pattern: Vec<usize> = sites.iter().map(|&s| self.digit(i, s)).collect();
            match &fixed {
                None => fixed = Some(pattern),
                Some(p) if *p != pattern => {
                    return Err(QError::InvalidState(
                        "discarded sites are entangled with the rest".into(),
                    ))
                }
                _ => {}
            }
            let j = keep
                .iter()
                .enumerate()
                .map(|(pos, &s)| self.digit(i, s) * pow(d, pos))
                .sum::<usize>();
            out[j] += *a;
        }
        StateVector::normalized(d, keep.len(), out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let j = StateJson {
            dims: vec![self.local_dim; self.num_sites],
            amplitudes: self.amps.iter().map(|a| [a.re, a.im]).collect(),
        };
        serde_json::to_value(j).expect("state serialises")
    }
}

/// Gather/scatter kernel shared by state and circuit code.
pub(crate) fn apply_kernel(amps: &mut [C64], d: usize, n: usize, u: &Mat, targets: &[usize]) {
    let k = targets.len();
    let block = pow(d, k);
    let offsets: Vec<usize> = (0..block)
        .map(|m| {
            (0..k)
                .map(|j| ((m / pow(d, k - 1 - j)) % d) * pow(d, targets[j]))
                .sum()
        })
        .collect();
    let rest: Vec<usize> = (0..n).filter(|s| !targets.contains(s)).collect();
    let rest_strides: Vec<usize> = rest.iter().map(|&s| pow(d, s)).collect();
    let outer = pow(d, rest.len());
    let mut buf = vec![cr(0.0); block];
    let mut res = vec![cr(0.0); block];
    for r in 0..outer {
        let mut base = 0;
        let mut rr = r;
        for &st in &rest_strides {
            base += (rr % d) * st;
            rr /= d;
        }
        for (m, &o) in offsets.iter().enumerate() {
            buf[m] = amps[base + o];
        }
        for (row, out) in res.iter_mut().enumerate() {
            let mut acc = cr(0.0);
            for (col, b) in buf.iter().enumerate() {
                let x = u[(row, col)];
                if x.re != 0.0 || x.im != 0.0 {
                    acc += x * b;
                }
            }
            *out = acc;
        }
        for (m, &o) in offsets.iter().enumerate() {
            amps[base + o] = res[m];
        }
    }
}

/// Kronecker product of two registers; `a` occupies the high sites.
pub fn tensor(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    if a.local_dim != b.local_dim {
        return Err(QError::Dimension(format!(
            "local dimensions {} and {} differ",
            a.local_dim, b.local_dim
        )));
    }
    let mut amps = Vec::with_capacity(a.dim() * b.dim());
    for x in &a.amps {
        for y in &b.amps {
            amps.push(x * y);
        }
    }
    StateVector::new(a.local_dim, a.num_sites + b.num_sites, amps)
}

pub fn apply_unitary(state: &StateVector, u: &Mat, targets: &[usize]) -> Result<StateVector> {
    state.apply_unitary(u, targets)
}

pub fn measure<R: Rng + ?Sized>(
    state: &StateVector,
    targets: &[usize],
    rng: &mut R,
) -> Result<MeasurementRecord> {
    state.measure(targets, rng)
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    m: Mat,
}

impl DensityMatrix {
    pub fn new(m: Mat) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(QError::Dimension("density matrix must be square".into()));
        }
        let herm = max_abs_diff(&m, &m.adjoint());
        if herm > TOL {
            return Err(QError::InvalidState(format!("not Hermitian ({herm:.3e})")));
        }
        let tr = m.trace();
        if (tr - cr(1.0)).norm() > TOL {
            return Err(QError::InvalidState(format!("trace {tr}, expected 1")));
        }
        let min = hermitian_eigenvalues(&m)[0];
        if min < -PSD_TOL {
            return Err(QError::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self { dim: m.nrows(), m })
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        psi.density()
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            dim,
            m: identity(dim).scale(1.0 / dim as f64),
        }
    }

    /// Convex combination `sum p_i rho_i`.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self> {
        let dim = parts
            .first()
            .ok_or_else(|| QError::InvalidArgument("empty mixture".into()))?
            .1
            .dim;
        let mut m = Mat::zeros(dim, dim);
        for (p, r) in parts {
            if r.dim != dim || *p < 0.0 {
                return Err(QError::InvalidArgument("bad mixture member".into()));
            }
            m += r.m.scale(*p);
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &Mat {
        &self.m
    }

    pub fn into_matrix(self) -> Mat {
        self.m
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.m)
    }

    pub fn purity(&self) -> f64 {
        (&self.m * &self.m).trace().re
    }

    /// `U rho U^dagger`
    pub fn conjugate(&self, u: &Mat) -> Result<DensityMatrix> {
        check_unitary(u)?;
        if u.nrows() != self.dim {
            return Err(QError::Dimension("unitary does not match density matrix".into()));
        }
        Ok(DensityMatrix {
            dim: self.dim,
            m: u * &self.m * u.adjoint(),
        })
    }

    pub fn partial_trace(&self, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
        partial_trace(self, dims, keep)
    }

    pub fn fidelity_to_pure(&self, psi: &StateVector) -> Result<f64> {
        fidelity_to_pure(self, psi)
    }
}

/// Mixed-radix digit helpers; `dims[0]` is the most significant factor.
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Reduced state on the factors listed in `keep`. `dims` gives the factor
/// dimensions from most to least significant, as in a tensor product.
pub fn partial_trace(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    if dims.iter().product::<usize>() != rho.dim {
        return Err(QError::Dimension(format!(
            "factor dimensions {dims:?} do not multiply to {}",
            rho.dim
        )));
    }
    for (i, &k) in keep.iter().enumerate() {
        if k >= dims.len() || keep[..i].contains(&k) {
            return Err(QError::Dimension(format!("bad subsystem selector {keep:?}")));
        }
    }
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let st = strides(dims);
    let kd: Vec<usize> = keep.iter().map(|&i| dims[i]).collect();
    let td: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
    let kdim: usize = kd.iter().product();
    let tdim: usize = td.iter().product();
    let compose = |sel: &[usize], sel_dims: &[usize], mut idx: usize| -> usize {
        let mut full = 0;
        for j in (0..sel.len()).rev() {
            full += (idx % sel_dims[j]) * st[sel[j]];
            idx /= sel_dims[j];
        }
        full
    };
    let kfull: Vec<usize> = (0..kdim).map(|i| compose(&keep, &kd, i)).collect();
    let tfull: Vec<usize> = (0..tdim).map(|i| compose(&traced, &td, i)).collect();
    let mut out = Mat::zeros(kdim, kdim);
    for a in 0..kdim {
        for b in 0..kdim {
            let mut acc = cr(0.0);
            for &t in &tfull {
                acc += rho.m[(kfull[a] + t, kfull[b] + t)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(DensityMatrix { dim: kdim, m: out })
}

/// `<psi|rho|psi>`
pub fn fidelity_to_pure(rho: &DensityMatrix, psi: &StateVector) -> Result<f64> {
    if psi.dim() != rho.dim {
        return Err(QError::Dimension("state and density matrix differ in dimension".into()));
    }
    let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
    let f = (v.adjoint() * &rho.m * &v)[(0, 0)];
    Ok(f.re.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plus() -> StateVector {
        StateVector::normalized(2, 1, vec![cr(1.0), cr(1.0)]).unwrap()
    }

    #[test]
    fn tensor_examples() {
        let s = tensor(&StateVector::qubits(1, 0).unwrap(), &StateVector::qubits(1, 1).unwrap()).unwrap();
        assert_eq!(s.amplitude(1), cr(1.0));
        let s = tensor(&plus(), &StateVector::qubits(1, 0).unwrap()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitude(0) - cr(h)).norm() < 1e-15);
        assert!((s.amplitude(2) - cr(h)).norm() < 1e-15);
        let minus = StateVector::normalized(2, 1, vec![cr(1.0), cr(-1.0)]).unwrap();
        let s = tensor(&plus(), &minus).unwrap();
        let signs = [0.5, -0.5, 0.5, -0.5];
        for (a, e) in s.amplitudes().iter().zip(signs) {
            assert!((a - cr(e)).norm() < 1e-15);
        }
    }

    #[test]
    fn tensor_rejects_mixed_local_dims() {
        let q = StateVector::qubits(1, 0).unwrap();
        let t = StateVector::basis(3, 1, 0).unwrap();
        assert!(matches!(tensor(&q, &t), Err(QError::Dimension(_))));
    }

    #[test]
    fn apply_examples() {
        let x = real_mat(2, 2, &[0., 1., 1., 0.]);
        let s = StateVector::qubits(1, 0).unwrap().apply_unitary(&x, &[0]).unwrap();
        assert_eq!(s.amplitude(1), cr(1.0));
        let cnot = real_mat(4, 4, &[1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0.]);
        let s = StateVector::qubits(2, 0b10).unwrap().apply_unitary(&cnot, &[1, 0]).unwrap();
        assert_eq!(s.amplitude(0b11), cr(1.0));
        let h = real_mat(2, 2, &[1., 1., 1., -1.]).scale(std::f64::consts::FRAC_1_SQRT_2);
        let s = StateVector::qubits(2, 0).unwrap().apply_unitary(&h, &[0]).unwrap();
        assert!((s.amplitude(0).re - s.amplitude(1).re).abs() < 1e-15);
        assert!(s.amplitude(2).norm() < 1e-15);
    }

    #[test]
    fn apply_errors() {
        let s = StateVector::zero_qubits(2);
        let bad = real_mat(2, 2, &[1., 1., 0., 1.]);
        assert!(matches!(s.apply_unitary(&bad, &[0]), Err(QError::NotUnitary(_))));
        let cnot = identity(4);
        assert!(matches!(s.apply_unitary(&cnot, &[1, 1]), Err(QError::Targets(_))));
    }

    #[test]
    fn measurement_examples() {
        let mut rng = RngSeed(3).rng();
        let one = StateVector::qubits(1, 1).unwrap();
        let r = one.measure(&[0], &mut rng).unwrap();
        assert_eq!(r.outcome, vec![1]);
        assert!((r.probability - 1.0).abs() < 1e-12);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = StateVector::new(2, 2, vec![cr(h), cr(h), cr(0.0), cr(0.0)]).unwrap();
        let r = s.measure(&[0], &mut rng).unwrap();
        assert!((r.probability - 0.5).abs() < 1e-12);
        let expected = StateVector::qubits(2, r.outcome[0]).unwrap();
        assert!((r.post_state.overlap(&expected).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let phi = StateVector::new(2, 2, vec![cr(h), cr(0.0), cr(0.0), cr(h)]).unwrap();
        let ra = phi.density().partial_trace(&[2, 2], &[0]).unwrap();
        assert!(max_abs_diff(ra.matrix(), &identity(2).scale(0.5)) < 1e-12);
        let p = StateVector::qubits(2, 0b01).unwrap().density();
        let ra = p.partial_trace(&[2, 2], &[0]).unwrap();
        assert!((ra.matrix()[(0, 0)] - cr(1.0)).norm() < 1e-12);
        let rb = p.partial_trace(&[2, 2], &[1]).unwrap();
        assert!((rb.matrix()[(1, 1)] - cr(1.0)).norm() < 1e-12);
        let none = p.partial_trace(&[2, 2], &[]).unwrap();
        assert!((none.trace() - cr(1.0)).norm() < 1e-12);
        assert!(p.partial_trace(&[2, 3], &[0]).is_err());
    }

    #[test]
    fn fidelity_of_mixed() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = StateVector::new(2, 2, vec![cr(0.0), cr(h), cr(-h), cr(0.0)]).unwrap();
        assert!((fidelity_to_pure(&singlet.density(), &singlet).unwrap() - 1.0).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(4);
        assert!((fidelity_to_pure(&mixed, &singlet).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(real_mat(2, 2, &[1.0, 0.0, 0.0, 0.5])).is_err());
        assert!(DensityMatrix::new(real_mat(2, 2, &[1.5, 0.0, 0.0, -0.5])).is_err());
        assert!(DensityMatrix::new(real_mat(2, 2, &[0.5, 0.1, 0.1, 0.5])).is_ok());
    }

    #[test]
    fn seeds_reproduce() {
        let a: Vec<u64> = (0..5).map(|_| RngSeed(9).rng().random()).collect();
        let b: Vec<u64> = (0..5).map(|_| RngSeed(9).rng().random()).collect();
        assert_eq!(a, b);
        assert_ne!(RngSeed(9).split(0), RngSeed(9).split(1));
    }
}
