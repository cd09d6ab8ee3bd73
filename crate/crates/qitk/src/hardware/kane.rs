//! Two phosphorus donors in silicon: hyperfine and exchange energy levels.
//!
//! Energies are in frequency units (`E/h`, Hz); magnetic moments in Hz/T.
//! Nuclear `0` is spin up; electrons are written `d` (down) and `u` (up).

use serde::Serialize;

use crate::error::{QError, Result};
use crate::gates::{pauli_x, pauli_y, pauli_z};
use crate::state::{c, hermitian_eigenvalues, identity, kron_all, real_mat, Mat};

/// Bohr magneton over Planck's constant, Hz/T.
pub const MU_B_HZ_PER_T: f64 = 13.996_244_936e9;
/// Nuclear magneton over Planck's constant, Hz/T.
pub const MU_N_HZ_PER_T: f64 = 7.622_593_229e6;
const ELECTRON_G: f64 = 2.0;
const P31_NUCLEAR_G: f64 = 2.0 * 1.13;
/// Hyperfine energy of a bare donor, `A/h`.
pub const P31_HYPERFINE_HZ: f64 = 2.0 * 58e6;
/// Ratio below which the hyperfine coupling counts as perturbative.
pub const PERTURBATIVE_RATIO: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KaneParams {
    pub a1: f64,
    pub a2: f64,
    pub j: f64,
    /// Electron moment per tesla, `-g_e mu_B`.
    pub gamma_e_bar: f64,
    /// Nuclear moment per tesla, `g_n mu_N`.
    pub gamma_n_bar: f64,
    pub b: f64,
}

impl KaneParams {
    /// Phosphorus donors at field `b` with equal hyperfine couplings and no exchange.
    pub fn phosphorus(b: f64) -> Self {
        KaneParams {
            a1: P31_HYPERFINE_HZ,
            a2: P31_HYPERFINE_HZ,
            j: 0.0,
            gamma_e_bar: -ELECTRON_G * MU_B_HZ_PER_T,
            gamma_n_bar: P31_NUCLEAR_G * MU_N_HZ_PER_T,
            b,
        }
    }

    pub fn with_j(self, j: f64) -> Self {
        KaneParams { j, ..self }
    }

    pub fn with_a(self, a: f64) -> Self {
        KaneParams { a1: a, a2: a, ..self }
    }

    /// `|gamma_e| B`
    pub fn electron_zeeman(&self) -> f64 {
        self.gamma_e_bar.abs() * self.b
    }

    fn symmetric_a(&self) -> Result<f64> {
        if (self.a1 - self.a2).abs() > 1e-12 * self.a1.abs().max(1.0) {
            return Err(QError::InvalidArgument("symmetric levels need A1 = A2".into()));
        }
        Ok(self.a1)
    }
}

/// Nuclear level separation of one donor to second order in `A`:
/// `gamma_n B + A/2 - A^2 / (4 gamma_e B)`.
pub fn kane_splitting(p: &KaneParams) -> f64 {
    let a = p.a1;
    p.gamma_n_bar * p.b + a / 2.0 - a * a / (4.0 * p.gamma_e_bar * p.b)
}

/// Field below which `A/2` exceeds the nuclear Zeeman energy `gamma_n B`.
pub fn kane_hyperfine_crossover(p: &KaneParams) -> f64 {
    p.a1 / (2.0 * p.gamma_n_bar)
}

/// Hydrogenic exchange estimate `1.6 e^2/(eps a_B) (r/a_B)^{5/2} e^{-2r/a_B}`
/// in Hz, for `r` and `a_b` in metres.
pub fn kane_exchange(r: f64, a_b: f64, eps: f64) -> Result<f64> {
    if !(r > 0.0 && a_b > 0.0 && eps > 0.0) {
        return Err(QError::InvalidArgument("distance, Bohr radius and permittivity must be positive".into()));
    }
    const E2_OVER_4PI_EPS0: f64 = 2.307_077_552e-28; // J m
    const PLANCK: f64 = 6.626_070_15e-34;
    let x = r / a_b;
    Ok(1.6 * E2_OVER_4PI_EPS0 / (eps * a_b) * x.powf(2.5) * (-2.0 * x).exp() / PLANCK)
}

pub const SILICON_PERMITTIVITY: f64 = 11.7;
/// Effective donor Bohr radius in silicon, metres.
pub const DONOR_BOHR_RADIUS: f64 = 30e-10;

/// Total-`S^z = -1` block in the basis `|01>dd, |10>dd, |11>du, |11>ud`.
pub fn kane_sector_hamiltonian(p: &KaneParams) -> Mat {
    let (ge, gn, j) = (p.gamma_e_bar * p.b, p.gamma_n_bar * p.b, p.j);
    let da = (p.a1 - p.a2) / 4.0;
    let (h1, h2) = (p.a1 / 2.0, p.a2 / 2.0);
    #[rustfmt::skip]
    let m = real_mat(4, 4, &[
        j / 4.0 + ge - da, 0.0,               0.0,                h1,
        0.0,               j / 4.0 + ge + da, h2,                 0.0,
        0.0,               h2,                -j / 4.0 + gn + da, j / 2.0,
        h1,                0.0,               j / 2.0,            -j / 4.0 + gn - da,
    ]);
    m
}

/// Eigenvalues of the `S^z = -1` block, ascending.
pub fn kane_sector_levels(p: &KaneParams) -> Vec<f64> {
    hermitian_eigenvalues(&kane_sector_hamiltonian(p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KaneSector {
    pub s_plus: f64,
    pub s_minus: f64,
    pub a_plus: f64,
    pub a_minus: f64,
}

impl KaneSector {
    /// `E_{s,-} - E_{a,-}`
    pub fn omega_j(&self) -> f64 {
        self.s_minus - self.a_minus
    }
}

/// Sector levels split by exchange symmetry, from the exact block.
pub fn kane_sector(p: &KaneParams) -> Result<KaneSector> {
    p.symmetric_a()?;
    let h = kane_sector_hamiltonian(p);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let project = |sign: f64| {
        let v = real_mat(4, 2, &[r, 0.0, sign * r, 0.0, 0.0, r, 0.0, sign * r]);
        hermitian_eigenvalues(&(v.adjoint() * &h * &v))
    };
    let (s, a) = (project(1.0), project(-1.0));
    Ok(KaneSector { s_plus: s[1], s_minus: s[0], a_plus: a[1], a_minus: a[0] })
}

/// `(A^2/4) (1/(|gamma_e| B - J) - 1/(|gamma_e| B))`, valid for small `A` and `J < |gamma_e| B`.
pub fn kane_omega_j(p: &KaneParams) -> Result<f64> {
    let a = p.symmetric_a()?;
    let ez = p.electron_zeeman();
    if a.abs() > PERTURBATIVE_RATIO * ez {
        return Err(QError::InvalidArgument(format!(
            "A = {a:e} is not small against |gamma_e| B = {ez:e}"
        )));
    }
    if !(0.0..ez).contains(&p.j) {
        return Err(QError::InvalidArgument(format!("J = {:e} must lie in [0, |gamma_e| B)", p.j)));
    }
    Ok(a * a / 4.0 * (1.0 / (ez - p.j) - 1.0 / ez))
}

fn spin_op(which: usize, axis: &Mat) -> Mat {
    // order: n1, n2, e1, e2; S = sigma / 2
    let f: Vec<Mat> = (0..4)
        .map(|k| if k == which { axis.scale(0.5) } else { identity(2) })
        .collect();
    kron_all(&f)
}

fn dot(a: usize, b: usize) -> Mat {
    let sy = pauli_y() * c(0.0, 1.0);
    [pauli_x(), sy, pauli_z()]
        .iter()
        .map(|ax| spin_op(a, ax) * spin_op(b, ax))
        .fold(Mat::zeros(16, 16), |acc, m| acc + m)
}

/// Full 16-level two-donor Hamiltonian, factors ordered `n1, n2, e1, e2`.
pub fn kane_hamiltonian(p: &KaneParams) -> Mat {
    let z = pauli_z();
    let mut h = Mat::zeros(16, 16);
    for (n, e, a) in [(0, 2, p.a1), (1, 3, p.a2)] {
        h -= spin_op(n, &z).scale(p.gamma_n_bar * p.b);
        h -= spin_op(e, &z).scale(p.gamma_e_bar * p.b);
        h += dot(n, e).scale(a);
    }
    h + dot(2, 3).scale(p.j)
}

#[derive(Debug, Clone, Serialize)]
pub struct KaneScheduleRow {
    pub t: f64,
    pub delta_a: f64,
    pub j: f64,
    pub levels: Vec<f64>,
}

/// Sector levels along the adiabatic CNOT schedule: bias the hyperfine
/// couplings, switch on exchange, remove the bias, then undo all three.
/// Each stage takes unit time.
pub fn kane_cnot_schedule(p: &KaneParams, delta_a: f64, j_max: f64, per_stage: usize) -> Vec<KaneScheduleRow> {
    let a = (p.a1 + p.a2) / 2.0;
    let stage = |s: usize, u: f64| -> (f64, f64) {
        match s {
            0 => (u * delta_a, 0.0),
            1 => (delta_a, u * j_max),
            2 => ((1.0 - u) * delta_a, j_max),
            3 => (u * delta_a, j_max),
            4 => (delta_a, (1.0 - u) * j_max),
            _ => ((1.0 - u) * delta_a, 0.0),
        }
    };
    let per = per_stage.max(1);
    (0..=6 * per)
        .map(|k| {
            let t = k as f64 / per as f64;
            let s = (k / per).min(5);
            let u = t - s as f64;
            let (da, j) = stage(s, u);
            let q = KaneParams { a1: a + da / 2.0, a2: a - da / 2.0, j, ..*p };
            KaneScheduleRow { t, delta_a: da, j, levels: kane_sector_levels(&q) }
        })
        .collect()
}

/// Rows `t,delta_a,j,e0,e1,e2,e3`.
pub fn kane_schedule_csv(rows: &[KaneScheduleRow]) -> String {
    let mut out = String::from("t,delta_a,j,e0,e1,e2,e3\n");
    for r in rows {
        let l: Vec<String> = r.levels.iter().map(f64::to_string).collect();
        out.push_str(&format!("{},{},{},{}\n", r.t, r.delta_a, r.j, l.join(",")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sector_basis() -> [usize; 4] {
        // index = 8 n1 + 4 n2 + 2 e1 + e2, with 1 = down
        [4 + 3, 8 + 3, 12 + 2, 12 + 1]
    }

    #[test]
    fn block_matches_full_hamiltonian() {
        let p = KaneParams { a1: 0.3, a2: 0.2, j: 0.7, gamma_e_bar: -2.0, gamma_n_bar: 0.1, b: 1.5 };
        let h = kane_hamiltonian(&p);
        let idx = sector_basis();
        let block = kane_sector_hamiltonian(&p);
        for (r, &i) in idx.iter().enumerate() {
            for (cc, &k) in idx.iter().enumerate() {
                assert!((h[(i, k)] - block[(r, cc)]).norm() < 1e-12, "({r},{cc})");
            }
            // nothing leaks out of the sector
            for k in 0..16 {
                if !idx.contains(&k) {
                    assert!(h[(i, k)].norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn closed_forms() {
        let p = KaneParams { a1: 0.3, a2: 0.3, j: 0.7, gamma_e_bar: -2.0, gamma_n_bar: 0.1, b: 1.5 };
        let s = kane_sector(&p).unwrap();
        let (ge, gn, a, j) = (p.gamma_e_bar * p.b, p.gamma_n_bar * p.b, p.a1, p.j);
        let mid = 0.5 * (ge + gn);
        let rs = 0.5 * ((gn - ge).powi(2) + a * a).sqrt();
        let ra = 0.5 * ((gn - ge - j).powi(2) + a * a).sqrt();
        assert!((s.s_plus - (mid + j / 4.0 + rs)).abs() < 1e-12);
        assert!((s.s_minus - (mid + j / 4.0 - rs)).abs() < 1e-12);
        assert!((s.a_plus - (mid - j / 4.0 + ra)).abs() < 1e-12);
        assert!((s.a_minus - (mid - j / 4.0 - ra)).abs() < 1e-12);
        let mut all = vec![s.s_plus, s.s_minus, s.a_plus, s.a_minus];
        all.sort_by(f64::total_cmp);
        for (x, y) in all.iter().zip(kane_sector_levels(&p)) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn bare_zeeman_without_hyperfine() {
        let p = KaneParams::phosphorus(2.0).with_a(0.0).with_j(0.0);
        let ge = p.gamma_e_bar * p.b;
        let gn = p.gamma_n_bar * p.b;
        let mut want = vec![ge, ge, gn, gn];
        want.sort_by(f64::total_cmp);
        for (x, y) in kane_sector_levels(&p).iter().zip(&want) {
            assert!((x - y).abs() < 1e-6);
        }
    }

    #[test]
    fn biased_levels_at_zero_exchange() {
        let mut p = KaneParams::phosphorus(2.0);
        p.a1 *= 1.1;
        p.a2 *= 0.9;
        let (ge, gn) = (p.gamma_e_bar * p.b, p.gamma_n_bar * p.b);
        let da = p.a1 - p.a2;
        let root = |a: f64| ((gn - ge).powi(2) + a * a).sqrt();
        let e01 = -da / 4.0 + 0.5 * ((ge + gn) - root(p.a1));
        let e10 = da / 4.0 + 0.5 * ((ge + gn) - root(p.a2));
        let lv = kane_sector_levels(&p);
        assert!((lv[0] - e01.min(e10)).abs() < 1e-3);
        assert!((lv[1] - e01.max(e10)).abs() < 1e-3);
    }

    #[test]
    fn exchange_frequency_at_two_tesla() {
        let p = KaneParams::phosphorus(2.0).with_j(30e9);
        let nu = kane_omega_j(&p).unwrap();
        assert!((nu - 75e3).abs() < 0.1 * 75e3, "{nu}");
        // the exact splitting agrees to a fraction of a percent here
        let exact = kane_sector(&p).unwrap().omega_j();
        assert!((exact - nu).abs() / nu < 0.01);
        assert!(kane_omega_j(&p.with_j(60e9)).is_err());
    }

    #[test]
    fn perturbative_regime() {
        let base = KaneParams::phosphorus(2.0);
        let ez = base.electron_zeeman();
        let p = base.with_a(0.02 * ez).with_j(0.3 * ez);
        let exact = kane_sector(&p).unwrap().omega_j();
        let approx = kane_omega_j(&p).unwrap();
        assert!((exact - approx).abs() / exact < 0.05);
        assert!(kane_omega_j(&base.with_a(0.5 * ez)).is_err());
    }

    #[test]
    fn hyperfine_crossover_and_exchange_scale() {
        let p = KaneParams::phosphorus(2.0);
        let b = kane_hyperfine_crossover(&p);
        assert!((b - 3.5).abs() < 0.2, "{b}");
        assert!(p.a1 / 2.0 > p.gamma_n_bar * 3.3);
        assert!(kane_splitting(&p) > p.gamma_n_bar * p.b);
        // exchange reaches |gamma_e| B / 2 between 100 and 200 Angstrom
        let target = p.electron_zeeman() / 2.0;
        let j = |r: f64| kane_exchange(r * 1e-10, DONOR_BOHR_RADIUS, SILICON_PERMITTIVITY).unwrap();
        assert!(j(100.0) > target && j(200.0) < target);
    }

    #[test]
    fn schedule_levels_move_continuously() {
        let p = KaneParams::phosphorus(2.0);
        let rows = kane_cnot_schedule(&p, 0.2 * p.a1, 0.5 * p.electron_zeeman(), 40);
        assert_eq!(rows.len(), 241);
        for w in rows.windows(2) {
            let q = |r: &KaneScheduleRow| KaneParams {
                a1: p.a1 + r.delta_a / 2.0,
                a2: p.a1 - r.delta_a / 2.0,
                j: r.j,
                ..p
            };
            // Weyl: sorted eigenvalues move by at most the norm of the change
            let dh = kane_sector_hamiltonian(&q(&w[1])) - kane_sector_hamiltonian(&q(&w[0]));
            let bound = dh.norm();
            for (x, y) in w[0].levels.iter().zip(&w[1].levels) {
                assert!((x - y).abs() <= bound + 1e-6);
            }
        }
        let first = &rows[0].levels;
        let last = &rows[240].levels;
        for (x, y) in first.iter().zip(last) {
            assert!((x - y).abs() < 1e-6);
        }
        assert!(kane_schedule_csv(&rows).starts_with("t,delta_a,j,e0,e1,e2,e3\n0,0,0,"));
    }
}
