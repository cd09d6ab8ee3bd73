//! Shor order finding and factoring.
//!
//! The statevector backend builds `Q^{-1/2} sum_q |q>|a^q mod N>` directly,
//! runs the QFT circuit on the source register and measures it. The
//! analytic backend finds `r` classically and draws `q` from the exact
//! outcome distribution, which makes five-digit moduli tractable.

use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use super::numtheory::{
    best_convergent, gcd, is_prime, mod_exp, multiplicative_order, perfect_power_base, prime_factors,
};
use crate::error::{QError, Result};
use crate::gates::{qft_circuit, Circuit};
use crate::state::{cr, sample_index, StateVector, C64};

/// Largest register (source plus work qubits) the statevector backend will build.
pub const STATEVECTOR_CAP: usize = 1 << 16;
/// Half-width of the window around each peak used by analytic sampling.
const PEAK_WINDOW: u64 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ShorBackend {
    Statevector,
    Analytic,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShorContext {
    pub n: u64,
    pub a: u64,
    /// Source qubits, `Q = 2^K` with `N^2 < Q < 2 N^2`.
    pub k: u32,
    pub q: u64,
    pub r: Option<u64>,
    /// Measurement draws allowed before giving up on the order.
    pub max_draws: usize,
}

impl ShorContext {
    pub fn new(n: u64, a: u64) -> Result<ShorContext> {
        if n < 3 || n % 2 == 0 {
            return Err(QError::InvalidArgument(format!("N={n} must be odd and at least 3")));
        }
        if n >= 1 << 31 {
            return Err(QError::Unsupported(format!("N={n} needs Q beyond 64 bits")));
        }
        if a < 2 || a >= n || gcd(a, n) != 1 {
            return Err(QError::InvalidArgument(format!("a={a} must lie in [2, N) and be coprime to N={n}")));
        }
        let n2 = n * n;
        let k = 64 - n2.leading_zeros();
        Ok(ShorContext {
            n,
            a,
            k,
            q: 1u64 << k,
            r: None,
            max_draws: 32,
        })
    }

    /// Qubits holding `a^q mod N`.
    pub fn work_qubits(&self) -> u32 {
        64 - (self.n - 1).leading_zeros()
    }

    pub fn fits_statevector(&self) -> bool {
        ((self.k + self.work_qubits()) as usize) <= STATEVECTOR_CAP.trailing_zeros() as usize
    }
}

/// `sin^2(pi B f) / sin^2(pi f)` with `f = t/Q`, reduced modulo 1 exactly.
fn fejer(b: u64, t: u64, q: u64) -> f64 {
    if t == 0 {
        return (b as f64) * (b as f64);
    }
    let num = ((b as u128 * t as u128) % q as u128) as f64 / q as f64;
    let den = t as f64 / q as f64;
    let s = (PI * num).sin() / (PI * den).sin();
    s * s
}

/// Probability of reading `q` from the source register when the order is `r`.
pub fn shor_prob_q(q: u64, r: u64, big_q: u64) -> f64 {
    if r == 0 || big_q == 0 || q >= big_q {
        return 0.0;
    }
    let t = ((q as u128 * r as u128) % big_q as u128) as u64;
    let r_eff = r.min(big_q);
    // j < rho has B = L + 1 terms, the rest have L
    let l = big_q / r;
    let rho = big_q % r;
    let long = rho.min(r_eff) as f64 * fejer(l + 1, t, big_q);
    let short = if l > 0 {
        (r_eff - rho.min(r_eff)) as f64 * fejer(l, t, big_q)
    } else {
        0.0
    };
    (long + short) / (big_q as f64 * big_q as f64)
}

/// Exact source-register distribution from the simulated circuit.
pub fn statevector_distribution(ctx: &ShorContext) -> Result<Vec<f64>> {
    if !ctx.fits_statevector() {
        return Err(QError::CapExceeded {
            dim: 1usize << (ctx.k + ctx.work_qubits()),
            cap: STATEVECTOR_CAP,
        });
    }
    let k = ctx.k as usize;
    let m = ctx.work_qubits() as usize;
    let big_q = ctx.q as usize;
    let amp = cr(1.0 / (big_q as f64).sqrt());
    let mut v = vec![C64::new(0.0, 0.0); 1 << (k + m)];
    let mut y = 1u64;
    for q in 0..big_q {
        v[(q << m) | y as usize] = amp;
        y = y * ctx.a % ctx.n;
    }
    let state = StateVector::new(2, k + m, v)?;
    let mut circ = Circuit::new(k + m);
    let map: Vec<usize> = (m..m + k).collect();
    circ.append_mapped(&qft_circuit(k, 2)?, &map)?;
    let out = circ.run_with_cap(&state, STATEVECTOR_CAP)?;
    let source: Vec<usize> = (m..m + k).rev().collect();
    out.marginal(&source)
}

fn cdf_sample<R: Rng + ?Sized>(cdf: &[f64], rng: &mut R) -> usize {
    let u = rng.random::<f64>() * cdf[cdf.len() - 1];
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

/// Sampler for source-register readouts.
pub struct QSampler {
    q: u64,
    kind: SamplerKind,
}

enum SamplerKind {
    Table(Vec<f64>),
    /// Peak centres, per-peak cumulative mass, and the order.
    Peaks {
        r: u64,
        cdf: Vec<f64>,
    },
}

impl QSampler {
    pub fn new(ctx: &ShorContext, backend: ShorBackend) -> Result<QSampler> {
        match backend {
            ShorBackend::Statevector => {
                let p = statevector_distribution(ctx)?;
                let cdf = p
                    .iter()
                    .scan(0.0, |acc, &x| {
                        *acc += x;
                        Some(*acc)
                    })
                    .collect();
                Ok(QSampler {
                    q: ctx.q,
                    kind: SamplerKind::Table(cdf),
                })
            }
            ShorBackend::Analytic => {
                let r = multiplicative_order(ctx.a, ctx.n)
                    .ok_or_else(|| QError::Sanity("order does not exist".into()))?;
                let mut acc = 0.0;
                let cdf = (0..r)
                    .map(|s| {
                        acc += window(ctx.q, r, s).map(|q| shor_prob_q(q, r, ctx.q)).sum::<f64>();
                        acc
                    })
                    .collect();
                Ok(QSampler {
                    q: ctx.q,
                    kind: SamplerKind::Peaks { r, cdf },
                })
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match &self.kind {
            SamplerKind::Table(cdf) => cdf_sample(cdf, rng) as u64,
            SamplerKind::Peaks { r, cdf } => {
                let s = cdf_sample(cdf, rng) as u64;
                let qs: Vec<u64> = window(self.q, *r, s).collect();
                let w: Vec<f64> = qs.iter().map(|&q| shor_prob_q(q, *r, self.q)).collect();
                qs[sample_index(&w, rng)]
            }
        }
    }
}

/// `q` values within `PEAK_WINDOW` of `s Q / r`, clipped to `[0, Q)`.
fn window(big_q: u64, r: u64, s: u64) -> impl Iterator<Item = u64> {
    let centre = ((s as u128 * big_q as u128 + r as u128 / 2) / r as u128) as i128;
    let lo = (centre - PEAK_WINDOW as i128).max(0);
    let hi = (centre + PEAK_WINDOW as i128).min(big_q as i128 - 1);
    (lo..=hi).map(|q| q as u64)
}

/// Turn one readout into the order, or `None` if it carries no information.
/// The convergent denominator is only a divisor of `r` in general, so
/// multiples are tried and the result is then reduced to the true order.
pub fn order_from_measurement(q: u64, big_q: u64, n: u64, a: u64) -> Option<u64> {
    if q == 0 {
        return None;
    }
    let (_, d) = best_convergent(q, big_q, n)?;
    promote(d, n, a)
}

fn promote(d: u64, n: u64, a: u64) -> Option<u64> {
    if d == 0 {
        return None;
    }
    let limit = (n / d).clamp(1, 1 << 12);
    let mut r = (1..=limit).map(|k| k * d).find(|&r| mod_exp(a, r, n) == 1)?;
    let mut primes = prime_factors(r);
    primes.dedup();
    for p in primes {
        while r % p == 0 && mod_exp(a, r / p, n) == 1 {
            r /= p;
        }
    }
    Some(r)
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderResult {
    pub r: u64,
    /// Every readout taken, in order.
    pub samples: Vec<u64>,
    /// Convergent `c/d` of the final, successful readout.
    pub convergent: Option<(u64, u64)>,
    pub backend: ShorBackend,
}

/// Sample readouts until one yields the order, up to `ctx.max_draws`.
pub fn shor_order<R: Rng + ?Sized>(
    ctx: &ShorContext,
    backend: ShorBackend,
    rng: &mut R,
) -> Result<OrderResult> {
    let sampler = QSampler::new(ctx, backend)?;
    let mut samples = Vec::new();
    for _ in 0..ctx.max_draws {
        let q = sampler.sample(rng);
        samples.push(q);
        if let Some(r) = order_from_measurement(q, ctx.q, ctx.n, ctx.a) {
            return Ok(OrderResult {
                r,
                convergent: best_convergent(q, ctx.q, ctx.n),
                samples,
                backend,
            });
        }
    }
    Err(QError::BudgetExhausted(format!(
        "no readout gave the order of {} mod {} in {} draws",
        ctx.a, ctx.n, ctx.max_draws
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AttemptOutcome {
    /// `a^{r/2} +- 1` share distinct nontrivial factors with `N`.
    Success,
    /// `gcd(a, N) > 1`: a factor without any quantum step.
    SharedFactor,
    OddOrder,
    /// `a^{r/2} = -1 mod N`: the gcds are only 1 and `N`.
    MinusOne,
    OrderNotFound,
    /// `N` is a perfect power; split classically.
    PrimePower,
}

#[derive(Debug, Clone, Serialize)]
pub struct FactorAttempt {
    pub a: u64,
    pub r: Option<u64>,
    pub outcome: AttemptOutcome,
    /// `(gcd(a^{r/2} - 1, N), gcd(a^{r/2} + 1, N))` when `r` is even.
    pub gcds: Option<(u64, u64)>,
    pub samples: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct FactorOptions {
    pub forced_a: Option<u64>,
    pub budget: usize,
    /// `None` picks the statevector backend whenever the register fits.
    pub backend: Option<ShorBackend>,
}

impl Default for FactorOptions {
    fn default() -> Self {
        FactorOptions {
            forced_a: None,
            budget: 20,
            backend: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FactorReport {
    pub n: u64,
    pub factors: Option<(u64, u64)>,
    pub attempts: Vec<FactorAttempt>,
}

fn sorted(a: u64, b: u64) -> (u64, u64) {
    (a.min(b), a.max(b))
}

fn attempt<R: Rng + ?Sized>(n: u64, a: u64, backend: Option<ShorBackend>, rng: &mut R) -> Result<FactorAttempt> {
    let g = gcd(a, n);
    if g > 1 {
        return Ok(FactorAttempt {
            a,
            r: None,
            outcome: AttemptOutcome::SharedFactor,
            gcds: Some(sorted(g, n / g)),
            samples: vec![],
        });
    }
    let ctx = ShorContext::new(n, a)?;
    let backend = backend.unwrap_or(if ctx.fits_statevector() {
        ShorBackend::Statevector
    } else {
        ShorBackend::Analytic
    });
    let found = match shor_order(&ctx, backend, rng) {
        Ok(o) => o,
        Err(QError::BudgetExhausted(_)) => {
            return Ok(FactorAttempt {
                a,
                r: None,
                outcome: AttemptOutcome::OrderNotFound,
                gcds: None,
                samples: vec![],
            })
        }
        Err(e) => return Err(e),
    };
    let r = found.r;
    if r % 2 == 1 {
        return Ok(FactorAttempt {
            a,
            r: Some(r),
            outcome: AttemptOutcome::OddOrder,
            gcds: None,
            samples: found.samples,
        });
    }
    let y = mod_exp(a, r / 2, n);
    let gcds = (gcd((y + n - 1) % n, n), gcd((y + 1) % n, n));
    // gcd(0, N) = N covers the y = -1 branch
    let outcome = if y == n - 1 {
        AttemptOutcome::MinusOne
    } else {
        AttemptOutcome::Success
    };
    Ok(FactorAttempt {
        a,
        r: Some(r),
        outcome,
        gcds: Some(gcds),
        samples: found.samples,
    })
}

/// Split an odd composite `N`. Perfect powers are split classically; otherwise
/// random bases are tried until one succeeds or `budget` runs out. With a
/// forced base a single attempt is made and its failure is reported, not raised.
pub fn factor<R: Rng + ?Sized>(n: u64, opts: &FactorOptions, rng: &mut R) -> Result<FactorReport> {
    if n < 3 || n % 2 == 0 {
        return Err(QError::InvalidArgument(format!("N={n} must be odd and at least 3")));
    }
    if is_prime(n) {
        return Err(QError::InvalidArgument(format!("N={n} is prime")));
    }
    if let Some((b, _)) = perfect_power_base(n) {
        return Ok(FactorReport {
            n,
            factors: Some(sorted(b, n / b)),
            attempts: vec![FactorAttempt {
                a: b,
                r: None,
                outcome: AttemptOutcome::PrimePower,
                gcds: None,
                samples: vec![],
            }],
        });
    }
    let mut attempts = Vec::new();
    if let Some(a) = opts.forced_a {
        if a < 2 || a >= n {
            return Err(QError::InvalidArgument(format!("a={a} must lie in [2, N)")));
        }
        let at = attempt(n, a, opts.backend, rng)?;
        let factors = success_pair(&at, n);
        attempts.push(at);
        return Ok(FactorReport { n, factors, attempts });
    }
    for _ in 0..opts.budget {
        let a = rng.random_range(2..n);
        let at = attempt(n, a, opts.backend, rng)?;
        let factors = success_pair(&at, n);
        attempts.push(at);
        if factors.is_some() {
            return Ok(FactorReport { n, factors, attempts });
        }
    }
    Err(QError::BudgetExhausted(format!(
        "no factor of {n} after {} bases",
        opts.budget
    )))
}

fn success_pair(at: &FactorAttempt, n: u64) -> Option<(u64, u64)> {
    match at.outcome {
        AttemptOutcome::Success | AttemptOutcome::SharedFactor => {
            let (g1, g2) = at.gcds?;
            let f = [g1, g2].into_iter().find(|&g| g > 1 && g < n)?;
            Some(sorted(f, n / f))
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::RngSeed;

    #[test]
    fn context_register_sizes() {
        let c = ShorContext::new(15, 7).unwrap();
        assert_eq!((c.k, c.q, c.work_qubits()), (8, 256, 4));
        assert!(c.fits_statevector());
        assert_eq!(ShorContext::new(21823, 12083).unwrap().q, 1 << 29);
        assert_eq!(ShorContext::new(25397, 71).unwrap().q, 1 << 30);
        assert!(ShorContext::new(15, 5).is_err());
        assert!(ShorContext::new(16, 3).is_err());
    }

    #[test]
    fn prob_q_examples() {
        for q in [0, 64, 128, 192] {
            assert!((shor_prob_q(q, 4, 256) - 0.25).abs() < 1e-12);
        }
        assert!(shor_prob_q(1, 4, 256) < 1e-12);
        let v = shor_prob_q(6170930, 522, 1 << 30);
        assert!(v > 2e-3 / 1.5 && v < 2e-3 * 1.5, "{v}");
        // r = 10, Q = 256: mass near multiples of 25.6
        let total: f64 = (0..256).map(|q| shor_prob_q(q, 10, 256)).sum();
        assert!((total - 1.0).abs() < 1e-10);
        assert!(shor_prob_q(26, 10, 256) > 10.0 * shor_prob_q(13, 10, 256));
    }

    #[test]
    fn brute_force_prob_matches() {
        // direct geometric sums over j and b
        for (r, big_q) in [(3u64, 32u64), (5, 64), (7, 64), (6, 50)] {
            for q in 0..big_q {
                let mut p = 0.0;
                for j in 0..r {
                    let mut s = C64::new(0.0, 0.0);
                    let mut x = j;
                    while x < big_q {
                        s += crate::state::cis(2.0 * PI * (q * x) as f64 / big_q as f64);
                        x += r;
                    }
                    p += s.norm_sqr();
                }
                p /= (big_q * big_q) as f64;
                assert!((p - shor_prob_q(q, r, big_q)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn statevector_matches_formula() {
        let ctx = ShorContext::new(15, 7).unwrap();
        let p = statevector_distribution(&ctx).unwrap();
        for (q, &x) in p.iter().enumerate() {
            assert!((x - shor_prob_q(q as u64, 4, 256)).abs() < 1e-10);
        }
        let ctx = ShorContext::new(21, 2).unwrap();
        let p = statevector_distribution(&ctx).unwrap();
        for (q, &x) in p.iter().enumerate() {
            assert!((x - shor_prob_q(q as u64, 6, ctx.q)).abs() < 1e-10);
        }
    }

    #[test]
    fn orders_from_worked_examples() {
        assert_eq!(order_from_measurement(64, 256, 15, 7), Some(4));
        assert_eq!(order_from_measurement(192, 256, 15, 7), Some(4));
        assert_eq!(order_from_measurement(6170930, 1 << 30, 25397, 71), Some(522));
        let mut rng = RngSeed(11).rng();
        let ctx = ShorContext::new(15, 7).unwrap();
        assert_eq!(shor_order(&ctx, ShorBackend::Statevector, &mut rng).unwrap().r, 4);
        let ctx = ShorContext::new(21823, 12083).unwrap();
        assert_eq!(shor_order(&ctx, ShorBackend::Analytic, &mut rng).unwrap().r, 3588);
        let ctx = ShorContext::new(25397, 71).unwrap();
        assert_eq!(shor_order(&ctx, ShorBackend::Analytic, &mut rng).unwrap().r, 522);
    }

    #[test]
    fn factoring() {
        let mut rng = RngSeed(12).rng();
        let r = factor(15, &FactorOptions::default(), &mut rng).unwrap();
        assert_eq!(r.factors, Some((3, 5)));
        let forced = FactorOptions {
            forced_a: Some(14335),
            ..Default::default()
        };
        let r = factor(21823, &forced, &mut rng).unwrap();
        assert_eq!(r.factors, None);
        assert_eq!(r.attempts[0].outcome, AttemptOutcome::MinusOne);
        let (g1, g2) = r.attempts[0].gcds.unwrap();
        assert_eq!(sorted(g1, g2), (1, 21823));
        let r = factor(21823, &FactorOptions::default(), &mut rng).unwrap();
        assert_eq!(r.factors, Some((139, 157)));
        let r = factor(3 * 3 * 3 * 3 * 3, &FactorOptions::default(), &mut rng).unwrap();
        assert_eq!(r.factors, Some((3, 81)));
        assert!(factor(13, &FactorOptions::default(), &mut rng).is_err());
    }
}
