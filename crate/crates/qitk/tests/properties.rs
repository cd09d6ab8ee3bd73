use std::collections::BTreeMap;
use std::f64::consts::PI;

use proptest::prelude::*;
use rand::Rng;

use qitk::algorithms::{
    deutsch_jozsa, factor, gcd, grover_search, shor_prob_q, simon, BooleanOracle, FactorOptions, GroverParams,
    ShorBackend,
};
use qitk::cli::run_cli;
use qitk::codes::{bound_table, coset_leader_table, decode, hamming_734, repetition_code};
use qitk::gates::{euler_decompose, qft_circuit, standard_gate, Circuit};
use qitk::hardware::{nmr_pulse, NmrPulse, ProductOperatorState};
use qitk::protocols::{bb84_session, dense_coding, rsa_decrypt, rsa_encrypt, rsa_keygen, teleport, Bb84Options, Party};
use qitk::qinfo::{bbpssw_map, locc_convertible, majorizes, schmidt, von_neumann_entropy, werner, singlet};
use qitk::state::{dagger, phase_aligned_diff, random_state, random_unitary, DensityMatrix, RngSeed, StateVector};
use qitk::turing::{adding_machine, machine_count, run, three_state_beaver, unary_pair};

const GATES: [(&str, usize, usize); 12] = [
    ("H", 0, 1),
    ("X", 0, 1),
    ("Y", 0, 1),
    ("Z", 0, 1),
    ("RX", 1, 1),
    ("RY", 1, 1),
    ("RZ", 1, 1),
    ("PH", 1, 1),
    ("CNOT", 0, 2),
    ("CPH", 1, 2),
    ("SWAP", 0, 2),
    ("TOFFOLI", 0, 3),
];

fn random_circuit(n: usize, len: usize, rng: &mut impl Rng) -> Circuit {
    let mut c = Circuit::new(n);
    while c.len() < len {
        let (name, np, arity) = GATES[rng.random_range(0..GATES.len())];
        if arity > n {
            continue;
        }
        let mut sites: Vec<usize> = (0..n).collect();
        for i in 0..arity {
            let j = rng.random_range(i..n);
            sites.swap(i, j);
        }
        let params: Vec<f64> = (0..np).map(|_| rng.random_range(-PI..PI)).collect();
        c.add(name, &params, &sites[..arity]).unwrap();
    }
    c
}

fn mixed(qubits: usize, rng: &mut impl Rng) -> DensityMatrix {
    let psi = random_state(2, qubits + 1, rng);
    let dims = vec![2; qubits + 1];
    let keep: Vec<usize> = (0..qubits).collect();
    psi.density().partial_trace(&dims, &keep).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn circuits_preserve_norm(seed in any::<u64>(), n in 1usize..=10, len in 0usize..=50) {
        let mut rng = RngSeed(seed).rng();
        let c = random_circuit(n, len, &mut rng);
        let psi = random_state(2, n, &mut rng);
        let out = c.run(&psi).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-9);
        prop_assert!(out.amplitudes().iter().all(|a| a.re.is_finite() && a.im.is_finite()));
    }

    #[test]
    fn unitary_then_inverse_is_identity(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = RngSeed(seed).rng();
        let psi = random_state(2, n, &mut rng);
        let k = rng.random_range(1..=n.min(3));
        let u = random_unitary(1 << k, &mut rng);
        let targets: Vec<usize> = (0..k).collect();
        let back = psi.apply_unitary(&u, &targets).unwrap().apply_unitary(&dagger(&u), &targets).unwrap();
        prop_assert!((back.overlap(&psi).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn density_matrices_are_valid(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = RngSeed(seed).rng();
        let rho = mixed(n, &mut rng);
        prop_assert!(DensityMatrix::new(rho.matrix().clone()).is_ok());
        let dims = vec![2; n];
        let a = rho.partial_trace(&dims, &[0]).unwrap();
        let none = a.partial_trace(&[2], &[]).unwrap();
        prop_assert!((none.trace().re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn seeds_reproduce_samples(seed in any::<u64>()) {
        let psi = random_state(2, 4, &mut RngSeed(seed).rng());
        let draw = |s: u64| {
            let mut rng = RngSeed(s).rng();
            (0..50).map(|_| psi.measure(&[3, 2, 1, 0], &mut rng).unwrap().value()).collect::<Vec<_>>()
        };
        prop_assert_eq!(draw(seed), draw(seed));
    }

    #[test]
    fn measurement_probability_is_born_weight(seed in any::<u64>()) {
        let mut rng = RngSeed(seed).rng();
        let psi = random_state(2, 3, &mut rng);
        let marg = psi.marginal(&[2, 0]).unwrap();
        for k in 0..4 {
            let (p, _) = psi.project(&[2, 0], &[k >> 1, k & 1]).unwrap();
            prop_assert!((p - marg[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn euler_angles_rebuild_the_matrix(seed in any::<u64>()) {
        let u = random_unitary(2, &mut RngSeed(seed).rng());
        let e = euler_decompose(&u).unwrap();
        prop_assert!(qitk::state::max_abs_diff(&e.matrix(), &u) < 1e-10);
    }

    #[test]
    fn gates_are_unitary(theta in -10.0f64..10.0) {
        for (name, np, _) in GATES {
            let params = vec![theta; np];
            prop_assert!(qitk::state::is_unitary(standard_gate(name, &params).unwrap().matrix(), 1e-10));
        }
    }

    #[test]
    fn grover_full_matches_reduced(seed in any::<u64>(), n in 1usize..=10, m in 0usize..=100, b in -PI..PI, d in -PI..PI) {
        let mut rng = RngSeed(seed).rng();
        let x0 = rng.random_range(0..1u64 << n);
        let p = GroverParams::new(qitk::state::cis(b), qitk::state::cis(d)).unwrap();
        let r = grover_search(n, x0, &p, m, &mut rng).unwrap();
        prop_assert!((r.success_probability - r.predicted).abs() < 1e-9);
    }

    #[test]
    fn shor_distribution_sums_to_one(k in 1u32..=12, r_frac in 0.0f64..1.0) {
        let big_q = 1u64 << k;
        let r = 1 + ((big_q - 1) as f64 * r_frac) as u64;
        let mut total = 0.0;
        let mut good = 0.0;
        for q in 0..big_q {
            let p = shor_prob_q(q, r, big_q);
            total += p;
            // |qr mod Q| at most r/2, taken symmetrically
            let t = (q * r) % big_q;
            if 2 * t.min(big_q - t) <= r {
                good += p;
            }
        }
        prop_assert!((total - 1.0).abs() < 1e-8, "sum {}", total);
        prop_assert!(good >= 0.405, "good mass {}", good);
    }

    #[test]
    fn factors_multiply_back(seed in any::<u64>(), i in 0usize..8) {
        let ns = [15u64, 21, 33, 35, 39, 51, 55, 77];
        let n = ns[i];
        let opts = FactorOptions { forced_a: None, budget: 40, backend: Some(ShorBackend::Analytic) };
        let rep = factor(n, &opts, &mut RngSeed(seed).rng()).unwrap();
        let (p, q) = rep.factors.expect("budget of 40 bases suffices");
        prop_assert_eq!(p * q, n);
        prop_assert!(p > 1 && q > 1);
    }

    #[test]
    fn deutsch_jozsa_uses_one_query(seed in any::<u64>(), n in 1usize..=8, balanced in any::<bool>()) {
        let mut rng = RngSeed(seed).rng();
        let f = if balanced {
            let mask = rng.random_range(1..1u64 << n);
            BooleanOracle::from_fn(n, 1, |x| (x & mask).count_ones() as u64 & 1).unwrap()
        } else {
            BooleanOracle::constant(n, rng.random_range(0..2))
        };
        let r = deutsch_jozsa(&f, &mut rng).unwrap();
        prop_assert_eq!(r.queries, 1);
        prop_assert_eq!(f.queries(), 1);
        prop_assert_eq!(r.prob_all_zero > 0.5, !balanced);
    }

    #[test]
    fn simon_finds_the_period(seed in any::<u64>(), n in 2usize..=8) {
        let mut rng = RngSeed(seed).rng();
        let p = rng.random_range(1..1u64 << n);
        let f = BooleanOracle::from_fn(n, n, |x| x.min(x ^ p)).unwrap();
        let r = simon(&f, &mut rng).unwrap();
        prop_assert_eq!(r.period, p);
        prop_assert_eq!(r.queries, f.queries());
        prop_assert!(r.queries <= 10 * n);
    }

    #[test]
    fn entropy_inequalities(seed in any::<u64>(), three in any::<bool>(), lam in 0.0f64..1.0) {
        let mut rng = RngSeed(seed).rng();
        let n = if three { 3 } else { 2 };
        let rho = mixed(n, &mut rng);
        let sigma = mixed(n, &mut rng);
        let dims = vec![2; n];
        let a: Vec<usize> = vec![0];
        let b: Vec<usize> = (1..n).collect();
        let s_ab = von_neumann_entropy(&rho);
        let s_a = von_neumann_entropy(&rho.partial_trace(&dims, &a).unwrap());
        let s_b = von_neumann_entropy(&rho.partial_trace(&dims, &b).unwrap());
        prop_assert!(s_ab <= s_a + s_b + 1e-8);
        prop_assert!((s_a - s_b).abs() <= s_ab + 1e-8);
        let mix = DensityMatrix::mixture(&[(lam, rho.clone()), (1.0 - lam, sigma.clone())]).unwrap();
        prop_assert!(von_neumann_entropy(&mix) >= lam * s_ab + (1.0 - lam) * von_neumann_entropy(&sigma) - 1e-8);
    }

    #[test]
    fn mixing_entropy_bounds_state_entropy(seed in any::<u64>(), k in 2usize..=4) {
        let mut rng = RngSeed(seed).rng();
        let raw: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 0.05).collect();
        let sum: f64 = raw.iter().sum();
        let p: Vec<f64> = raw.iter().map(|x| x / sum).collect();
        let h: f64 = -p.iter().map(|x| x * x.log2()).sum::<f64>();
        let random: Vec<(f64, DensityMatrix)> = p.iter().map(|&w| (w, random_state(2, 2, &mut rng).density())).collect();
        prop_assert!(von_neumann_entropy(&DensityMatrix::mixture(&random).unwrap()) <= h + 1e-8);
        let ortho: Vec<(f64, DensityMatrix)> =
            p.iter().enumerate().map(|(i, &w)| (w, StateVector::basis(2, 2, i).unwrap().density())).collect();
        prop_assert!((von_neumann_entropy(&DensityMatrix::mixture(&ortho).unwrap()) - h).abs() < 1e-8);
    }

    #[test]
    fn schmidt_weights_are_a_distribution(seed in any::<u64>(), da in 2usize..=4, db in 2usize..=4) {
        let mut rng = RngSeed(seed).rng();
        let amps: Vec<_> = random_state(da * db, 1, &mut rng).amplitudes().to_vec();
        let psi = StateVector::new(da * db, 1, amps).unwrap();
        let s = schmidt(&psi, da, db).unwrap();
        prop_assert!((s.weights.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        prop_assert!(s.rank <= da.min(db));
        for (i, u) in s.left_basis.iter().enumerate() {
            for (j, v) in s.left_basis.iter().enumerate() {
                let ip: qitk::state::C64 = u.iter().zip(v).map(|(x, y)| x.conj() * y).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((ip.norm() - want).abs() < 1e-10);
            }
        }
        prop_assert!(locc_convertible(&psi, &psi, da, db).unwrap());
    }

    #[test]
    fn majorization_is_a_partial_order(seed in any::<u64>()) {
        let mut rng = RngSeed(seed).rng();
        let mut vec = || {
            let raw: Vec<f64> = (0..4).map(|_| rng.random::<f64>()).collect();
            let s: f64 = raw.iter().sum();
            raw.into_iter().map(|x| x / s).collect::<Vec<f64>>()
        };
        let (x, y, z) = (vec(), vec(), vec());
        prop_assert!(majorizes(&x, &x));
        if majorizes(&x, &y) && majorizes(&y, &x) {
            let mut a = x.clone();
            let mut b = y.clone();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            prop_assert!(a.iter().zip(&b).all(|(p, q)| (p - q).abs() < 1e-9));
        }
        if majorizes(&x, &y) && majorizes(&y, &z) {
            prop_assert!(majorizes(&x, &z));
        }
    }

    #[test]
    fn werner_weights(f in 0.0f64..=1.0) {
        let w = werner(f).unwrap();
        let s = singlet();
        prop_assert!((w.rho.fidelity_to_pure(&s).unwrap() - f).abs() < 1e-12);
        for kind in [qitk::qinfo::BellKind::PhiPlus, qitk::qinfo::BellKind::PhiMinus, qitk::qinfo::BellKind::PsiPlus] {
            let b = qitk::qinfo::bell(kind);
            prop_assert!((w.rho.fidelity_to_pure(&b).unwrap() - (1.0 - f) / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn distillation_map_is_increasing(f in 0.5f64..0.999) {
        prop_assert!(bbpssw_map(f + 1e-3) > bbpssw_map(f));
    }

    #[test]
    fn teleport_resources(seed in any::<u64>(), th in 0.0f64..PI, ph in 0.0f64..(2.0 * PI)) {
        let psi = StateVector::bloch(th, ph);
        let t = teleport(&psi, &mut RngSeed(seed).rng()).unwrap();
        prop_assert_eq!(t.transcript.bits_sent(Party::Alice), 2);
        prop_assert!(t.transcript.is_causal());
        prop_assert!((t.bob_state.overlap(&psi).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bb84_sifting(seed in any::<u64>(), eve in any::<bool>()) {
        let n = 4000;
        let s = bb84_session(n, Bb84Options { eve, loss: 0.0 }, &mut RngSeed(seed).rng()).unwrap();
        prop_assert_eq!(s.sifted_key_alice.len(), s.sifted_key_bob.len());
        let kept = (0..n).filter(|&i| s.alice_bases[i] == s.bob_bases[i]).count();
        prop_assert_eq!(kept, s.sifted_len());
        let errors = s.sifted_key_alice.iter().zip(&s.sifted_key_bob).filter(|(a, b)| a != b).count();
        prop_assert!((s.qber - errors as f64 / s.sifted_len() as f64).abs() < 1e-15);
        prop_assert!((s.kept_fraction() - 0.5).abs() < 4.0 * (0.25 / n as f64).sqrt());
        prop_assert!(s.transcript.is_causal());
    }

    #[test]
    fn rsa_round_trip(i in 0usize..4, j in 0usize..4, m in 2u64..1000) {
        let primes = [101u64, 103, 107, 109];
        prop_assume!(i != j);
        let (p1, p2) = (primes[i], primes[j]);
        let phi = (p1 - 1) * (p2 - 1);
        let c = (3..phi).step_by(2).find(|&c| gcd(c, phi) == 1).unwrap();
        let key = rsa_keygen(p1, p2, c).unwrap();
        prop_assert_eq!((key.c as u128 * key.d as u128 % key.phi as u128) as u64, 1);
        prop_assert_eq!(rsa_decrypt(rsa_encrypt(m, &key).unwrap(), &key).unwrap(), m);
    }

    #[test]
    fn syndrome_decoding_fixes_leaders(msg in 0u64..16, bit in 0usize..8) {
        let code = hamming_734();
        let table = coset_leader_table(&code).unwrap();
        let w = code.encode(msg).unwrap();
        let e = if bit == 7 { 0 } else { 1u64 << bit };
        let d = decode(&code, w ^ e, &table).unwrap();
        prop_assert_eq!(d.codeword, w);
        prop_assert_eq!(d.message, msg);
    }

    #[test]
    fn lower_bounds_stay_below_upper(q in 2u32..=9) {
        for row in bound_table(q, 41).unwrap() {
            let lower = [row.gilbert_varshamov, row.tvz.unwrap_or(0.0)];
            let upper = [row.plotkin, row.hamming, row.bassalygo_elias];
            for l in lower {
                for u in upper {
                    prop_assert!(l <= u + 1e-12, "delta {}: {} > {}", row.delta, l, u);
                }
            }
        }
    }

    #[test]
    fn product_operators_match_matrix_conjugation(k in 0usize..16, which in 0usize..4, spin in 1usize..=2, phi in -PI..PI) {
        let mut s = ProductOperatorState::zero(2).unwrap();
        s.coeffs[k] = 1.0;
        let p = match which {
            0 => NmrPulse::X { spin, phi },
            1 => NmrPulse::Y { spin, phi },
            2 => NmrPulse::Z { spin, phi },
            _ => NmrPulse::J { a: 1, b: 2, phi },
        };
        let u = p.propagator(2).unwrap().unwrap();
        prop_assert!(qitk::state::is_unitary(&u, 1e-12));
        let direct = &u * s.to_matrix() * dagger(&u);
        let want = ProductOperatorState::from_matrix(2, &direct).unwrap();
        prop_assert!(nmr_pulse(&p, &s).unwrap().distance(&want) < 1e-10);
    }

    #[test]
    fn adding_machine_adds(n1 in 1usize..=6, n2 in 1usize..=6) {
        let r = run(&adding_machine(), &unary_pair(n1, n2), 0, 1000).unwrap();
        prop_assert!(r.halted);
        prop_assert_eq!(r.tape.values().filter(|&&v| v == 1).count(), n1 + n2);
        let again = run(&adding_machine(), &unary_pair(n1, n2), 0, 1000).unwrap();
        prop_assert_eq!(r.tape, again.tape);
        prop_assert_eq!(r.steps, again.steps);
    }

    #[test]
    fn cli_is_byte_deterministic(seed in any::<u64>(), which in 0usize..4) {
        let s = seed.to_string();
        let args: Vec<&str> = match which {
            0 => vec!["shor", "--n", "21", "--seed", &s],
            1 => vec!["bb84", "--n", "500", "--eve", "--seed", &s],
            2 => vec!["grover", "--qubits", "5", "--seed", &s],
            _ => vec!["distill", "--pairs", "256", "--format", "csv", "--seed", &s],
        };
        let call = || run_cli(std::iter::once("qitk").chain(args.iter().copied()));
        prop_assert_eq!(call(), call());
    }
}

#[test]
fn qft_gate_counts_and_separability() {
    for k in 1..=8 {
        let c = qft_circuit(k, 2).unwrap();
        assert_eq!(c.count("H"), k);
        assert_eq!(c.count("CPH"), k * (k - 1) / 2);
        assert_eq!(c.count("SWAP"), k / 2);
    }
    for k in 2..=5 {
        let c = qft_circuit(k, 2).unwrap();
        for x in 0..1usize << k {
            let out = c.run(&StateVector::qubits(k, x).unwrap()).unwrap();
            for cut in 1..k {
                let (da, db) = (1 << (k - cut), 1 << cut);
                let flat = StateVector::new(da * db, 1, out.amplitudes().to_vec()).unwrap();
                assert_eq!(schmidt(&flat, da, db).unwrap().rank, 1, "K={k}, x={x}, cut={cut}");
            }
        }
    }
}

#[test]
fn linear_codes_are_consistent() {
    for code in [hamming_734(), hamming_734().dual(), repetition_code(5).unwrap()] {
        for g in code.generator() {
            for h in code.parity_check() {
                assert_eq!((g & h).count_ones() % 2, 0);
            }
            assert_eq!(code.syndrome(*g), 0);
        }
        let words = code.codewords().unwrap();
        let min = words.iter().filter(|&&w| w != 0).map(|w| w.count_ones() as usize).min().unwrap();
        assert_eq!(code.min_distance().unwrap(), min);
        let table = coset_leader_table(&code).unwrap();
        for s in 0..1u64 << (code.n() - code.k()) {
            let leader = table.leader(s).expect("every syndrome has a leader");
            let best = (0..1u64 << code.n()).filter(|&e| code.syndrome(e) == s).map(|e| e.count_ones()).min();
            assert_eq!(Some(leader.count_ones()), best);
        }
    }
}

#[test]
fn dense_coding_resources() {
    for m in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let (out, t) = dense_coding(m).unwrap();
        assert_eq!(out, m);
        assert_eq!(t.bits_sent(Party::Alice), 0);
        assert!(t.is_causal());
    }
}

#[test]
fn beaver_sizes_and_replay() {
    assert_eq!(machine_count(1), 64);
    assert_eq!(machine_count(2), 20736);
    assert_eq!(machine_count(3), 16_777_216);
    let tm = three_state_beaver();
    let a = run(&tm, &BTreeMap::new(), 0, 1000).unwrap();
    let b = run(&tm, &BTreeMap::new(), 0, 1000).unwrap();
    assert_eq!((a.steps, a.ones_written), (13, 6));
    assert_eq!(a.tape, b.tape);
    let capped = run(&tm, &BTreeMap::new(), 0, 5).unwrap();
    assert!(!capped.halted && capped.steps <= 5);
}

#[test]
fn shor_histogram_matches_distribution() {
    use qitk::algorithms::{statevector_distribution, QSampler, ShorContext};
    for (n, a) in [(15u64, 7u64), (21, 2)] {
        let ctx = ShorContext::new(n, a).unwrap();
        let probs = statevector_distribution(&ctx).unwrap();
        let sampler = QSampler::new(&ctx, ShorBackend::Statevector).unwrap();
        let mut rng = RngSeed(n).rng();
        let shots = 10_000usize;
        let mut hist = vec![0usize; probs.len()];
        for _ in 0..shots {
            hist[sampler.sample(&mut rng) as usize] += 1;
        }
        let r = (1..n).find(|&r| qitk::algorithms::mod_exp(a, r, n) == 1).unwrap();
        for (q, &k) in hist.iter().enumerate() {
            let p = probs[q];
            assert!((p - shor_prob_q(q as u64, r, ctx.q)).abs() < 1e-10);
            let sd = (shots as f64 * p * (1.0 - p)).sqrt().max(1.0);
            assert!((k as f64 - shots as f64 * p).abs() <= 4.0 * sd, "N={n}, q={q}: {k}");
        }
    }
}

#[test]
fn born_frequencies_over_many_samples() {
    let mut rng = RngSeed(99).rng();
    let psi = random_state(2, 3, &mut rng);
    let probs = psi.probabilities();
    let shots = 100_000usize;
    let mut counts = [0usize; 8];
    for _ in 0..shots {
        counts[psi.measure(&[2, 1, 0], &mut rng).unwrap().value()] += 1;
    }
    for k in 0..8 {
        let p = probs[k];
        let sd = (shots as f64 * p * (1.0 - p)).sqrt();
        assert!((counts[k] as f64 - shots as f64 * p).abs() <= 4.0 * sd.max(1.0));
    }
}

#[test]
fn phase_alignment_ignores_global_phase() {
    let u = random_unitary(4, &mut RngSeed(5).rng());
    let v = &u * qitk::state::cis(1.234);
    assert!(phase_aligned_diff(&u, &v) < 1e-12);
}
