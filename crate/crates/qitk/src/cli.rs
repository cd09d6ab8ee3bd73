//! Command-line experiment runner. Every subcommand emits one artifact:
//! a JSON record `{algorithm, inputs, queries, samples, result}` or, where
//! a table makes sense, CSV.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::algorithms::{
    deutsch_jozsa, factor, grover_exact_m, grover_optimal_m, grover_search, reduced_success, simon,
    BooleanOracle, FactorOptions, GroverParams, QSampler, ShorBackend, ShorContext,
};
use crate::codes::{
    bound_table, bounds_csv, coset_leader_table, decode, format_word, hamming_734, parse_word, steane_code,
    steane_correct, PauliString,
};
use crate::error::{QError, Result};
use crate::gates::{controlled_u_cost, controlled, dft_matrix, qft_circuit, synthesize_controlled_u};
use crate::hardware::{
    cz_cnot, cz_cphase, kane_cnot_schedule, kane_hyperfine_crossover, kane_omega_j, kane_schedule_csv,
    kane_sector, nmr_bell_sequence, nmr_cnot_sequence, nmr_prepare_pseudo_pure, rabi_trace_csv,
    spin_flip_prob, KaneParams, RabiField,
};
use crate::protocols::{bb84_session, bbm92_session, dense_coding, rsa_break, rsa_decrypt, rsa_encrypt, rsa_keygen, teleport, Bb84Options, Party};
use crate::qinfo::{bbpssw_round, distill_trajectory, DistillMode, DistillRow};
use crate::state::{cis, max_abs_diff, phase_aligned_diff, random_unitary, RngSeed, StateVector};
use crate::turing::{adding_machine, busy_beaver_search, example_machine, run, three_state_beaver, unary_pair};

/// Optional directory that relative `--out` paths are resolved against.
pub const OUT_DIR_ENV: &str = "QITK_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "qitk", version, about = "Desk-scale quantum information experiments")]
struct Cli {
    /// Seed for every random choice in the run.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the artifact here as well as to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Shor factoring: order finding by QFT readout and continued fractions.
    Shor(ShorArgs),
    /// Grover search with a single marked item.
    Grover(GroverArgs),
    /// Simon's hidden-period problem.
    Simon(SimonArgs),
    /// Deutsch-Jozsa: constant or balanced in one query.
    Dj(DjArgs),
    /// Teleportation of one qubit through a shared Bell pair.
    Teleport(TeleportArgs),
    /// Dense coding of two classical bits in one qubit.
    Dense(DenseArgs),
    /// BB84 key distribution, optionally with an intercept-resend eavesdropper.
    Bb84(Bb84Args),
    /// Entanglement-based key distribution on singlet pairs.
    Bbm92(Bbm92Args),
    /// BBPSSW purification of Werner pairs.
    Distill(DistillArgs),
    /// Steane seven-qubit code: syndrome and recovery of a Pauli error.
    Steane(SteaneArgs),
    /// Syndrome decoding with the [7,4] Hamming code.
    Hamming(HammingArgs),
    /// Asymptotic rate bounds for q-ary codes.
    Bounds(BoundsArgs),
    /// Quantum Fourier transform circuit against the DFT matrix.
    Qft(QftArgs),
    /// Multiply-controlled unitary built from one-qubit gates and CNOTs.
    Synth(SynthArgs),
    /// Rabi oscillations of a driven spin.
    Rabi(RabiArgs),
    /// Cirac-Zoller controlled sign and CNOT in an ion trap.
    Iontrap(IontrapArgs),
    /// NMR pulse sequences in the product-operator formalism.
    Nmr(NmrArgs),
    /// Kane donor qubits: exchange splitting and CNOT schedule levels.
    Kane(KaneArgs),
    /// Run a Turing machine fixture.
    Tm(TmArgs),
    /// Busy-beaver search over all S-state two-symbol machines.
    Beaver(BeaverArgs),
    /// RSA key generation, encryption and a break by factoring.
    Rsa(RsaArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum BackendArg {
    Auto,
    Statevector,
    Analytic,
}

#[derive(Args, Debug)]
struct ShorArgs {
    #[arg(long)]
    n: u64,
    /// Fixed base; random bases otherwise.
    #[arg(long)]
    a: Option<u64>,
    #[arg(long, value_enum, default_value_t = BackendArg::Auto)]
    backend: BackendArg,
    /// Extra readouts for a histogram (needs `--a`).
    #[arg(long, default_value_t = 0)]
    shots: usize,
    #[arg(long, default_value_t = 20)]
    budget: usize,
}

#[derive(Args, Debug)]
struct GroverArgs {
    #[arg(long)]
    qubits: usize,
    #[arg(long, default_value_t = 0)]
    marked: u64,
    /// Defaults to the optimal count for the chosen phase.
    #[arg(long)]
    iterations: Option<usize>,
    /// Phase of both `beta` and `delta`.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    phi: f64,
    /// Separate phase for `beta`; gives the unequal family.
    #[arg(long, allow_hyphen_values = true)]
    beta_phase: Option<f64>,
}

#[derive(Args, Debug)]
struct SimonArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    period: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DjKind {
    Constant,
    Balanced,
}

#[derive(Args, Debug)]
struct DjArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum)]
    kind: DjKind,
}

#[derive(Args, Debug)]
struct TeleportArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    phi: f64,
}

#[derive(Args, Debug)]
struct DenseArgs {
    /// Two bits, e.g. `10`.
    #[arg(long)]
    bits: String,
}

#[derive(Args, Debug)]
struct Bb84Args {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    eve: bool,
    #[arg(long, default_value_t = 0.0)]
    loss: f64,
    /// Sifted bits compared in the open.
    #[arg(long, default_value_t = 72)]
    check: usize,
}

#[derive(Args, Debug)]
struct Bbm92Args {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 72)]
    check: usize,
}

#[derive(Args, Debug)]
struct DistillArgs {
    #[arg(long, default_value_t = 0.75)]
    f0: f64,
    #[arg(long, default_value_t = 1 << 16)]
    pairs: u64,
    #[arg(long, default_value_t = 8)]
    rounds: usize,
}

#[derive(Args, Debug)]
struct SteaneArgs {
    /// Pauli error such as `X3`, `Z5` or `Y1`.
    #[arg(long)]
    error: String,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    phi: f64,
}

#[derive(Args, Debug)]
struct HammingArgs {
    /// Received seven-bit word.
    #[arg(long)]
    word: String,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long, default_value_t = 2)]
    q: u32,
    #[arg(long, default_value_t = 21)]
    points: usize,
}

#[derive(Args, Debug)]
struct QftArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    d: usize,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long)]
    controls: usize,
}

#[derive(Args, Debug)]
struct RabiArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    omega0: f64,
    #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
    omega1: f64,
    /// Drive frequency; resonance by default.
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<f64>,
    #[arg(long, default_value_t = 100.0)]
    t_max: f64,
    #[arg(long, default_value_t = 101)]
    points: usize,
}

#[derive(Args, Debug)]
struct IontrapArgs {
    #[arg(long, default_value_t = 2)]
    ions: usize,
    #[arg(long, default_value_t = 0)]
    control: usize,
    #[arg(long, default_value_t = 1)]
    target: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum NmrSeq {
    PseudoPure,
    Bell,
    Cnot,
}

#[derive(Args, Debug)]
struct NmrArgs {
    #[arg(long, value_enum, default_value_t = NmrSeq::PseudoPure)]
    sequence: NmrSeq,
}

#[derive(Args, Debug)]
struct KaneArgs {
    /// Field in tesla.
    #[arg(long, default_value_t = 2.0)]
    b: f64,
    /// Exchange `J/h` in GHz.
    #[arg(long, default_value_t = 30.0)]
    j_ghz: f64,
    /// Schedule samples per stage for the CSV level table.
    #[arg(long, default_value_t = 20)]
    per_stage: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Fixture {
    Example,
    Adder,
    Beaver3,
}

#[derive(Args, Debug)]
struct TmArgs {
    #[arg(long, value_enum)]
    machine: Fixture,
    #[arg(long, default_value_t = 2)]
    n1: usize,
    #[arg(long, default_value_t = 2)]
    n2: usize,
    #[arg(long, default_value_t = 10_000)]
    max_steps: u64,
}

#[derive(Args, Debug)]
struct BeaverArgs {
    #[arg(long)]
    states: usize,
    /// Allow the three-state search.
    #[arg(long)]
    long: bool,
    #[arg(long)]
    cap: Option<u64>,
}

#[derive(Args, Debug)]
struct RsaArgs {
    #[arg(long)]
    p1: u64,
    #[arg(long)]
    p2: u64,
    /// Public exponent.
    #[arg(long)]
    c: u64,
    #[arg(long, default_value_t = 42)]
    message: u64,
}

/// Exit code and emitted artifact of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    /// 0 on success, 1 on a domain error, 2 on a usage error.
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Artifact {
    Json(Value),
    Csv(String),
}

fn record(algorithm: &str, inputs: Value, queries: Option<u64>, samples: Option<Value>, result: Value) -> Value {
    json!({
        "algorithm": algorithm,
        "inputs": inputs,
        "queries": queries,
        "samples": samples,
        "result": result,
    })
}

fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    serde_json::to_value(x).map_err(|e| QError::InvalidState(e.to_string()))
}

fn csv_rows<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| QError::InvalidState(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| QError::InvalidState(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

/// Parse `argv` (program name first), run, and write the artifact to
/// `--out` when given.
pub fn run_cli<I, S>(argv: I) -> CliOutput
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                CliOutput { code, stdout: text, stderr: String::new() }
            } else {
                CliOutput { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let usage = |msg: String| CliOutput { code: 2, stdout: String::new(), stderr: format!("error: {msg}\n") };
    let artifact = match dispatch(&cli) {
        Ok(a) => a,
        Err(QError::InvalidArgument(m)) if m.starts_with("--") => return usage(m),
        Err(e) => return CliOutput { code: 1, stdout: String::new(), stderr: format!("error: {e}\n") },
    };
    let text = match (artifact, cli.format) {
        (Artifact::Json(v), Format::Json) => {
            let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
            s.push('\n');
            s
        }
        (Artifact::Csv(s), Format::Csv) => s,
        (Artifact::Json(_), Format::Csv) => {
            return usage("--format csv is not available for this subcommand".into());
        }
        (Artifact::Csv(_), Format::Json) => unreachable!("csv only on request"),
    };
    if let Some(path) = &cli.out {
        let path = match std::env::var_os(OUT_DIR_ENV) {
            Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
            _ => path.clone(),
        };
        if let Err(e) = std::fs::write(&path, &text) {
            return CliOutput { code: 1, stdout: String::new(), stderr: format!("error: {}: {e}\n", path.display()) };
        }
    }
    CliOutput { code: 0, stdout: text, stderr: String::new() }
}

fn dispatch(cli: &Cli) -> Result<Artifact> {
    let seed = RngSeed(cli.seed);
    let csv = cli.format == Format::Csv;
    match &cli.cmd {
        Cmd::Shor(a) => shor_cmd(a, seed, csv),
        Cmd::Grover(a) => grover_cmd(a, seed, csv),
        Cmd::Simon(a) => {
            let p = a.period;
            if a.n == 0 || a.n > 16 || p == 0 || p >> a.n != 0 {
                return Err(QError::InvalidArgument("--period must be a nonzero n-bit value".into()));
            }
            let f = BooleanOracle::from_fn(a.n, a.n, |x| x.min(x ^ p))?;
            let r = simon(&f, &mut seed.rng())?;
            let v = record(
                "simon",
                json!({"n": a.n, "period": p}),
                Some(r.queries as u64),
                Some(to_value(&r.samples)?),
                json!({"period": r.period, "correct": r.period == p}),
            );
            Ok(Artifact::Json(v))
        }
        Cmd::Dj(a) => {
            let n = a.n;
            let f = match a.kind {
                DjKind::Constant => BooleanOracle::constant(n, 1),
                DjKind::Balanced => {
                    // parity against a random nonzero mask is balanced
                    let mask = 1 + rand::Rng::random_range(&mut seed.split(1).rng(), 0..(1u64 << n) - 1);
                    BooleanOracle::from_fn(n, 1, |x| (x & mask).count_ones() as u64 & 1)?
                }
            };
            let r = deutsch_jozsa(&f, &mut seed.rng())?;
            let v = record(
                "dj",
                json!({"n": n, "kind": format!("{:?}", a.kind).to_lowercase()}),
                Some(r.queries as u64),
                Some(json!([r.outcome])),
                to_value(&r)?,
            );
            Ok(Artifact::Json(v))
        }
        Cmd::Teleport(a) => {
            let psi = StateVector::bloch(a.theta, a.phi);
            let t = teleport(&psi, &mut seed.rng())?;
            let fidelity = t.bob_state.overlap(&psi)?.powi(2);
            let v = record(
                "teleport",
                json!({"theta": a.theta, "phi": a.phi}),
                None,
                Some(json!([t.bits.0, t.bits.1])),
                json!({
                    "bits": [t.bits.0, t.bits.1],
                    "branch_probability": t.probability,
                    "fidelity": fidelity,
                    "classical_bits_sent": t.transcript.bits_sent(Party::Alice),
                }),
            );
            Ok(Artifact::Json(v))
        }
        Cmd::Dense(a) => {
            let bits: Vec<u8> = a.bits.bytes().map(|b| b.wrapping_sub(b'0')).collect();
            if bits.len() != 2 || bits.iter().any(|&b| b > 1) {
                return Err(QError::InvalidArgument("--bits must be two binary digits".into()));
            }
            let (decoded, tr) = dense_coding((bits[0], bits[1]))?;
            let v = record(
                "dense",
                json!({"bits": a.bits}),
                None,
                None,
                json!({
                    "decoded": format!("{}{}", decoded.0, decoded.1),
                    "qubits_sent": tr.bits_sent(Party::Alice),
                    "correct": decoded == (bits[0], bits[1]),
                }),
            );
            Ok(Artifact::Json(v))
        }
        Cmd::Bb84(a) => {
            let s = bb84_session(a.n, Bb84Options { eve: a.eve, loss: a.loss }, &mut seed.rng())?;
            let check = a.check.min(s.sifted_len());
            let v = record(
                "bb84",
                json!({"n": a.n, "eve": a.eve, "loss": a.loss, "check": a.check}),
                None,
                None,
                json!({
                    "summary": to_value(&s.summary(check))?,
                    "qber": s.qber,
                    "keys_agree": s.sifted_key_alice == s.sifted_key_bob,
                    "check_exposes_eve": s.check_sample(0, check),
                }),
            );
            Ok(Artifact::Json(v))
        }
        Cmd::Bbm92(a) => {
            let s = bbm92_session(a.n, &mut seed.rng())?;
            let check = a.check.min(s.sifted_len());
            let v = record(
                "bbm92",
                json!({"n": a.n, "check": a.check}),
                None,
                None,
                json!({
                    "summary": to_value(&s.summary(check))?,
                    "qber": s.qber,
                    "keys_agree": s.sifted_key_alice == s.sifted_key_bob,
                }),
            );
            Ok(Artifact::Json(v))
        }
        Cmd::Distill(a) => {
            let rows: Vec<DistillRow> = distill_trajectory(a.f0, a.pairs, a.rounds, &mut seed.rng())?;
            if csv {
                return Ok(Artifact::Csv(csv_rows(&rows)?));
            }
            let sim = bbpssw_round(a.f0, DistillMode::Simulate)?;
            let exact = bbpssw_round(a.f0, DistillMode::Analytic)?;
            let v = record(
                "distill",
                json!({"f0": a.f0, "pairs": a.pairs, "rounds": a.rounds}),
                None,
                None,
                json!({
                    "rows": to_value(&rows)?,
                    "first_round_simulated": to_value(&sim)?,
                    "first_round_analytic": to_value(&exact)?,
                }),
            );
            Ok(Artifact::Json(v))
        }
        Cmd::Steane(a) => {
            let err: PauliString = a.error.parse()?;
            let code = steane_code();
            let logical = StateVector::bloch(a.theta, a.phi);
            let encoded = code.encode(logical.amplitudes())?;
            let fix = steane_correct(&encoded, &err)?;
            let fidelity = fix.state.overlap(&encoded)?.powi(2);
            let v = record(
                "steane",
                json!({"error": a.error, "theta": a.theta, "phi": a.phi}),
                None,
                None,
                json!({"correction": to_value(&fix)?, "fidelity": fidelity}),
            );
            Ok(Artifact::Json(v))
        }
        Cmd::Hamming(a) => {
            let (u, n) = parse_word(&a.word)?;
            let code = hamming_734();
            if n != code.n() {
                return Err(QError::InvalidArgument("--word must have 7 bits".into()));
            }
            let d = decode(&code, u, &coset_leader_table(&code)?)?;
            let v = record(
                "hamming",
                json!({"word": a.word}),
                None,
                None,
                json!({
                    "syndrome": format_word(d.syndrome, code.n() - code.k()),
                    "error": format_word(d.error, n),
                    "codeword": format_word(d.codeword, n),
                    "message": format_word(d.message, code.k()),
                }),
            );
            Ok(Artifact::Json(v))
        }
        Cmd::Bounds(a) => {
            let rows = bound_table(a.q, a.points)?;
            if csv {
                return Ok(Artifact::Csv(bounds_csv(&rows)?));
            }
            let v = record("bounds", json!({"q": a.q, "points": a.points}), None, None, to_value(&rows)?);
            Ok(Artifact::Json(v))
        }
        Cmd::Qft(a) => {
            let c = qft_circuit(a.k, a.d)?;
            let q = a.d.checked_pow(a.k as u32).filter(|&q| q <= 1 << 12).ok_or(QError::CapExceeded {
                dim: usize::MAX,
                cap: 1 << 12,
            })?;
            let err = max_abs_diff(&c.unitary()?, &dft_matrix(q));
            let v = record(
                "qft",
                json!({"k": a.k, "d": a.d}),
                None,
                None,
                json!({
                    "gate_counts": to_value(&c.gate_counts())?,
                    "max_error_vs_dft": err,
                    "circuit": c.to_json()?,
                }),
            );
            Ok(Artifact::Json(v))
        }
        Cmd::Synth(a) => {
            let u = random_unitary(2, &mut seed.rng());
            let c = synthesize_controlled_u(&u, a.controls)?;
            let err = phase_aligned_diff(&c.unitary()?, &controlled(&u, a.controls));
            let v = record(
                "synth",
                json!({"controls": a.controls}),
                None,
                None,
                json!({
                    "gates": c.len(),
                    "predicted_gates": controlled_u_cost(a.controls),
                    "gate_counts": to_value(&c.gate_counts())?,
                    "max_error_up_to_phase": err,
                }),
            );
            Ok(Artifact::Json(v))
        }
        Cmd::Rabi(a) => {
            let f = RabiField::new(a.omega0, a.omega1, a.omega.unwrap_or(a.omega0));
            if csv {
                return Ok(Artifact::Csv(rabi_trace_csv(&f, a.t_max, a.points)));
            }
            let pi_time = std::f64::consts::PI / f.rabi_frequency();
            let v = record(
                "rabi",
                to_value(&f)?,
                None,
                None,
                json!({
                    "rabi_frequency": f.rabi_frequency(),
                    "max_flip_probability": (f.omega1 / f.rabi_frequency()).powi(2),
                    "pi_pulse_time": pi_time,
                    "flip_probability_at_pi_time": spin_flip_prob(&f, pi_time),
                }),
            );
            Ok(Artifact::Json(v))
        }
        Cmd::Iontrap(a) => {
            let cz = cz_cphase(a.control, a.target, a.ions)?;
            let cx = cz_cnot(a.control, a.target, a.ions)?;
            let zgate = crate::gates::controlled(&crate::gates::pauli_z(), 1);
            let xgate = crate::gates::controlled(&crate::gates::pauli_x(), 1);
            let v = record(
                "iontrap",
                json!({"ions": a.ions, "control": a.control, "target": a.target}),
                None,
                None,
                json!({
                    "cphase_error": phase_aligned_diff(&cz.logical, &zgate),
                    "cphase_leak": cz.leak,
                    "cnot_error": phase_aligned_diff(&cx.logical, &xgate),
                    "cnot_leak": cx.leak,
                }),
            );
            Ok(Artifact::Json(v))
        }
        Cmd::Nmr(a) => {
            let trace = match a.sequence {
                NmrSeq::PseudoPure => Some(nmr_prepare_pseudo_pure()?),
                NmrSeq::Bell => Some(nmr_bell_sequence()?),
                NmrSeq::Cnot => None,
            };
            match (trace, csv) {
                (Some(t), true) => Ok(Artifact::Csv(t.to_csv())),
                (Some(t), false) => {
                    let steps: Vec<Value> = t
                        .steps
                        .iter()
                        .map(|s| {
                            let terms: BTreeMap<String, f64> = s.state.terms().into_iter().collect();
                            json!({"pulse": s.pulse, "terms": terms})
                        })
                        .collect();
                    let seq = format!("{:?}", a.sequence).to_lowercase();
                    Ok(Artifact::Json(record("nmr", json!({"sequence": seq}), None, None, json!({"steps": steps}))))
                }
                (None, _) => {
                    let u = nmr_cnot_sequence()?;
                    let xgate = crate::gates::controlled(&crate::gates::pauli_x(), 1);
                    let v = record(
                        "nmr",
                        json!({"sequence": "cnot"}),
                        None,
                        None,
                        json!({"error_up_to_phase": phase_aligned_diff(&u, &xgate)}),
                    );
                    if csv {
                        return Err(QError::InvalidArgument("--format csv has no table for the cnot sequence".into()));
                    }
                    Ok(Artifact::Json(v))
                }
            }
        }
        Cmd::Kane(a) => {
            let p = KaneParams::phosphorus(a.b).with_j(a.j_ghz * 1e9);
            if csv {
                let rows = kane_cnot_schedule(&p, 0.2 * p.a1, p.j, a.per_stage);
                return Ok(Artifact::Csv(kane_schedule_csv(&rows)));
            }
            let sector = kane_sector(&p)?;
            let v = record(
                "kane",
                json!({"b_tesla": a.b, "j_ghz": a.j_ghz}),
                None,
                None,
                json!({
                    "nu_j_perturbative_hz": kane_omega_j(&p)?,
                    "nu_j_exact_hz": sector.omega_j(),
                    "sector": to_value(&sector)?,
                    "hyperfine_crossover_tesla": kane_hyperfine_crossover(&p),
                }),
            );
            Ok(Artifact::Json(v))
        }
        Cmd::Tm(a) => {
            let (tm, tape) = match a.machine {
                Fixture::Example => (example_machine(), BTreeMap::new()),
                Fixture::Adder => (adding_machine(), unary_pair(a.n1, a.n2)),
                Fixture::Beaver3 => (three_state_beaver(), BTreeMap::new()),
            };
            let r = run(&tm, &tape, 0, a.max_steps)?;
            let v = record(
                "tm",
                json!({"machine": format!("{:?}", a.machine).to_lowercase(), "n1": a.n1, "n2": a.n2}),
                None,
                None,
                json!({
                    "table": tm.to_string(),
                    "steps": r.steps,
                    "halted": r.halted,
                    "ones_written": r.ones_written,
                    "tape": r.tape_string(),
                }),
            );
            Ok(Artifact::Json(v))
        }
        Cmd::Beaver(a) => {
            let r = busy_beaver_search(a.states, a.cap, a.long)?;
            let v = record(
                "beaver",
                json!({"states": a.states, "cap": r.step_cap}),
                None,
                None,
                json!({
                    "sigma": r.sigma,
                    "sigma_prime": r.sigma_prime,
                    "machines": r.machines,
                    "halting": r.halting,
                    "timeouts": r.timeouts,
                    "proven_looping": r.proven_looping,
                    "sigma_witness": r.sigma_witness.to_string(),
                    "sigma_prime_witness": r.sigma_prime_witness.to_string(),
                }),
            );
            Ok(Artifact::Json(v))
        }
        Cmd::Rsa(a) => {
            let key = rsa_keygen(a.p1, a.p2, a.c)?;
            let cipher = rsa_encrypt(a.message, &key)?;
            let opts = FactorOptions { backend: Some(ShorBackend::Analytic), ..FactorOptions::default() };
            let br = rsa_break(key.n, key.c, &opts, &mut seed.rng())?;
            let stolen = crate::protocols::RsaKeyPair { d: br.d, ..key };
            let v = record(
                "rsa",
                json!({"p1": a.p1, "p2": a.p2, "c": a.c, "message": a.message}),
                Some(br.factoring.attempts.len() as u64),
                None,
                json!({
                    "key": to_value(&key)?,
                    "ciphertext": cipher,
                    "decrypted": rsa_decrypt(cipher, &key)?,
                    "broken": {"p1": br.p1, "p2": br.p2, "phi": br.phi, "d": br.d},
                    "decrypted_with_broken_key": rsa_decrypt(cipher, &stolen)?,
                }),
            );
            Ok(Artifact::Json(v))
        }
    }
}

fn shor_cmd(a: &ShorArgs, seed: RngSeed, csv: bool) -> Result<Artifact> {
    let backend = match a.backend {
        BackendArg::Auto => None,
        BackendArg::Statevector => Some(ShorBackend::Statevector),
        BackendArg::Analytic => Some(ShorBackend::Analytic),
    };
    if a.shots > 0 && a.a.is_none() {
        return Err(QError::InvalidArgument("--shots needs --a".into()));
    }
    let opts = FactorOptions { forced_a: a.a, budget: a.budget, backend };
    let report = factor(a.n, &opts, &mut seed.rng())?;
    let mut histogram = BTreeMap::new();
    if let Some(base) = a.a.filter(|_| a.shots > 0) {
        let ctx = ShorContext::new(a.n, base)?;
        let kind = backend.unwrap_or(if ctx.fits_statevector() { ShorBackend::Statevector } else { ShorBackend::Analytic });
        let sampler = QSampler::new(&ctx, kind)?;
        let mut rng = seed.split(1).rng();
        for _ in 0..a.shots {
            *histogram.entry(sampler.sample(&mut rng)).or_insert(0u64) += 1;
        }
    }
    if csv {
        if histogram.is_empty() {
            return Err(QError::InvalidArgument("--format csv needs --shots".into()));
        }
        let mut s = String::from("q,count\n");
        for (q, k) in &histogram {
            s.push_str(&format!("{q},{k}\n"));
        }
        return Ok(Artifact::Csv(s));
    }
    let last = report.attempts.last();
    let samples: Vec<u64> = report.attempts.iter().flat_map(|t| t.samples.iter().copied()).collect();
    let result = json!({
        "n": a.n,
        "a": last.map(|t| t.a),
        "r": last.and_then(|t| t.r),
        "outcome": last.map(|t| t.outcome),
        "factors": report.factors.map(|(p, q)| vec![p, q]),
        "attempts": to_value(&report.attempts)?,
        "histogram": histogram,
    });
    let inputs = json!({"n": a.n, "a": a.a, "backend": format!("{:?}", a.backend).to_lowercase(), "shots": a.shots, "budget": a.budget});
    Ok(Artifact::Json(record("shor", inputs, Some(samples.len() as u64), Some(to_value(&samples)?), result)))
}

fn grover_cmd(a: &GroverArgs, seed: RngSeed, csv: bool) -> Result<Artifact> {
    if a.qubits == 0 || a.qubits > 20 {
        return Err(QError::InvalidArgument("--qubits must lie in 1..=20".into()));
    }
    let n_items = 1u64 << a.qubits;
    let p = match a.beta_phase {
        Some(b) => GroverParams::new(cis(b), cis(a.phi))?,
        None => GroverParams::phase(a.phi),
    };
    let m = match a.iterations {
        Some(m) => m,
        None if a.beta_phase.is_none() && a.phi == 0.0 => grover_exact_m(n_items)? as usize,
        None if a.beta_phase.is_none() => grover_optimal_m(n_items, a.phi)? as usize,
        None => return Err(QError::InvalidArgument("--iterations is required with --beta-phase".into())),
    };
    if csv {
        #[derive(Serialize)]
        struct Row {
            m: usize,
            success_probability: f64,
        }
        let rows: Vec<Row> = (0..=m)
            .map(|k| reduced_success(n_items, &p, k).map(|s| Row { m: k, success_probability: s }))
            .collect::<Result<_>>()?;
        return Ok(Artifact::Csv(csv_rows(&rows)?));
    }
    let r = grover_search(a.qubits, a.marked, &p, m, &mut seed.rng())?;
    let inputs = json!({"qubits": a.qubits, "marked": a.marked, "phi": a.phi, "beta_phase": a.beta_phase, "iterations": m});
    Ok(Artifact::Json(record("grover", inputs, Some(m as u64), Some(json!([r.outcome])), to_value(&r)?)))
}
