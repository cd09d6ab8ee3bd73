//! BB84 with an optional intercept-resend eavesdropper, and BBM92 on singlets.
//!
//! Polarisations are qubit states: H = |0>, V = |1>, D = (H + V)/sqrt 2,
//! A = (H - V)/sqrt 2. Basis 0 is rectilinear, basis 1 diagonal; the bit is
//! 0 for H or D and 1 for V or A.

use rand::Rng;
use serde::Serialize;

use super::{Party, ProtocolTranscript};
use crate::error::{QError, Result};
use crate::gates::hadamard;
use crate::qinfo::singlet;
use crate::state::StateVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bb84Options {
    pub eve: bool,
    /// Chance that a photon never reaches Bob's detector.
    pub loss: f64,
}

impl Default for Bb84Options {
    fn default() -> Self {
        Bb84Options { eve: false, loss: 0.0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QkdSession {
    pub n_photons: usize,
    pub alice_bits: Vec<u8>,
    pub alice_bases: Vec<u8>,
    pub bob_bases: Vec<u8>,
    /// Raw readouts; `None` for a lost photon.
    pub bob_outcomes: Vec<Option<u8>>,
    pub sifted_key_alice: Vec<u8>,
    pub sifted_key_bob: Vec<u8>,
    pub eve_enabled: bool,
    pub qber: f64,
    #[serde(skip)]
    pub transcript: ProtocolTranscript,
}

#[derive(Debug, Clone, Serialize)]
pub struct QkdSummary {
    pub n: usize,
    pub eve: bool,
    pub sifted_len: usize,
    pub qber: f64,
    pub detection_prob: f64,
}

impl QkdSession {
    pub fn sifted_len(&self) -> usize {
        self.sifted_key_alice.len()
    }

    pub fn kept_fraction(&self) -> f64 {
        self.sifted_len() as f64 / self.n_photons as f64
    }

    /// Compare the first `k` sifted bits in the open; true if any differ.
    pub fn check_sample(&self, start: usize, k: usize) -> bool {
        self.sifted_key_alice[start..start + k]
            .iter()
            .zip(&self.sifted_key_bob[start..start + k])
            .any(|(a, b)| a != b)
    }

    pub fn summary(&self, check_bits: usize) -> QkdSummary {
        QkdSummary {
            n: self.n_photons,
            eve: self.eve_enabled,
            sifted_len: self.sifted_len(),
            qber: self.qber,
            detection_prob: detection_probability(self.qber, check_bits),
        }
    }
}

/// Chance that `k` independently compared bits expose at least one error.
pub fn detection_probability(qber: f64, k: usize) -> f64 {
    1.0 - (1.0 - qber).powi(k as i32)
}

fn prepare(bit: u8, basis: u8) -> StateVector {
    let mut s = StateVector::qubits(1, bit as usize).expect("one qubit");
    if basis == 1 {
        s.apply_in_place(&hadamard(), &[0]).expect("one qubit");
    }
    s
}

fn measure_in<R: Rng + ?Sized>(s: &StateVector, basis: u8, rng: &mut R) -> u8 {
    let mut s = s.clone();
    if basis == 1 {
        s.apply_in_place(&hadamard(), &[0]).expect("one qubit");
    }
    s.measure(&[0], rng).expect("one qubit").value() as u8
}

fn bit<R: Rng + ?Sized>(rng: &mut R) -> u8 {
    rng.random_range(0..2)
}

fn sift(
    alice: &[u8],
    bob: &[Option<u8>],
    a_bases: &[u8],
    b_bases: &[u8],
    flip_bob: bool,
) -> (Vec<u8>, Vec<u8>, f64) {
    let mut ka = Vec::new();
    let mut kb = Vec::new();
    for i in 0..alice.len() {
        if let (true, Some(b)) = (a_bases[i] == b_bases[i], bob[i]) {
            ka.push(alice[i]);
            kb.push(if flip_bob { 1 - b } else { b });
        }
    }
    let errors = ka.iter().zip(&kb).filter(|(a, b)| a != b).count();
    let qber = if ka.is_empty() {
        0.0
    } else {
        errors as f64 / ka.len() as f64
    };
    (ka, kb, qber)
}

fn announce_bases(t: &mut ProtocolTranscript, a: &[u8], b: &[u8]) -> Result<()> {
    let bob_msg = t.send(Party::Bob, "announce bases", b.to_vec());
    t.receive(Party::Alice, "read Bob's bases", bob_msg)?;
    let matches: Vec<u8> = a.iter().zip(b).map(|(x, y)| (x == y) as u8).collect();
    let alice_msg = t.send(Party::Alice, "announce which bases match", matches);
    t.receive(Party::Bob, "read matches", alice_msg)?;
    Ok(())
}

pub fn bb84_session<R: Rng + ?Sized>(n: usize, opts: Bb84Options, rng: &mut R) -> Result<QkdSession> {
    if n == 0 {
        return Err(QError::InvalidArgument("need at least one photon".into()));
    }
    if !(0.0..1.0).contains(&opts.loss) {
        return Err(QError::InvalidArgument(format!("loss {} not in [0, 1)", opts.loss)));
    }
    let mut t = ProtocolTranscript::new();
    let alice_bits: Vec<u8> = (0..n).map(|_| bit(rng)).collect();
    let alice_bases: Vec<u8> = (0..n).map(|_| bit(rng)).collect();
    let bob_bases: Vec<u8> = (0..n).map(|_| bit(rng)).collect();
    t.local(Party::Alice, "prepare photons");
    if opts.eve {
        t.local(Party::Eve, "intercept and resend in random bases");
    }
    let mut bob_outcomes = Vec::with_capacity(n);
    for i in 0..n {
        let mut photon = prepare(alice_bits[i], alice_bases[i]);
        if opts.eve {
            let eb = bit(rng);
            let seen = measure_in(&photon, eb, rng);
            photon = prepare(seen, eb);
        }
        if opts.loss > 0.0 && rng.random::<f64>() < opts.loss {
            bob_outcomes.push(None);
        } else {
            bob_outcomes.push(Some(measure_in(&photon, bob_bases[i], rng)));
        }
    }
    t.local(Party::Bob, "measure in random bases");
    announce_bases(&mut t, &alice_bases, &bob_bases)?;
    let (ka, kb, qber) = sift(&alice_bits, &bob_outcomes, &alice_bases, &bob_bases, false);
    Ok(QkdSession {
        n_photons: n,
        alice_bits,
        alice_bases,
        bob_bases,
        bob_outcomes,
        sifted_key_alice: ka,
        sifted_key_bob: kb,
        eve_enabled: opts.eve,
        qber,
        transcript: t,
    })
}

/// Each party measures half of a singlet in a random basis; Bob inverts his
/// bits so that matching bases give identical keys.
pub fn bbm92_session<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<QkdSession> {
    if n == 0 {
        return Err(QError::InvalidArgument("need at least one pair".into()));
    }
    let mut t = ProtocolTranscript::new();
    t.local(Party::Alice, "share singlets with Bob");
    let h = hadamard();
    let pair = singlet();
    let mut alice_bits = Vec::with_capacity(n);
    let mut alice_bases = Vec::with_capacity(n);
    let mut bob_bases = Vec::with_capacity(n);
    let mut bob_outcomes = Vec::with_capacity(n);
    for _ in 0..n {
        let (ab, bb) = (bit(rng), bit(rng));
        let mut s = pair.clone();
        if ab == 1 {
            s.apply_in_place(&h, &[1])?;
        }
        if bb == 1 {
            s.apply_in_place(&h, &[0])?;
        }
        let rec = s.measure(&[1, 0], rng)?;
        alice_bits.push(rec.outcome[0] as u8);
        bob_outcomes.push(Some(rec.outcome[1] as u8));
        alice_bases.push(ab);
        bob_bases.push(bb);
    }
    t.local(Party::Alice, "measure in random bases");
    t.local(Party::Bob, "measure in random bases");
    announce_bases(&mut t, &alice_bases, &bob_bases)?;
    t.local(Party::Bob, "invert his outcomes");
    let (ka, kb, qber) = sift(&alice_bits, &bob_outcomes, &alice_bases, &bob_bases, true);
    Ok(QkdSession {
        n_photons: n,
        alice_bits,
        alice_bases,
        bob_bases,
        bob_outcomes,
        sifted_key_alice: ka,
        sifted_key_bob: kb,
        eve_enabled: false,
        qber,
        transcript: t,
    })
}
