//! Teleportation and superdense coding over a shared `Phi+` pair.

use rand::Rng;

use super::{Party, ProtocolTranscript};
use crate::error::{QError, Result};
use crate::gates::{controlled, hadamard, pauli_x, pauli_y, pauli_z};
use crate::qinfo::{bell, BellKind};
use crate::state::{identity, sample_index, Mat, StateVector};

#[derive(Debug, Clone)]
pub struct Teleported {
    pub bob_state: StateVector,
    /// Alice's two bits: `(m1, m2)` from her original qubit and her half of the pair.
    pub bits: (u8, u8),
    pub probability: f64,
    pub transcript: ProtocolTranscript,
}

fn correction(bits: (u8, u8)) -> (&'static str, Mat) {
    match bits {
        (0, 0) => ("I", identity(2)),
        (0, 1) => ("X", pauli_x()),
        (1, 0) => ("Z", pauli_z()),
        _ => ("Y", pauli_y()),
    }
}

/// Registers, most significant first: Alice's input, Alice's half, Bob's half.
fn entangle(psi: &StateVector) -> Result<StateVector> {
    if psi.local_dim() != 2 || psi.num_sites() != 1 {
        return Err(QError::Dimension("teleportation sends one qubit".into()));
    }
    let mut s = psi.tensor(&bell(BellKind::PhiPlus))?;
    s.apply_in_place(&controlled(&pauli_x(), 1), &[2, 1])?;
    s.apply_in_place(&hadamard(), &[2])?;
    Ok(s)
}

/// Teleport along the branch where Alice reads `bits`.
pub fn teleport_branch(psi: &StateVector, bits: (u8, u8)) -> Result<Teleported> {
    if bits.0 > 1 || bits.1 > 1 {
        return Err(QError::InvalidArgument("outcome bits must be 0 or 1".into()));
    }
    let s = entangle(psi)?;
    finish(&s, bits)
}

pub fn teleport<R: Rng + ?Sized>(psi: &StateVector, rng: &mut R) -> Result<Teleported> {
    let s = entangle(psi)?;
    let k = sample_index(&s.marginal(&[2, 1])?, rng);
    finish(&s, ((k >> 1) as u8, (k & 1) as u8))
}

fn finish(s: &StateVector, bits: (u8, u8)) -> Result<Teleported> {
    let mut t = ProtocolTranscript::new();
    t.local(Party::Alice, "share Phi+ with Bob");
    t.local(Party::Alice, "CNOT input -> half, H on input");
    let (p, post) = s.project(&[2, 1], &[bits.0 as usize, bits.1 as usize])?;
    if p == 0.0 {
        return Err(QError::InvalidArgument(format!("branch {bits:?} has probability zero")));
    }
    t.measure(Party::Alice, "measure both qubits", vec![bits.0 as usize, bits.1 as usize]);
    let id = t.send(Party::Alice, "announce outcomes", vec![bits.0, bits.1]);
    let got = t.receive(Party::Bob, "read outcomes", id)?;
    let (name, u) = correction((got[0], got[1]));
    let bob = post.discard_sites(&[2, 1])?.apply_unitary(&u, &[0])?;
    t.local(Party::Bob, &format!("apply {name}"));
    Ok(Teleported {
        bob_state: bob,
        bits,
        probability: p,
        transcript: t,
    })
}

/// Alice's local gate for the message `(x, z)`: `x` flips the parity, `z` the relative sign.
pub fn dense_encode(message: (u8, u8)) -> Result<(&'static str, Mat)> {
    match message {
        (0, 0) => Ok(("I", identity(2))),
        (0, 1) => Ok(("Z", pauli_z())),
        (1, 0) => Ok(("X", pauli_x())),
        (1, 1) => Ok(("Y", pauli_y())),
        _ => Err(QError::InvalidArgument("message bits must be 0 or 1".into())),
    }
}

/// CNOT then H on Alice's qubit; the pair must then be in a definite basis state.
pub fn dense_decode(state: &StateVector) -> Result<(u8, u8)> {
    if state.local_dim() != 2 || state.num_sites() != 2 {
        return Err(QError::Dimension("dense decoding acts on a qubit pair".into()));
    }
    let mut s = state.clone();
    s.apply_in_place(&controlled(&pauli_x(), 1), &[1, 0])?;
    s.apply_in_place(&hadamard(), &[1])?;
    let probs = s.probabilities();
    let k = (0..4)
        .find(|&k| probs[k] > 1.0 - 1e-9)
        .ok_or_else(|| QError::InvalidState("pair is not a Bell state".into()))?;
    // target qubit carries x, the control carries z
    Ok(((k & 1) as u8, (k >> 1) as u8))
}

/// Full round: encode on Alice's half of `Phi+`, ship the qubit, decode.
pub fn dense_coding(message: (u8, u8)) -> Result<((u8, u8), ProtocolTranscript)> {
    let mut t = ProtocolTranscript::new();
    t.local(Party::Alice, "share Phi+ with Bob");
    let (name, u) = dense_encode(message)?;
    let s = bell(BellKind::PhiPlus).apply_unitary(&u, &[1])?;
    t.local(Party::Alice, &format!("apply {name}"));
    t.local(Party::Alice, "send her qubit to Bob");
    let out = dense_decode(&s)?;
    t.measure(Party::Bob, "CNOT, H, measure", vec![out.0 as usize, out.1 as usize]);
    Ok((out, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{RngSeed, C64};
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn every_branch_recovers_the_input() {
        let mut rng = RngSeed(21).rng();
        let plus = StateVector::new(2, 1, vec![C64::new(FRAC_1_SQRT_2, 0.0); 2]).unwrap();
        let mut inputs = vec![StateVector::zero_qubits(1), plus];
        for _ in 0..10 {
            let th = rng.random::<f64>() * std::f64::consts::PI;
            let ph = rng.random::<f64>() * 2.0 * std::f64::consts::PI;
            inputs.push(StateVector::bloch(th, ph));
        }
        for psi in &inputs {
            let mut total = 0.0;
            for bits in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let out = teleport_branch(psi, bits).unwrap();
                assert!((out.bob_state.overlap(psi).unwrap() - 1.0).abs() < 1e-10);
                assert!((out.probability - 0.25).abs() < 1e-12);
                assert_eq!(out.transcript.bits_sent(Party::Alice), 2);
                assert!(out.transcript.is_causal());
                total += out.probability;
            }
            assert!((total - 1.0).abs() < 1e-12);
            let out = teleport(psi, &mut rng).unwrap();
            assert!((out.bob_state.overlap(psi).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn dense_coding_round_trips() {
        for m in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let (out, t) = dense_coding(m).unwrap();
            assert_eq!(out, m);
            assert_eq!(t.bits_sent(Party::Alice), 0);
        }
        // X on Alice's half gives (|10> + |01>)/sqrt 2
        let s = bell(BellKind::PhiPlus).apply_unitary(&pauli_x(), &[1]).unwrap();
        assert!((s.overlap(&bell(BellKind::PsiPlus)).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(dense_decode(&s).unwrap(), (1, 0));
    }
}
