//! Teleportation, dense coding, key distribution and classical ciphers.

use std::fmt;

use serde::Serialize;

use crate::error::{QError, Result};

pub mod crypto;
pub mod qkd;
pub mod teleport;

pub use crypto::{
    rsa_break, rsa_decrypt, rsa_encrypt, rsa_keygen, vernam_decrypt, vernam_encrypt, RsaBreak,
    RsaKeyPair,
};
pub use qkd::{bb84_session, bbm92_session, detection_probability, Bb84Options, QkdSession, QkdSummary};
pub use teleport::{dense_coding, dense_decode, dense_encode, teleport, teleport_branch, Teleported};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Party {
    Alice,
    Bob,
    Eve,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    /// Local quantum operation or preparation.
    Local,
    Measure { outcomes: Vec<usize> },
    /// Classical message on the public channel.
    Send { bits: Vec<u8> },
    /// Use of an earlier message, by event index.
    Receive { message: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Event {
    pub party: Party,
    pub action: String,
    pub kind: EventKind,
}

/// Ordered log of who did what. A party can only act on another party's
/// data through a `Receive` of an earlier `Send`.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ProtocolTranscript {
    events: Vec<Event>,
}

impl ProtocolTranscript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn local(&mut self, party: Party, action: &str) {
        self.push(party, action, EventKind::Local);
    }

    pub fn measure(&mut self, party: Party, action: &str, outcomes: Vec<usize>) {
        self.push(party, action, EventKind::Measure { outcomes });
    }

    /// Returns the message id for a later `receive`.
    pub fn send(&mut self, party: Party, action: &str, bits: Vec<u8>) -> usize {
        self.push(party, action, EventKind::Send { bits });
        self.events.len() - 1
    }

    /// Hand over the bits of message `id`, which must already be on the channel.
    pub fn receive(&mut self, party: Party, action: &str, id: usize) -> Result<Vec<u8>> {
        let bits = match self.events.get(id).map(|e| &e.kind) {
            Some(EventKind::Send { bits }) => bits.clone(),
            _ => return Err(QError::InvalidState(format!("no message with id {id}"))),
        };
        self.push(party, action, EventKind::Receive { message: id });
        Ok(bits)
    }

    fn push(&mut self, party: Party, action: &str, kind: EventKind) {
        self.events.push(Event {
            party,
            action: action.to_string(),
            kind,
        });
    }

    /// Classical bits put on the channel by `party`.
    pub fn bits_sent(&self, party: Party) -> usize {
        self.events
            .iter()
            .filter(|e| e.party == party)
            .map(|e| match &e.kind {
                EventKind::Send { bits } => bits.len(),
                _ => 0,
            })
            .sum()
    }

    /// Every receive refers to an earlier send.
    pub fn is_causal(&self) -> bool {
        self.events.iter().enumerate().all(|(i, e)| match e.kind {
            EventKind::Receive { message } => {
                message < i && matches!(self.events[message].kind, EventKind::Send { .. })
            }
            _ => true,
        })
    }
}

impl fmt::Display for ProtocolTranscript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.events.iter().enumerate() {
            let detail = match &e.kind {
                EventKind::Local => String::new(),
                EventKind::Measure { outcomes } => format!(" -> {outcomes:?}"),
                EventKind::Send { bits } => {
                    format!(" sends {}", bits.iter().map(|b| b.to_string()).collect::<String>())
                }
                EventKind::Receive { message } => format!(" reads #{message}"),
            };
            writeln!(f, "{i:>3} {:?}: {}{detail}", e.party, e.action)?;
        }
        Ok(())
    }
}
