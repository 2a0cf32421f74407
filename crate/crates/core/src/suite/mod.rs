//! Message-level state machines for the three set protocols.
//!
//! Each protocol splits into an offline phase (computable before any
//! contact with the peer) and an online exchange, mirrored by the state
//! types here. Server offline states for PSI and APSI are read-only and
//! shareable across concurrent sessions; PSI-CA server state is consumed
//! by its single online exchange. Every received element is validated
//! against the working group before use unless the params disable it.

pub mod apsi;
pub mod psi;
pub mod psica;

pub use apsi::{ApsiClient, ApsiServer, ApsiServerSession};
pub use psi::{psi_offline_stream, PsiClient, PsiServer, PsiServerSession};
pub use psica::{PsicaClient, PsicaServer};

use crate::groups::{HashSuite, RsaGroup, SchnorrGroup};
use crate::wire::ProtocolMessage;
use crate::{Error, Result};
use std::collections::HashSet;
use std::sync::Arc;

/// Common input for the discrete-log protocols: the subgroup parameters
/// plus the two hash functions.
#[derive(Clone, Debug)]
pub struct DhParams {
    pub group: Arc<SchnorrGroup>,
    pub hash: HashSuite,
    /// Subgroup-check every received element. On by default; the bench
    /// harness can switch it off to mirror setups that skip the check.
    pub validate_received: bool,
}

impl DhParams {
    pub fn new(group: Arc<SchnorrGroup>) -> Self {
        Self {
            group,
            hash: HashSuite::default(),
            validate_received: true,
        }
    }
}

/// Common input for the RSA-based authorized protocol.
#[derive(Clone, Debug)]
pub struct RsaParams {
    pub rsa: Arc<RsaGroup>,
    pub hash: HashSuite,
    pub validate_received: bool,
}

impl RsaParams {
    pub fn new(rsa: Arc<RsaGroup>) -> Self {
        Self {
            rsa,
            hash: HashSuite::default(),
            validate_received: true,
        }
    }
}

/// A party's input set: canonical element byte strings, duplicates
/// removed, first-occurrence order preserved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementSet {
    items: Vec<Vec<u8>>,
}

impl ElementSet {
    pub fn new<I: IntoIterator<Item = Vec<u8>>>(items: I) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for item in items {
            if seen.insert(item.clone()) {
                out.push(item);
            }
        }
        if out.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(Self { items: out })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[Vec<u8>] {
        &self.items
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<u8>> {
        self.items.iter()
    }
}

/// Published server tags, queried during client finalization.
#[derive(Clone, Debug, Default)]
pub struct TagSet {
    tags: HashSet<Vec<u8>>,
}

impl TagSet {
    pub fn from_tags<I: IntoIterator<Item = Vec<u8>>>(tags: I) -> Self {
        Self {
            tags: tags.into_iter().collect(),
        }
    }

    /// Parses a setup-phase message carrying one list of tags.
    pub fn from_message(msg: &ProtocolMessage, tag_len: usize) -> Result<Self> {
        let lists = crate::wire::parse_lists(&msg.payload, &[tag_len])?;
        Ok(Self::from_tags(lists.into_iter().next().expect("one list")))
    }

    pub fn contains(&self, tag: &[u8]) -> bool {
        self.tags.contains(tag)
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }
}

/// Checks the fixed header fields of an incoming message.
pub(crate) fn check_header(
    msg: &ProtocolMessage,
    kind: u8,
    phase: u8,
    session: &crate::wire::SessionId,
) -> Result<()> {
    if msg.kind != kind {
        return Err(Error::KindMismatch {
            expected: kind,
            got: msg.kind,
        });
    }
    if msg.session != *session {
        return Err(Error::SessionMismatch);
    }
    if msg.phase != phase {
        return Err(Error::PhaseViolation {
            expected: phase,
            got: msg.phase,
        });
    }
    Ok(())
}

/// Draws a uniform permutation of `0..n`.
pub(crate) fn random_permutation<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    idx
}
