//! Hash functions shared by all protocols: H maps arbitrary bytes into the
//! working group, H' compresses group elements into short comparison tags.
//!
//! H is realized as counter-mode digest expansion followed by cofactor
//! exponentiation (Schnorr side) or reduction mod N with a coprimality
//! retry (RSA side). H' is a plain digest over the canonical fixed-width
//! element encoding, truncated to the configured tag length.

use super::rsa::RsaGroup;
use super::schnorr::SchnorrGroup;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use sha1::Sha1;
use sha2::{Digest, Sha256};

/// Digest primitive used for H and H'.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DigestAlgo {
    Sha1,
    Sha256,
}

impl DigestAlgo {
    pub fn digest(&self, data: &[u8]) -> Vec<u8> {
        match self {
            DigestAlgo::Sha1 => Sha1::digest(data).to_vec(),
            DigestAlgo::Sha256 => Sha256::digest(data).to_vec(),
        }
    }

    pub fn output_len(&self) -> usize {
        match self {
            DigestAlgo::Sha1 => 20,
            DigestAlgo::Sha256 => 32,
        }
    }

    pub fn code(&self) -> u8 {
        match self {
            DigestAlgo::Sha1 => 1,
            DigestAlgo::Sha256 => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            1 => Some(DigestAlgo::Sha1),
            2 => Some(DigestAlgo::Sha256),
            _ => None,
        }
    }
}

/// Hash configuration shared as common input between the two parties.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashSuite {
    pub algo: DigestAlgo,
    /// Output width of H' in bytes.
    pub tag_len: usize,
}

impl Default for HashSuite {
    fn default() -> Self {
        // 20-byte tags keep message sizes aligned with the historical
        // SHA-1 deployments the bench tables are calibrated against.
        Self {
            algo: DigestAlgo::Sha1,
            tag_len: 20,
        }
    }
}

impl HashSuite {
    /// Counter-mode expansion of `data` to `out_len` bytes.
    fn expand(&self, domain: u8, attempt: u32, data: &[u8], out_len: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(out_len + self.algo.output_len());
        let mut block: u32 = 0;
        while out.len() < out_len {
            let mut buf = Vec::with_capacity(data.len() + 9);
            buf.push(domain);
            buf.extend_from_slice(&attempt.to_be_bytes());
            buf.extend_from_slice(&block.to_be_bytes());
            buf.extend_from_slice(data);
            out.extend_from_slice(&self.algo.digest(&buf));
            block += 1;
        }
        out.truncate(out_len);
        out
    }

    /// H into the order-q subgroup: never returns the identity.
    pub fn hash_to_schnorr(&self, group: &SchnorrGroup, data: &[u8]) -> BigUint {
        let width = group.element_len() + 8;
        let span = group.modulus() - 3u32; // map into [2, p-2]
        let mut attempt: u32 = 0;
        loop {
            let raw = BigUint::from_bytes_be(&self.expand(0x01, attempt, data, width));
            let u = raw % &span + 2u32;
            let t = group.pow(&u, group.cofactor());
            if !t.is_one() {
                return t;
            }
            attempt += 1;
        }
    }

    /// H into Z*_N: re-derives until the output is a unit.
    pub fn hash_to_rsa(&self, rsa: &RsaGroup, data: &[u8]) -> BigUint {
        let width = rsa.element_len() + 8;
        let mut attempt: u32 = 0;
        loop {
            let raw = BigUint::from_bytes_be(&self.expand(0x02, attempt, data, width));
            let u = raw % rsa.modulus();
            if !u.is_zero() && u.gcd(rsa.modulus()).is_one() {
                return u;
            }
            attempt += 1;
        }
    }

    /// H' over raw bytes.
    pub fn tag_bytes(&self, data: &[u8]) -> Vec<u8> {
        let mut out = self.algo.digest(data);
        out.truncate(self.tag_len);
        out
    }

    /// H' over the canonical encoding of a Schnorr element.
    pub fn tag_schnorr(&self, group: &SchnorrGroup, e: &BigUint) -> Vec<u8> {
        self.tag_bytes(&group.encode_element(e))
    }

    /// H' over the canonical encoding of an RSA element.
    pub fn tag_rsa(&self, rsa: &RsaGroup, e: &BigUint) -> Vec<u8> {
        self.tag_bytes(&rsa.encode_element(e))
    }
}
