//! Digitized genome representation and canonical element encoding.
//!
//! A genome is a run of symbols over `{A, C, G, T, -}`; `-` marks a
//! deletion or a failed sequencing read. Set-protocol inputs are built
//! from the injective 9-byte encoding of `(symbol, position)` pairs.

pub mod diff;
pub mod family;
pub mod io;
pub mod synth;

pub use diff::{diff_against_reference, expand_diff, ReferenceDiff};
pub use family::{
    synth_diploid, synth_family, DiploidGenome, FamilyParams, PolymorphicLocus, SyntheticFamily,
};
pub use synth::{inject_errors, synth_child, synth_genome, synth_reference};

use crate::groups::{HashSuite, SchnorrGroup};
use crate::{Error, Result};
use num_bigint::BigUint;

/// Nucleotide alphabet plus the deletion/unknown mark.
pub const ALPHABET: [u8; 5] = *b"ACGT-";

/// Assumed real-genome length used for extrapolation factors.
pub const REAL_GENOME_LEN: u64 = 3_000_000_000;

/// Second-allele positions are offset into a disjoint coordinate space so
/// diploid genomes encode injectively alongside haploid ones.
pub const ALLELE_OFFSET: u64 = 1 << 32;

/// Integer code of a symbol (also its 3-bit packed representation and its
/// PET message value).
pub fn symbol_code(symbol: u8) -> Result<u8> {
    match symbol {
        b'A' => Ok(0),
        b'C' => Ok(1),
        b'G' => Ok(2),
        b'T' => Ok(3),
        b'-' => Ok(4),
        other => Err(Error::InvalidSymbol(other)),
    }
}

pub fn symbol_from_code(code: u8) -> Result<u8> {
    ALPHABET
        .get(code as usize)
        .copied()
        .ok_or(Error::InvalidSymbol(code))
}

/// Fixed 9-byte injective encoding of `(symbol, position)`: one ASCII
/// symbol byte followed by the big-endian 1-based position.
pub fn encode_element(symbol: u8, position: u64) -> Result<[u8; 9]> {
    symbol_code(symbol)?;
    if position == 0 {
        return Err(Error::OutOfBounds {
            position: 0,
            len: 0,
        });
    }
    let mut out = [0u8; 9];
    out[0] = symbol;
    out[1..].copy_from_slice(&position.to_be_bytes());
    Ok(out)
}

pub fn decode_element(bytes: &[u8]) -> Result<(u8, u64)> {
    if bytes.len() != 9 {
        return Err(Error::MalformedPayload(format!(
            "element encoding must be 9 bytes, got {}",
            bytes.len()
        )));
    }
    symbol_code(bytes[0])?;
    let position = u64::from_be_bytes(bytes[1..].try_into().expect("8 bytes"));
    if position == 0 {
        return Err(Error::OutOfBounds {
            position: 0,
            len: 0,
        });
    }
    Ok((bytes[0], position))
}

/// A position-tagged symbol run.
#[derive(Clone, Debug, PartialEq)]
pub struct Genome {
    seq: Vec<u8>,
    /// Linear factor to a full-size genome, kept with the data so cost
    /// extrapolations survive serialization.
    scale: f64,
}

impl Genome {
    pub fn from_symbols(seq: Vec<u8>) -> Result<Self> {
        for &b in &seq {
            symbol_code(b)?;
        }
        let scale = if seq.is_empty() {
            1.0
        } else {
            REAL_GENOME_LEN as f64 / seq.len() as f64
        };
        Ok(Self { seq, scale })
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.seq
    }

    pub fn scale_factor(&self) -> f64 {
        self.scale
    }

    pub fn set_scale_factor(&mut self, scale: f64) {
        self.scale = scale;
    }

    /// Symbol at 1-based `position`.
    pub fn symbol_at(&self, position: u64) -> Result<u8> {
        if position == 0 || position > self.seq.len() as u64 {
            return Err(Error::OutOfBounds {
                position,
                len: self.seq.len() as u64,
            });
        }
        Ok(self.seq[(position - 1) as usize])
    }

    /// Canonical element bytes for 1-based `position`, shifted by
    /// `position_offset` (zero for haploid input, [`ALLELE_OFFSET`] for a
    /// second allele copy).
    pub fn element_bytes(&self, position: u64, position_offset: u64) -> Result<[u8; 9]> {
        let symbol = self.symbol_at(position)?;
        encode_element(symbol, position + position_offset)
    }

    /// Iterates `(symbol, 1-based position)` pairs.
    pub fn iter_positions(&self) -> impl Iterator<Item = (u8, u64)> + '_ {
        self.seq
            .iter()
            .enumerate()
            .map(|(i, &b)| (b, i as u64 + 1))
    }

    pub(crate) fn seq_mut(&mut self) -> &mut Vec<u8> {
        &mut self.seq
    }

    /// Fraction of positions where the two genomes carry the same symbol.
    pub fn identity_with(&self, other: &Genome) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        let same = self
            .seq
            .iter()
            .zip(other.seq.iter())
            .filter(|(a, b)| a == b)
            .count();
        Ok(same as f64 / self.len() as f64)
    }
}

/// Restartable lazy stream of hashed genome elements in position order.
pub struct HashedElements<'a> {
    group: &'a SchnorrGroup,
    hash: &'a HashSuite,
    genome: &'a Genome,
    next: u64,
}

impl<'a> Iterator for HashedElements<'a> {
    type Item = BigUint;

    fn next(&mut self) -> Option<BigUint> {
        if self.next > self.genome.len() as u64 {
            return None;
        }
        let bytes = self
            .genome
            .element_bytes(self.next, 0)
            .expect("position in range");
        self.next += 1;
        Some(self.hash.hash_to_schnorr(self.group, &bytes))
    }
}

impl<'a> ExactSizeIterator for HashedElements<'a> {
    fn len(&self) -> usize {
        self.genome.len() - (self.next as usize - 1)
    }
}

/// Streams `H(b_i || i)` for every position of the genome.
pub fn hash_genome<'a>(
    group: &'a SchnorrGroup,
    hash: &'a HashSuite,
    genome: &'a Genome,
) -> HashedElements<'a> {
    HashedElements {
        group,
        hash,
        genome,
        next: 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::gen_schnorr;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn encoding_is_injective_on_small_domain() {
        let mut seen = std::collections::HashSet::new();
        for &symbol in &ALPHABET {
            for position in 1..=10_000u64 {
                assert!(seen.insert(encode_element(symbol, position).unwrap()));
            }
        }
    }

    #[test]
    fn encoding_separates_neighbours_and_symbols() {
        assert_ne!(
            encode_element(b'A', 1).unwrap(),
            encode_element(b'A', 2).unwrap()
        );
        assert_ne!(
            encode_element(b'G', 460).unwrap(),
            encode_element(b'A', 460).unwrap()
        );
    }

    #[test]
    fn decode_round_trip() {
        let mut rng = ChaCha20Rng::seed_from_u64(15);
        for _ in 0..10_000 {
            let symbol = ALPHABET[rng.gen_range(0..5)];
            let position = rng.gen_range(1..u64::MAX / 2);
            let enc = encode_element(symbol, position).unwrap();
            assert_eq!(decode_element(&enc).unwrap(), (symbol, position));
        }
    }

    #[test]
    fn rejects_bad_symbols_and_zero_position() {
        assert!(encode_element(b'N', 5).is_err());
        assert!(encode_element(b'A', 0).is_err());
        assert!(Genome::from_symbols(b"ACGX".to_vec()).is_err());
    }

    #[test]
    fn hash_stream_is_lazy_deterministic_and_positional() {
        let mut rng = ChaCha20Rng::seed_from_u64(16);
        let group = gen_schnorr(256, 64, &mut rng).unwrap();
        let hash = HashSuite::default();
        let g1 = Genome::from_symbols(b"ACGTACGTAC".to_vec()).unwrap();
        let mut g2 = g1.clone();
        g2.seq_mut()[4] = b'-';

        let s1: Vec<_> = hash_genome(&group, &hash, &g1).collect();
        let s1_again: Vec<_> = hash_genome(&group, &hash, &g1).collect();
        let s2: Vec<_> = hash_genome(&group, &hash, &g2).collect();
        assert_eq!(s1.len(), 10);
        assert_eq!(s1, s1_again);
        let diffs: Vec<usize> = (0..10).filter(|&i| s1[i] != s2[i]).collect();
        assert_eq!(diffs, vec![4]);
        for h in &s1 {
            assert!(group.is_element(h));
        }
    }

    #[test]
    fn identity_fraction() {
        let a = Genome::from_symbols(b"AAAA".to_vec()).unwrap();
        let b = Genome::from_symbols(b"AATA".to_vec()).unwrap();
        assert!((a.identity_with(&b).unwrap() - 0.75).abs() < 1e-9);
    }
}
