//! Reference-based compression: a genome as its differences from a public
//! reference sequence.

use super::{encode_element, Genome};
use crate::{Error, Result};
use sha2::{Digest, Sha256};

/// Sorted list of `(position, symbol)` records where a genome departs
/// from its reference.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReferenceDiff {
    reference_id: [u8; 32],
    /// Strictly increasing 1-based positions.
    records: Vec<(u64, u8)>,
}

/// Content digest used to pair a diff with its reference.
pub fn reference_id(reference: &Genome) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update((reference.len() as u64).to_be_bytes());
    hasher.update(reference.symbols());
    hasher.finalize().into()
}

impl ReferenceDiff {
    pub fn from_parts(reference_id: [u8; 32], records: Vec<(u64, u8)>) -> Result<Self> {
        for pair in records.windows(2) {
            if pair[0].0 >= pair[1].0 {
                return Err(Error::InvalidArgument(
                    "diff positions must be strictly increasing".into(),
                ));
            }
        }
        Ok(Self {
            reference_id,
            records,
        })
    }

    pub fn reference_id(&self) -> &[u8; 32] {
        &self.reference_id
    }

    pub fn records(&self) -> &[(u64, u8)] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Diff size as a fraction of the genome length.
    pub fn fraction(&self, genome_len: usize) -> f64 {
        if genome_len == 0 {
            0.0
        } else {
            self.records.len() as f64 / genome_len as f64
        }
    }

    /// Canonical set-element encodings of the diff records, positions
    /// shifted by `position_offset` (used for second-allele coordinates).
    pub fn element_bytes(&self, position_offset: u64) -> Vec<Vec<u8>> {
        self.records
            .iter()
            .map(|&(pos, sym)| {
                encode_element(sym, pos + position_offset)
                    .expect("diff records hold valid symbols")
                    .to_vec()
            })
            .collect()
    }
}

/// Records every position where `genome` differs from `reference`.
pub fn diff_against_reference(genome: &Genome, reference: &Genome) -> Result<ReferenceDiff> {
    if genome.len() != reference.len() {
        return Err(Error::LengthMismatch {
            expected: reference.len(),
            got: genome.len(),
        });
    }
    let records: Vec<(u64, u8)> = genome
        .symbols()
        .iter()
        .zip(reference.symbols().iter())
        .enumerate()
        .filter(|(_, (g, r))| g != r)
        .map(|(i, (g, _))| (i as u64 + 1, *g))
        .collect();
    Ok(ReferenceDiff {
        reference_id: reference_id(reference),
        records,
    })
}

/// Reconstructs the genome exactly from a diff and its reference.
pub fn expand_diff(diff: &ReferenceDiff, reference: &Genome) -> Result<Genome> {
    if &reference_id(reference) != diff.reference_id() {
        return Err(Error::Validation(
            "diff does not belong to this reference".into(),
        ));
    }
    let mut seq = reference.symbols().to_vec();
    for &(pos, sym) in diff.records() {
        if pos == 0 || pos > seq.len() as u64 {
            return Err(Error::OutOfBounds {
                position: pos,
                len: seq.len() as u64,
            });
        }
        seq[(pos - 1) as usize] = sym;
    }
    Genome::from_symbols(seq)
}
