//! Diploid individuals and family synthesis for end-to-end experiments.
//!
//! An individual carries two strands. Strands of a founder are copies of
//! the reference with one variant chosen per polymorphic locus plus
//! background substitutions. A child strand is a block recombination of
//! one parent's two strands (see [`synth_child`]) with fresh point
//! mutations, so every child band at a polymorphic locus is inherited
//! from that parent. Allele copies live in disjoint position coordinate
//! spaces when encoded as set elements.

use super::synth::{synth_child, synth_genome};
use super::{Genome, ALLELE_OFFSET};
use crate::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// One heritable locus: alternative symbol writes, exactly one of which
/// is applied per founder strand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolymorphicLocus {
    /// `variants[k]` is a list of `(1-based position, symbol)` writes.
    pub variants: Vec<Vec<(u64, u8)>>,
}

impl PolymorphicLocus {
    pub fn variant_count(&self) -> usize {
        self.variants.len()
    }
}

/// Two strands of one individual. Strand 0 of a child descends from the
/// father, strand 1 from the mother.
#[derive(Clone, Debug, PartialEq)]
pub struct DiploidGenome {
    pub strands: [Genome; 2],
}

impl DiploidGenome {
    pub fn len(&self) -> usize {
        self.strands[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.strands[0].is_empty()
    }

    /// Set-element encodings of both strands' diffs or positions use this
    /// per-strand offset.
    pub fn strand_offset(strand: usize) -> u64 {
        match strand {
            0 => 0,
            _ => ALLELE_OFFSET,
        }
    }
}

/// Generation knobs for founders and children.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FamilyParams {
    /// Background substitution rate per founder strand relative to the
    /// reference. 0.0025 per strand puts two unrelated individuals at
    /// roughly 99.5% pairwise identity.
    pub background_divergence: f64,
    /// Fresh mutations applied to each child strand.
    pub child_mutation_rate: f64,
    /// Recombination block length for child strands.
    pub block_len: usize,
}

impl Default for FamilyParams {
    fn default() -> Self {
        Self {
            background_divergence: 0.0025,
            child_mutation_rate: 1e-4,
            block_len: 10_000,
        }
    }
}

/// Father, mother and one child.
#[derive(Clone, Debug)]
pub struct SyntheticFamily {
    pub father: DiploidGenome,
    pub mother: DiploidGenome,
    pub child: DiploidGenome,
    pub params: FamilyParams,
}

/// One founder strand: reference + one variant per locus + background.
fn synth_strand<R: Rng + ?Sized>(
    reference: &Genome,
    loci: &[PolymorphicLocus],
    params: &FamilyParams,
    rng: &mut R,
) -> Result<Genome> {
    let mut strand = reference.clone();
    for locus in loci {
        if locus.variants.is_empty() {
            return Err(Error::InvalidArgument("locus without variants".into()));
        }
        let pick = rng.gen_range(0..locus.variants.len());
        for &(pos, sym) in &locus.variants[pick] {
            if pos == 0 || pos > strand.len() as u64 {
                return Err(Error::OutOfBounds {
                    position: pos,
                    len: strand.len() as u64,
                });
            }
            strand.seq_mut()[(pos - 1) as usize] = sym;
        }
    }
    synth_genome(&strand, params.background_divergence, rng)
}

/// A founder individual: two independent strands.
pub fn synth_diploid<R: Rng + ?Sized>(
    reference: &Genome,
    loci: &[PolymorphicLocus],
    params: &FamilyParams,
    rng: &mut R,
) -> Result<DiploidGenome> {
    Ok(DiploidGenome {
        strands: [
            synth_strand(reference, loci, params, rng)?,
            synth_strand(reference, loci, params, rng)?,
        ],
    })
}

/// Meiosis for one parent: recombine the parent's strands into a single
/// gamete strand.
pub fn gamete<R: Rng + ?Sized>(
    parent: &DiploidGenome,
    params: &FamilyParams,
    rng: &mut R,
) -> Result<Genome> {
    synth_child(
        &parent.strands[0],
        &parent.strands[1],
        params.child_mutation_rate,
        params.block_len,
        rng,
    )
}

/// Two founders and their child.
pub fn synth_family<R: Rng + ?Sized>(
    reference: &Genome,
    loci: &[PolymorphicLocus],
    params: FamilyParams,
    rng: &mut R,
) -> Result<SyntheticFamily> {
    let father = synth_diploid(reference, loci, &params, rng)?;
    let mother = synth_diploid(reference, loci, &params, rng)?;
    let child = DiploidGenome {
        strands: [
            gamete(&father, &params, rng)?,
            gamete(&mother, &params, rng)?,
        ],
    };
    Ok(SyntheticFamily {
        father,
        mother,
        child,
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::synth::synth_reference;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn toy_loci(n: usize) -> Vec<PolymorphicLocus> {
        // one locus of 4 variants at fixed positions near the middle
        let base = n as u64 / 2;
        let variants = (0..4u64)
            .map(|k| vec![(base + 2 * k, b'A'), (base + 2 * k + 1, b'C')])
            .collect();
        vec![PolymorphicLocus { variants }]
    }

    #[test]
    fn family_members_share_length_and_alphabet() {
        let mut rng = ChaCha20Rng::seed_from_u64(41);
        let reference = synth_reference(20_000, &mut rng);
        let loci = toy_loci(20_000);
        let fam = synth_family(&reference, &loci, FamilyParams::default(), &mut rng).unwrap();
        assert_eq!(fam.father.len(), 20_000);
        assert_eq!(fam.child.len(), 20_000);
    }

    #[test]
    fn child_symbols_descend_from_the_right_parent() {
        let mut rng = ChaCha20Rng::seed_from_u64(42);
        let reference = synth_reference(30_000, &mut rng);
        let params = FamilyParams {
            child_mutation_rate: 0.0,
            ..FamilyParams::default()
        };
        let fam = synth_family(&reference, &toy_loci(30_000), params, &mut rng).unwrap();
        for i in 0..fam.child.len() {
            let paternal = fam.child.strands[0].symbols()[i];
            assert!(
                paternal == fam.father.strands[0].symbols()[i]
                    || paternal == fam.father.strands[1].symbols()[i]
            );
            let maternal = fam.child.strands[1].symbols()[i];
            assert!(
                maternal == fam.mother.strands[0].symbols()[i]
                    || maternal == fam.mother.strands[1].symbols()[i]
            );
        }
    }

    #[test]
    fn strand_offsets_separate_allele_coordinates() {
        assert_eq!(DiploidGenome::strand_offset(0), 0);
        assert_eq!(DiploidGenome::strand_offset(1), ALLELE_OFFSET);
    }
}
