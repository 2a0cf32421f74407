//! Synthetic sequence generation: references, divergent individuals,
//! recombined children and sequencing-error injection.

use super::{Genome, ALPHABET};
use crate::{Error, Result};
use rand::Rng;

const BASES: [u8; 4] = *b"ACGT";

/// Uniform random reference sequence over `{A, C, G, T}`.
pub fn synth_reference<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Genome {
    let seq: Vec<u8> = (0..n).map(|_| BASES[rng.gen_range(0..4)]).collect();
    Genome::from_symbols(seq).expect("alphabet closed")
}

fn substitute<R: Rng + ?Sized>(current: u8, rng: &mut R) -> u8 {
    loop {
        let cand = BASES[rng.gen_range(0..4)];
        if cand != current {
            return cand;
        }
    }
}

/// Copies the reference, substituting symbols independently at the given
/// rate. Divergence 0 returns an exact copy.
pub fn synth_genome<R: Rng + ?Sized>(
    reference: &Genome,
    divergence: f64,
    rng: &mut R,
) -> Result<Genome> {
    if !(0.0..=1.0).contains(&divergence) {
        return Err(Error::InvalidArgument(format!(
            "divergence {divergence} outside [0, 1]"
        )));
    }
    let mut seq = reference.symbols().to_vec();
    if divergence > 0.0 {
        for slot in seq.iter_mut() {
            if rng.gen_bool(divergence) {
                *slot = substitute(*slot, rng);
            }
        }
    }
    Genome::from_symbols(seq)
}

/// Recombines two equal-length sequences: a fair coin per contiguous
/// block of `block_len` positions picks the source parent, then point
/// mutations are applied at `mutation_rate`.
pub fn synth_child<R: Rng + ?Sized>(
    parent_a: &Genome,
    parent_b: &Genome,
    mutation_rate: f64,
    block_len: usize,
    rng: &mut R,
) -> Result<Genome> {
    if parent_a.len() != parent_b.len() {
        return Err(Error::LengthMismatch {
            expected: parent_a.len(),
            got: parent_b.len(),
        });
    }
    if block_len == 0 {
        return Err(Error::InvalidArgument("block length must be positive".into()));
    }
    if !(0.0..=1.0).contains(&mutation_rate) {
        return Err(Error::InvalidArgument(format!(
            "mutation rate {mutation_rate} outside [0, 1]"
        )));
    }
    let n = parent_a.len();
    let mut seq = Vec::with_capacity(n);
    let mut start = 0usize;
    while start < n {
        let end = (start + block_len).min(n);
        let source = if rng.gen_bool(0.5) {
            parent_a.symbols()
        } else {
            parent_b.symbols()
        };
        seq.extend_from_slice(&source[start..end]);
        start = end;
    }
    if mutation_rate > 0.0 {
        for slot in seq.iter_mut() {
            if rng.gen_bool(mutation_rate) {
                *slot = substitute(*slot, rng);
            }
        }
    }
    Genome::from_symbols(seq)
}

/// Injects uniformly distributed read errors: each position is replaced,
/// at the given rate, by a different symbol drawn from the full alphabet
/// (including `-` for a failed read).
pub fn inject_errors<R: Rng + ?Sized>(genome: &Genome, rate: f64, rng: &mut R) -> Result<Genome> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::InvalidArgument(format!(
            "error rate {rate} outside [0, 1]"
        )));
    }
    let mut seq = genome.symbols().to_vec();
    if rate > 0.0 {
        for slot in seq.iter_mut() {
            if rng.gen_bool(rate) {
                loop {
                    let cand = ALPHABET[rng.gen_range(0..5)];
                    if cand != *slot {
                        *slot = cand;
                        break;
                    }
                }
            }
        }
    }
    Genome::from_symbols(seq)
}
