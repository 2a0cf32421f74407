//! Default paternity panel: a reference with planted polymorphic loci.
//!
//! Each locus is laid out as an anchor cut site, a unique probe, and a
//! ladder of disabled cut sites at fixed offsets. A founder strand
//! enables exactly one ladder site, so the probed fragment length takes
//! one of `K` well-separated values per individual and is inherited as a
//! block. Unrelated individuals then disagree on most fragment lengths
//! while a child's band always appears among its parent's two bands.

use super::catalog::Catalog;
use super::{Enzyme, Marker};
use crate::genome::{synth_reference, Genome, PolymorphicLocus};
use crate::{Error, Result};
use rand::Rng;

const PROBE_LEN: usize = 20;
const LADDER_SPACING: usize = 24;
const BASES: [u8; 4] = *b"ACGT";

/// Layout knobs for panel generation.
#[derive(Clone, Copy, Debug)]
pub struct PanelParams {
    pub genome_len: usize,
    pub marker_count: usize,
    /// Distinct fragment-length alleles per locus.
    pub variants_per_locus: usize,
}

impl Default for PanelParams {
    fn default() -> Self {
        Self {
            genome_len: 200_000,
            marker_count: 25,
            variants_per_locus: 12,
        }
    }
}

/// A generated panel: the reference, its catalog and the heritable loci.
#[derive(Clone, Debug)]
pub struct PaternityPanel {
    pub reference: Genome,
    pub catalog: Catalog,
    pub loci: Vec<PolymorphicLocus>,
    pub params: PanelParams,
}

impl PaternityPanel {
    pub fn generate<R: Rng + ?Sized>(params: PanelParams, rng: &mut R) -> Result<Self> {
        let enzyme = Enzyme::pst_i();
        let pattern = enzyme.pattern.clone();
        let plen = pattern.len();
        let region_len = plen + PROBE_LEN + 2 + params.variants_per_locus * LADDER_SPACING + plen;
        let spacing = params.genome_len / (params.marker_count + 1);
        if spacing < region_len + 2 * plen {
            return Err(Error::InvalidArgument(format!(
                "genome length {} too small for {} markers",
                params.genome_len, params.marker_count
            )));
        }
        if params.variants_per_locus < 2 {
            return Err(Error::InvalidArgument(
                "need at least two variants per locus".into(),
            ));
        }

        let mut reference = synth_reference(params.genome_len, rng);
        let mut markers = Vec::with_capacity(params.marker_count);
        let mut loci = Vec::with_capacity(params.marker_count);

        // disabled site: the recognition pattern with two inner symbols
        // changed, so neither a single background substitution nor a
        // block boundary can silently re-enable it
        let mut broken = pattern.clone();
        broken[2] = flip_base(pattern[2]);
        broken[4] = flip_base(pattern[4]);

        for k in 0..params.marker_count {
            let base = (k + 1) * spacing; // 0-based locus origin
            let seq = reference.seq_mut();

            // anchor cut site
            seq[base..base + plen].copy_from_slice(&pattern);
            // probe
            for slot in seq[base + plen..base + plen + PROBE_LEN].iter_mut() {
                *slot = BASES[rng.gen_range(0..4)];
            }
            // ladder of disabled sites
            let ladder_base = base + plen + PROBE_LEN + 2;
            let mut variants = Vec::with_capacity(params.variants_per_locus);
            for j in 0..params.variants_per_locus {
                let site = ladder_base + j * LADDER_SPACING;
                seq[site..site + plen].copy_from_slice(&broken);
                // enabling writes restore the two disabled symbols
                variants.push(vec![
                    (site as u64 + 2 + 1, pattern[2]),
                    (site as u64 + 4 + 1, pattern[4]),
                ]);
            }

            // wipe accidental cut sites inside and just around the locus
            let span_start = base.saturating_sub(plen);
            let span_end = (base + region_len).min(params.genome_len);
            sanitize_region(reference.seq_mut(), span_start, span_end, base, &pattern);

            let probe =
                reference.symbols()[base + plen..base + plen + PROBE_LEN].to_vec();
            markers.push(Marker::new((k + 1) as u16, &probe)?);
            loci.push(PolymorphicLocus { variants });
        }

        let catalog = Catalog::new(vec![enzyme], markers);
        Ok(Self {
            reference,
            catalog,
            loci,
            params,
        })
    }

    /// Known-variant panel over the same loci: one position inside each
    /// probed fragment.
    pub fn snp_panel(&self) -> Vec<(u64, u64)> {
        let plen = self.catalog.enzymes[0].pattern.len();
        let spacing = self.params.genome_len / (self.params.marker_count + 1);
        (0..self.params.marker_count)
            .map(|k| {
                let base = (k + 1) * spacing;
                ((base + plen + 4) as u64 + 1, PROBE_LEN as u64)
            })
            .collect()
    }
}

fn flip_base(b: u8) -> u8 {
    match b {
        b'A' => b'C',
        b'C' => b'A',
        b'G' => b'T',
        _ => b'G',
    }
}

/// Destroys every occurrence of `pattern` in `[start, end)` except the
/// one anchored at `keep`.
fn sanitize_region(seq: &mut [u8], start: usize, end: usize, keep: usize, pattern: &[u8]) {
    let plen = pattern.len();
    for _ in 0..100 {
        let mut dirty = false;
        let scan_end = end.min(seq.len()).saturating_sub(plen - 1);
        for pos in start..scan_end {
            if pos != keep && &seq[pos..pos + plen] == pattern {
                seq[pos + 2] = flip_base(seq[pos + 2]);
                dirty = true;
            }
        }
        if !dirty {
            return;
        }
    }
    unreachable!("sanitization failed to converge");
}
