//! Restriction-digest emulation and marker probing.
//!
//! Digestion cuts the genome at every leftmost non-overlapping pattern
//! occurrence of each enzyme; cut positions from all enzymes are merged
//! before fragments are extracted, so fragments always partition the
//! sequence. Probing selects, per marker, the unique fragment containing
//! the probe and reduces it to a `(length, marker id)` record.

pub mod catalog;
pub mod panel;

use crate::genome::Genome;
use crate::par::map_batch;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Length recorded for a marker whose probe is absent from the genome, so
/// absent-vs-absent still compares equal.
pub const SENTINEL_LEN: u64 = (1 << 20) - 1;

/// Default panel size of the known-variant selection protocol.
pub const DEFAULT_SNP_PANEL_SIZE: usize = 52;

/// A restriction enzyme: recognition pattern and the cut offset inside it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Enzyme {
    pub name: String,
    pub pattern: Vec<u8>,
    /// Cut position within the pattern, `1..=pattern.len()`; 5 for PstI
    /// means the left piece ends with `CTGCA` and the right starts at `G`.
    pub offset: usize,
}

impl Enzyme {
    pub fn new(name: &str, pattern: &[u8], offset: usize) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::InvalidArgument("empty enzyme pattern".into()));
        }
        if !pattern.iter().all(|b| b"ACGT".contains(b)) {
            return Err(Error::InvalidArgument(
                "enzyme pattern must be over A/C/G/T".into(),
            ));
        }
        if offset == 0 || offset > pattern.len() {
            return Err(Error::InvalidArgument(format!(
                "cut offset {offset} outside 1..={}",
                pattern.len()
            )));
        }
        Ok(Self {
            name: name.to_string(),
            pattern: pattern.to_vec(),
            offset,
        })
    }

    /// The classic six-cutter used throughout the test corpus.
    pub fn pst_i() -> Self {
        Self::new("PstI", b"CTGCAG", 5).expect("valid enzyme")
    }
}

/// A marker probe selecting one fragment by content.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Marker {
    pub id: u16,
    pub probe: Vec<u8>,
}

impl Marker {
    pub fn new(id: u16, probe: &[u8]) -> Result<Self> {
        if probe.is_empty() {
            return Err(Error::InvalidArgument("empty marker probe".into()));
        }
        if !probe.iter().all(|b| b"ACGT".contains(b)) {
            return Err(Error::InvalidArgument(
                "marker probe must be over A/C/G/T".into(),
            ));
        }
        Ok(Self {
            id,
            probe: probe.to_vec(),
        })
    }
}

/// One `(length, marker)` record of a digest profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FragmentRecord {
    pub length: u64,
    pub marker: u16,
}

impl FragmentRecord {
    /// 10-byte set-element encoding: 8-byte length, 2-byte marker id.
    pub fn to_bytes(&self) -> [u8; 10] {
        let mut out = [0u8; 10];
        out[..8].copy_from_slice(&self.length.to_be_bytes());
        out[8..].copy_from_slice(&self.marker.to_be_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != 10 {
            return Err(Error::MalformedPayload(format!(
                "fragment record must be 10 bytes, got {}",
                bytes.len()
            )));
        }
        Ok(Self {
            length: u64::from_be_bytes(bytes[..8].try_into().expect("8 bytes")),
            marker: u16::from_be_bytes(bytes[8..].try_into().expect("2 bytes")),
        })
    }
}

/// Ordered digest profile: one record per marker, in panel order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FragmentSet {
    records: Vec<FragmentRecord>,
}

impl FragmentSet {
    pub fn new(records: Vec<FragmentRecord>) -> Self {
        Self { records }
    }

    pub fn records(&self) -> &[FragmentRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Set-element encodings, in record order.
    pub fn element_bytes(&self) -> Vec<Vec<u8>> {
        self.records.iter().map(|r| r.to_bytes().to_vec()).collect()
    }

    /// Ordered length vector for positional equality testing.
    pub fn length_vector(&self) -> Vec<u64> {
        self.records.iter().map(|r| r.length).collect()
    }

    /// Count of slots where two profiles carry identical records.
    pub fn matching_records(&self, other: &FragmentSet) -> u64 {
        self.records
            .iter()
            .zip(other.records.iter())
            .filter(|(a, b)| a == b)
            .count() as u64
    }
}

/// A fragment as a half-open span of the digested genome.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FragmentSpan {
    pub start: u64,
    pub end: u64,
}

impl FragmentSpan {
    pub fn len(&self) -> u64 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

/// Finds leftmost non-overlapping occurrences of `pattern`, returning
/// match start positions. The scan is chunked for parallelism, then a
/// sequential greedy pass drops overlapping candidates.
fn pattern_occurrences(seq: &[u8], pattern: &[u8]) -> Vec<u64> {
    let m = pattern.len();
    if seq.len() < m {
        return Vec::new();
    }
    let chunk = 1 << 18;
    let candidate_lists = crate::par::map_chunks(seq.len() - m + 1, chunk, |start, end| {
        let mut found = Vec::new();
        for i in start..end {
            if &seq[i..i + m] == pattern {
                found.push(i as u64);
            }
        }
        found
    });
    let mut out = Vec::new();
    let mut next_allowed = 0u64;
    for list in candidate_lists {
        for pos in list {
            if pos >= next_allowed {
                out.push(pos);
                next_allowed = pos + m as u64;
            }
        }
    }
    out
}

/// Cut positions produced by one enzyme.
fn enzyme_cuts(seq: &[u8], enzyme: &Enzyme) -> Vec<u64> {
    pattern_occurrences(seq, &enzyme.pattern)
        .into_iter()
        .map(|pos| pos + enzyme.offset as u64)
        .collect()
}

/// Emulates digestion by every enzyme; fragments partition the genome.
pub fn digest(genome: &Genome, enzymes: &[Enzyme]) -> Result<Vec<FragmentSpan>> {
    if enzymes.is_empty() {
        return Err(Error::InvalidArgument("no enzymes supplied".into()));
    }
    let seq = genome.symbols();
    let mut cuts: Vec<u64> = enzymes
        .iter()
        .flat_map(|e| enzyme_cuts(seq, e))
        .collect();
    cuts.sort_unstable();
    cuts.dedup();

    let n = seq.len() as u64;
    let mut spans = Vec::with_capacity(cuts.len() + 1);
    let mut start = 0u64;
    for cut in cuts {
        if cut > start && cut < n {
            spans.push(FragmentSpan { start, end: cut });
            start = cut;
        } else if cut == n {
            // cutting exactly at the end produces no extra fragment
        }
    }
    spans.push(FragmentSpan { start, end: n });
    Ok(spans)
}

/// Selects, for each marker, the unique fragment containing its probe.
/// Absent markers record the sentinel length; a probe found in two or
/// more fragments is an error.
pub fn probe_markers(
    genome: &Genome,
    fragments: &[FragmentSpan],
    markers: &[Marker],
) -> Result<FragmentSet> {
    if markers.is_empty() {
        return Err(Error::InvalidArgument("no markers supplied".into()));
    }
    let seq = genome.symbols();
    let boundaries: Vec<u64> = fragments.iter().map(|f| f.start).collect();

    let per_marker: Vec<Result<FragmentRecord>> = map_batch(markers, |marker| {
        let occurrences = pattern_occurrences(seq, &marker.probe);
        let probe_len = marker.probe.len() as u64;
        // digestion happens first: a probe straddling a cut site is not
        // contained in either fragment
        let mut hit_fragments: Vec<usize> = occurrences
            .iter()
            .filter_map(|&pos| {
                let idx = match boundaries.binary_search(&pos) {
                    Ok(i) => i,
                    Err(i) => i - 1,
                };
                (pos + probe_len <= fragments[idx].end).then_some(idx)
            })
            .collect();
        hit_fragments.sort_unstable();
        hit_fragments.dedup();
        match hit_fragments.len() {
            0 => Ok(FragmentRecord {
                length: SENTINEL_LEN,
                marker: marker.id,
            }),
            1 => Ok(FragmentRecord {
                length: fragments[hit_fragments[0]].len(),
                marker: marker.id,
            }),
            n => Err(Error::MarkerAmbiguous {
                marker: marker.id,
                fragments: n,
            }),
        }
    });
    let records = per_marker.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(FragmentSet::new(records))
}

/// Digest-then-probe in one call.
pub fn fragment_profile(
    genome: &Genome,
    enzymes: &[Enzyme],
    markers: &[Marker],
) -> Result<FragmentSet> {
    let fragments = digest(genome, enzymes)?;
    probe_markers(genome, &fragments, markers)
}

/// Known-variant selection: one record per panel entry, holding the
/// length of the digest fragment containing that position. `window`
/// demands that many flanking positions inside the genome on both sides.
pub fn snp_fragment_select(
    genome: &Genome,
    enzymes: &[Enzyme],
    panel: &[(u64, u64)],
) -> Result<FragmentSet> {
    if panel.is_empty() {
        return Err(Error::InvalidArgument("empty panel".into()));
    }
    let fragments = digest(genome, enzymes)?;
    let boundaries: Vec<u64> = fragments.iter().map(|f| f.start).collect();
    let n = genome.len() as u64;
    let mut records = Vec::with_capacity(panel.len());
    for (idx, &(position, window)) in panel.iter().enumerate() {
        if position == 0 || position > n || position + window > n || position <= window {
            return Err(Error::OutOfBounds {
                position,
                len: n,
            });
        }
        let zero_based = position - 1;
        let frag_idx = match boundaries.binary_search(&zero_based) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        records.push(FragmentRecord {
            length: fragments[frag_idx].len(),
            marker: idx as u16,
        });
    }
    Ok(FragmentSet::new(records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::synth::synth_reference;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn genome(s: &str) -> Genome {
        Genome::from_symbols(s.as_bytes().to_vec()).unwrap()
    }

    fn fragment_strings(g: &Genome, spans: &[FragmentSpan]) -> Vec<String> {
        spans
            .iter()
            .map(|f| {
                String::from_utf8(g.symbols()[f.start as usize..f.end as usize].to_vec()).unwrap()
            })
            .collect()
    }

    #[test]
    fn pst_i_cuts_toy_genome() {
        let g = genome("AACTGCAGTT");
        let frags = digest(&g, &[Enzyme::pst_i()]).unwrap();
        assert_eq!(fragment_strings(&g, &frags), vec!["AACTGCA", "GTT"]);
    }

    #[test]
    fn no_occurrence_returns_whole_genome() {
        let g = genome("AAAATTTT");
        let frags = digest(&g, &[Enzyme::pst_i()]).unwrap();
        assert_eq!(fragment_strings(&g, &frags), vec!["AAAATTTT"]);
    }

    #[test]
    fn adjacent_occurrences_follow_leftmost_scan() {
        let g = genome("CTGCAGCTGCAG");
        let frags = digest(&g, &[Enzyme::pst_i()]).unwrap();
        assert_eq!(fragment_strings(&g, &frags), vec!["CTGCA", "GCTGCA", "G"]);
    }

    #[test]
    fn overlapping_occurrences_are_skipped() {
        // pattern AAAA in AAAAAA: leftmost match at 0 consumes 0..4; the
        // overlapping match at 1 and 2 are dropped
        let e = Enzyme::new("quad", b"AAAA", 2).unwrap();
        let g = genome("AAAAAA");
        let frags = digest(&g, &[e]).unwrap();
        assert_eq!(fragment_strings(&g, &frags), vec!["AA", "AAAA"]);
    }

    #[test]
    fn deletion_symbol_never_matches() {
        let g = genome("AACTGC-AGTT");
        let frags = digest(&g, &[Enzyme::pst_i()]).unwrap();
        assert_eq!(frags.len(), 1);
    }

    #[test]
    fn cut_at_sequence_edges_does_not_create_empty_fragments() {
        // pattern at the very start with offset at the pattern end
        let e = Enzyme::new("edge", b"ACGT", 4).unwrap();
        let g = genome("ACGTAAAA");
        let frags = digest(&g, &[e]).unwrap();
        assert_eq!(fragment_strings(&g, &frags), vec!["ACGT", "AAAA"]);
    }

    #[test]
    fn multiple_enzymes_merge_cuts() {
        let e1 = Enzyme::new("one", b"AAAA", 2).unwrap();
        let e2 = Enzyme::new("two", b"TTTT", 2).unwrap();
        let g = genome("CCAAAACCTTTTCC");
        let frags = digest(&g, &[e1, e2]).unwrap();
        assert_eq!(
            fragment_strings(&g, &frags),
            vec!["CCAA", "AACCTT", "TTCC"]
        );
    }

    #[test]
    fn digestion_partitions_random_genomes() {
        let mut rng = ChaCha20Rng::seed_from_u64(61);
        for trial in 0..20 {
            let n = rng.gen_range(100..5_000usize);
            let g = synth_reference(n, &mut rng);
            let pattern_len = rng.gen_range(3..6usize);
            let pattern: Vec<u8> = (0..pattern_len)
                .map(|_| b"ACGT"[rng.gen_range(0..4)])
                .collect();
            let offset = rng.gen_range(1..=pattern_len);
            let e = Enzyme::new("rand", &pattern, offset).unwrap();
            let frags = digest(&g, &[e]).unwrap();
            let mut rebuilt = Vec::new();
            let mut cursor = 0u64;
            for f in &frags {
                assert_eq!(f.start, cursor, "trial {trial}: fragments not contiguous");
                assert!(f.end > f.start, "trial {trial}: empty fragment");
                cursor = f.end;
                rebuilt.extend_from_slice(&g.symbols()[f.start as usize..f.end as usize]);
            }
            assert_eq!(cursor, g.len() as u64);
            assert_eq!(rebuilt, g.symbols(), "trial {trial}");
        }
    }

    #[test]
    fn probing_selects_unique_fragments() {
        let g = genome("AACTGCAGGGTTCTGCAGACACA");
        // fragments: AACTGCA | GGGTTCTGCA | GACACA
        let frags = digest(&g, &[Enzyme::pst_i()]).unwrap();
        let markers = vec![
            Marker::new(1, b"GGTT").unwrap(),
            Marker::new(2, b"ACAC").unwrap(),
            Marker::new(3, b"TTTT").unwrap(), // absent
        ];
        let set = probe_markers(&g, &frags, &markers).unwrap();
        assert_eq!(
            set.records(),
            &[
                FragmentRecord { length: 10, marker: 1 },
                FragmentRecord { length: 6, marker: 2 },
                FragmentRecord { length: SENTINEL_LEN, marker: 3 },
            ]
        );
    }

    #[test]
    fn ambiguous_marker_is_an_error() {
        let g = genome("AAGGAACTGCAGAAGGAA");
        let frags = digest(&g, &[Enzyme::pst_i()]).unwrap();
        let markers = vec![Marker::new(9, b"AAGGAA").unwrap()];
        assert!(matches!(
            probe_markers(&g, &frags, &markers),
            Err(Error::MarkerAmbiguous { marker: 9, fragments: 2 })
        ));
    }

    #[test]
    fn equal_fragments_give_equal_records() {
        let a = genome("CCCTGCAGAATTGGCTGCAGCC");
        let b = genome("TTCTGCAGAATTGGCTGCAGAA");
        // the middle fragment GAATTGGCTGCA is shared
        let markers = vec![Marker::new(4, b"AATTGG").unwrap()];
        let fa = fragment_profile(&a, &[Enzyme::pst_i()], &markers).unwrap();
        let fb = fragment_profile(&b, &[Enzyme::pst_i()], &markers).unwrap();
        assert_eq!(fa.records()[0], fb.records()[0]);
        assert_eq!(fa.matching_records(&fb), 1);
    }

    #[test]
    fn record_bytes_round_trip() {
        let rec = FragmentRecord {
            length: 123_456,
            marker: 17,
        };
        let bytes = rec.to_bytes();
        assert_eq!(FragmentRecord::from_bytes(&bytes).unwrap(), rec);
    }

    #[test]
    fn snp_panel_selects_containing_fragments() {
        let g = genome("AACTGCAGGGTTCTGCAGACACA");
        // fragments: [0,7) [7,17) [17,23)
        let panel = vec![(3u64, 2u64), (10, 2), (20, 2)];
        let set = snp_fragment_select(&g, &[Enzyme::pst_i()], &panel).unwrap();
        let lengths: Vec<u64> = set.length_vector();
        assert_eq!(lengths, vec![7, 10, 6]);
        assert!(snp_fragment_select(&g, &[Enzyme::pst_i()], &[(99, 2)]).is_err());
    }

    #[test]
    fn identical_genomes_identical_snp_sets() {
        let mut rng = ChaCha20Rng::seed_from_u64(62);
        let g = synth_reference(20_000, &mut rng);
        let panel: Vec<(u64, u64)> = (0..DEFAULT_SNP_PANEL_SIZE as u64)
            .map(|i| (200 + i * 300, 16))
            .collect();
        assert_eq!(panel.len(), 52);
        let a = snp_fragment_select(&g, &[Enzyme::pst_i()], &panel).unwrap();
        let b = snp_fragment_select(&g, &[Enzyme::pst_i()], &panel).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 52);
    }
}
