//! Data-parallel batch helpers.
//!
//! Every per-element loop in the protocol suite (blinding, unblinding,
//! tag derivation, subgroup checks, digest scans) funnels through
//! [`map_batch`]. With the `parallel` feature the work is spread across
//! the rayon pool; without it the same closure runs sequentially. Output
//! order always matches input order, so results are identical either way.
//!
//! [`map_batch_seq`] is always available and is what the criterion bench
//! suite compares against the parallel path.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, preserving order.
#[cfg(feature = "parallel")]
pub fn map_batch<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// Map `f` over `items`, preserving order.
#[cfg(not(feature = "parallel"))]
pub fn map_batch<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Sequential reference path, independent of the feature flag.
pub fn map_batch_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Map `f` over index ranges `[start, end)` chunked by `chunk`, preserving
/// chunk order. Used for scanning large genomes in slices.
#[cfg(feature = "parallel")]
pub fn map_chunks<U, F>(len: usize, chunk: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize, usize) -> U + Sync + Send,
{
    let ranges: Vec<(usize, usize)> = chunk_ranges(len, chunk);
    ranges.par_iter().map(|&(s, e)| f(s, e)).collect()
}

/// Map `f` over index ranges `[start, end)` chunked by `chunk`, preserving
/// chunk order.
#[cfg(not(feature = "parallel"))]
pub fn map_chunks<U, F>(len: usize, chunk: usize, f: F) -> Vec<U>
where
    F: Fn(usize, usize) -> U,
{
    chunk_ranges(len, chunk)
        .into_iter()
        .map(|(s, e)| f(s, e))
        .collect()
}

fn chunk_ranges(len: usize, chunk: usize) -> Vec<(usize, usize)> {
    assert!(chunk > 0, "chunk size must be positive");
    let mut out = Vec::with_capacity(len / chunk + 1);
    let mut start = 0;
    while start < len {
        let end = (start + chunk).min(len);
        out.push((start, end));
        start = end;
    }
    out
}
