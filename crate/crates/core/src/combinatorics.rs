//! Partition shapes and weak compositions of `N` electors over `M` parties.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::model::{PartitionShape, Tally};
use crate::numeric;

/// Default ceiling on the number of compositions an exhaustive pass may visit.
pub const DEFAULT_ENUMERATION_CAP: u64 = 100_000_000;

/// All partition shapes of `n` into `m` parts (zeros allowed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSet {
    pub n: u64,
    pub m: usize,
    pub shapes: Vec<PartitionShape>,
}

impl PartitionSet {
    pub fn cardinality(&self) -> usize {
        self.shapes.len()
    }
}

fn check_args(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidArguments("at least one part is required".into()));
    }
    Ok(())
}

/// Partitions of `n` into at most `m` parts, zero-padded to length `m`,
/// largest first part first.
pub fn enumerate_partitions(n: u64, m: usize) -> Result<PartitionSet> {
    check_args(m)?;
    let mut shapes = Vec::new();
    let mut parts = Vec::with_capacity(m);
    fill_partitions(n, m, n, &mut parts, &mut shapes);
    Ok(PartitionSet { n, m, shapes })
}

fn fill_partitions(
    remaining: u64,
    slots: usize,
    max_part: u64,
    parts: &mut Vec<u64>,
    out: &mut Vec<PartitionShape>,
) {
    if slots == 0 {
        if remaining == 0 {
            out.push(PartitionShape::from_counts(parts));
        }
        return;
    }
    // The remaining slots can hold at most slots * first.
    let min_first = remaining.div_ceil(slots as u64);
    let max_first = remaining.min(max_part);
    if min_first > max_first {
        return;
    }
    for first in (min_first..=max_first).rev() {
        parts.push(first);
        fill_partitions(remaining - first, slots - 1, first, parts, out);
        parts.pop();
    }
}

/// Number of partitions of `n` into at most `m` parts.
pub fn partition_count(n: u64, m: usize) -> Result<BigUint> {
    check_args(m)?;
    let n = usize::try_from(n).map_err(|_| Error::InvalidArguments("n too large".into()))?;
    let m = m.min(n.max(1));
    // row[j] = partitions of j into parts of size ≤ k, built up over k.
    let mut row = vec![BigUint::ZERO; n + 1];
    row[0] = BigUint::one();
    for k in 1..=m {
        for j in k..=n {
            let (lo, hi) = row.split_at_mut(j);
            hi[0] += &lo[j - k];
        }
    }
    Ok(row.swap_remove(n))
}

/// `binomial(n + m − 1, m − 1)`, the number of ordered tallies.
pub fn composition_count(n: u64, m: usize) -> Result<BigUint> {
    check_args(m)?;
    Ok(numeric::binomial(n + m as u64 - 1, m as u64 - 1))
}

/// Fails with [`Error::EnumerationTooLarge`] when the composition space
/// exceeds `cap`.
pub fn check_cap(n: u64, m: usize, cap: u64) -> Result<BigUint> {
    let required = composition_count(n, m)?;
    if required > BigUint::from(cap) {
        return Err(Error::EnumerationTooLarge { required, cap });
    }
    Ok(required)
}

/// Lazy iterator over the weak compositions of `n` into `m` parts in
/// colexicographic order: `[n,0,…,0]` first, `[0,…,0,n]` last.
///
/// Only the first `free` coordinates move; any trailing coordinates stay at
/// their initial values. That lets a caller carve the space into disjoint
/// slices by fixing the last count.
#[derive(Debug, Clone)]
pub struct Compositions {
    counts: Vec<u64>,
    free: usize,
    started: bool,
    done: bool,
}

impl Compositions {
    pub fn new(n: u64, m: usize) -> Result<Self> {
        check_args(m)?;
        let mut counts = vec![0; m];
        counts[0] = n;
        Ok(Self { counts, free: m, started: false, done: false })
    }

    /// Compositions whose last count equals `last` (requires `m ≥ 2`).
    pub fn with_last(n: u64, m: usize, last: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArguments("fixing the last count needs m ≥ 2".into()));
        }
        let mut counts = vec![0; m];
        let done = last > n;
        if !done {
            counts[0] = n - last;
            counts[m - 1] = last;
        }
        Ok(Self { counts, free: m - 1, started: false, done })
    }

    /// Advances and borrows the next composition without allocating.
    pub fn next_counts(&mut self) -> Option<&[u64]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.counts);
        }
        let free = &mut self.counts[..self.free];
        match free.iter().position(|&c| c > 0) {
            Some(i) if i + 1 < free.len() => {
                let v = free[i];
                free[i] = 0;
                free[i + 1] += 1;
                free[0] = v - 1;
                Some(&self.counts)
            }
            _ => {
                self.done = true;
                None
            }
        }
    }
}

impl Iterator for Compositions {
    type Item = Tally;

    fn next(&mut self) -> Option<Tally> {
        self.next_counts().map(|c| Tally::new(c.to_vec()))
    }
}

/// Every tally of `n` electors over `m` parties, streamed lazily.
/// Refuses spaces larger than `cap`.
pub fn enumerate_compositions(n: u64, m: usize, cap: u64) -> Result<Compositions> {
    check_cap(n, m, cap)?;
    Compositions::new(n, m)
}

/// `M! / Π_v mult(v)!` over the distinct values `v` of the shape (zeros
/// included): the number of distinct tallies sharing this shape.
pub fn permutation_count(shape: &PartitionShape) -> BigUint {
    let mut multiplicities: BTreeMap<u64, u64> = BTreeMap::new();
    for &part in shape.parts() {
        *multiplicities.entry(part).or_default() += 1;
    }
    let denom = multiplicities
        .values()
        .fold(BigUint::one(), |acc, &k| acc * numeric::factorial(k));
    numeric::factorial(shape.len() as u64) / denom
}
