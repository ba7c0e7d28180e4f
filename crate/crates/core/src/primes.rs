//! Prime enumeration by a segmented sieve of Eratosthenes, plus the
//! deterministic segment-parallel driver used by every prime sum.

use rayon::prelude::*;

use crate::Parallelism;

/// All primes `<= limit` by a plain sieve. Used for base primes and small
/// factor bases.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i.saturating_mul(i);
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

pub(crate) fn isqrt(n: u64) -> u64 {
    num_integer::Roots::sqrt(&n)
}

/// Closed ranges `[lo, hi]` of fixed width covering `[2, limit]`.
///
/// The cut points depend only on `segment_size`, never on the worker count,
/// so per-segment partial results fold to bit-identical totals.
pub fn segments(limit: u64, segment_size: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    if limit < 2 {
        return out;
    }
    let size = segment_size.max(1);
    let mut lo = 0u64;
    while lo <= limit {
        let hi = lo.saturating_add(size - 1).min(limit);
        out.push((lo.max(2), hi));
        if hi == limit {
            break;
        }
        lo = hi + 1;
    }
    out.retain(|&(lo, hi)| lo <= hi);
    out
}

/// Primes in `[lo, hi]`, given every prime up to `sqrt(hi)`.
pub fn primes_in_range(lo: u64, hi: u64, base: &[u64]) -> Vec<u64> {
    if hi < 2 || lo > hi {
        return Vec::new();
    }
    let lo = lo.max(2);
    let len = (hi - lo + 1) as usize;
    let mut composite = vec![false; len];
    for &p in base {
        if p.saturating_mul(p) > hi {
            break;
        }
        let start = (p * p).max(lo.div_ceil(p) * p);
        let mut m = start;
        while m <= hi {
            composite[(m - lo) as usize] = true;
            m += p;
        }
    }
    composite
        .iter()
        .enumerate()
        .filter(|(_, &c)| !c)
        .map(|(i, _)| lo + i as u64)
        .collect()
}

/// Runs `work` over the primes of each segment of `[2, limit]` and returns
/// the per-segment results in ascending segment order.
pub fn map_prime_segments<T, F>(limit: u64, par: &Parallelism, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(&[u64]) -> T + Sync,
{
    let base = primes_up_to(isqrt(limit));
    let segs = segments(limit, par.segment_size);
    par.install(|| {
        segs.par_iter()
            .map(|&(lo, hi)| work(&primes_in_range(lo, hi, &base)))
            .collect()
    })
}

/// Every prime `<= limit`, in order.
pub fn primes_segmented(limit: u64, par: &Parallelism) -> Vec<u64> {
    map_prime_segments(limit, par, |ps| ps.to_vec())
        .into_iter()
        .flatten()
        .collect()
}
