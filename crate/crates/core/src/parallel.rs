//! Index-range map/reduce used by every streaming estimator.
//!
//! The range is cut into fixed-size chunks independent of the worker count,
//! each chunk is mapped on its own, and the partial results are reduced in
//! chunk order. Results are therefore identical for any number of workers.

use std::ops::Range;

/// Raw indices per chunk.
pub const CHUNK: u64 = 1 << 21;

fn chunks(range: Range<u64>) -> Vec<Range<u64>> {
    let mut out = Vec::new();
    let mut lo = range.start;
    while lo < range.end {
        let hi = lo.saturating_add(CHUNK).min(range.end);
        out.push(lo..hi);
        lo = hi;
    }
    out
}

/// Worker count from `ATLAS_WORKERS`, falling back to the available cores.
pub fn default_workers() -> usize {
    std::env::var("ATLAS_WORKERS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Maps `f` over chunks of `range` on `workers` threads and folds the results
/// left to right with `reduce`. Returns `None` for an empty range.
pub fn map_reduce<T, F, R>(range: Range<u64>, workers: usize, f: F, reduce: R) -> Option<T>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync + Send,
    R: Fn(T, T) -> T,
{
    let parts = chunks(range);
    let mapped = run(parts, workers.max(1), &f);
    mapped.into_iter().reduce(reduce)
}

#[cfg(feature = "parallel")]
fn run<T, F>(parts: Vec<Range<u64>>, workers: usize, f: &F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync + Send,
{
    use rayon::prelude::*;
    if workers == 1 || parts.len() <= 1 {
        return parts.into_iter().map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| parts.into_par_iter().map(f).collect()),
        Err(_) => parts.into_iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn run<T, F>(parts: Vec<Range<u64>>, _workers: usize, f: &F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync + Send,
{
    parts.into_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunking_covers_range() {
        let c = chunks(5..(3 * CHUNK + 7));
        assert_eq!(c.len(), 4);
        assert_eq!(c[0].start, 5);
        assert_eq!(c[3].end, 3 * CHUNK + 7);
        assert!(chunks(4..4).is_empty());
    }

    #[test]
    fn order_preserved_for_any_worker_count() {
        let range = 0..(5 * CHUNK + 3);
        let collect = |w| map_reduce(range.clone(), w, |r| vec![r.start], |mut a, b| {
            a.extend(b);
            a
        });
        let one = collect(1);
        assert_eq!(collect(3), one);
        assert_eq!(collect(8), one);
        assert_eq!(map_reduce(0..0, 4, |r| r.start, |a, b| a + b), None);
    }
}
