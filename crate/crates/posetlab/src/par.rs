//! Data-parallel scan kernels with a sequential fallback. The `parallel`
//! feature (on by default) routes the exhaustive scans through rayon;
//! without it the same kernels run sequentially. All folds used here are
//! associative with an identity, so results are schedule-independent.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Caps the worker pool; a no-op without the `parallel` feature or after
/// the pool has started.
pub fn configure_threads(threads: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
    }
}

/// Map-reduce over a contiguous `u64` range. `fold` must be associative
/// and `identity` its neutral element.
pub fn map_reduce_range<T, M, F, I>(range: std::ops::Range<u64>, identity: I, map: M, fold: F) -> T
where
    T: Send,
    M: Fn(u64) -> T + Sync + Send,
    F: Fn(T, T) -> T + Sync + Send,
    I: Fn() -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        range
            .into_par_iter()
            .fold(&identity, |acc, i| fold(acc, map(i)))
            .reduce(&identity, &fold)
    }
    #[cfg(not(feature = "parallel"))]
    {
        range.fold(identity(), |acc, i| fold(acc, map(i)))
    }
}

/// Sequential twin of [`map_reduce_range`], kept unconditionally so the
/// bench suite can compare both paths in one build.
pub fn map_reduce_range_seq<T, M, F, I>(
    range: std::ops::Range<u64>,
    identity: I,
    map: M,
    fold: F,
) -> T
where
    M: Fn(u64) -> T,
    F: Fn(T, T) -> T,
    I: Fn() -> T,
{
    range.fold(identity(), |acc, i| fold(acc, map(i)))
}

/// Independent per-item jobs collected in input order.
pub fn map_vec<X, T, M>(items: &[X], map: M) -> Vec<T>
where
    X: Sync,
    T: Send,
    M: Fn(&X) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(map).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(map).collect()
    }
}
