//! Index-range parallelism with a sequential fallback.
//!
//! With the `parallel` feature (on by default) the helpers below split work
//! over rayon's pool; without it they run in order on the calling thread.
//! Results are always returned in index order, so output never depends on
//! the worker count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..len`, keeping index order.
pub fn map_range<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Maps `f` over a slice, keeping order.
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Keeps the items of a slice for which `keep` holds, in order.
pub fn filter_slice<S, F>(items: &[S], keep: F) -> Vec<S>
where
    S: Sync + Send + Clone,
    F: Fn(&S) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().filter(|s| keep(s)).cloned().collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().filter(|s| keep(s)).cloned().collect()
    }
}

/// The first index in `0..len` (lowest, regardless of scheduling) where `f`
/// returns `Some`, together with its value.
pub fn find_first<T, F>(len: usize, f: F) -> Option<T>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().filter_map(f).find_first(|_| true)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).find_map(f)
    }
}

/// Sum of `f` over `0..len`.
pub fn sum_range<F>(len: usize, f: F) -> u64
where
    F: Fn(usize) -> u64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(f).sum()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).sum()
    }
}
