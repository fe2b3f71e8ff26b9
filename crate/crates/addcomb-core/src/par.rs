//! Thin dispatch layer between the rayon and sequential code paths.
//!
//! Every reduction routed through here is over exact integer or rational
//! values with commutative, associative combine steps, so the parallel and
//! sequential paths return bit-identical results (and results do not depend
//! on the number of worker threads).

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Order-preserving map over a slice.
pub fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
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

/// Order-preserving map over an index range.
pub fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Sums `f` over fixed-size chunks of `items`. The chunking is independent
/// of the thread count and u128 addition commutes, so the result is exact
/// and deterministic either way.
pub fn sum_chunks_u128<T, F>(items: &[T], chunk: usize, f: F) -> u128
where
    T: Sync,
    F: Fn(&[T]) -> u128 + Sync + Send,
{
    debug_assert!(chunk > 0);
    #[cfg(feature = "parallel")]
    {
        items.par_chunks(chunk).map(f).sum()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.chunks(chunk).map(f).sum()
    }
}

/// Chunk size used by the pair-enumeration kernels.
pub const PAIR_CHUNK: usize = 256;
