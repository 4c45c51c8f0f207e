//! Execution strategy for the data-parallel inner loops (snippet scoring,
//! per-fold evaluation, gradient accumulation).
//!
//! Every helper here returns results in input order, and reductions are
//! performed over fixed-size chunks whose partial sums are combined
//! sequentially. Output is therefore bit-identical whatever the thread count.
//! Without the `parallel` feature, [`Execution::Parallel`] runs sequentially.

use serde::{Deserialize, Serialize};

/// Number of items folded into one partial sum by [`Execution::chunked_sum`].
pub const REDUCE_CHUNK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Maps `f` over `items`, collecting in input order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Maps `f` over `0..n`, collecting in index order.
    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Fallible variant of [`Execution::map`]; the first error in input order wins.
    pub fn try_map<T, R, E, F>(self, items: &[T], f: F) -> Result<Vec<R>, E>
    where
        T: Sync,
        R: Send,
        E: Send,
        F: Fn(&T) -> Result<R, E> + Sync + Send,
    {
        self.map(items, f).into_iter().collect()
    }

    /// Sums per-chunk accumulators produced by `chunk_fn`.
    ///
    /// `chunk_fn` receives a chunk of at most [`REDUCE_CHUNK`] items and
    /// returns an accumulator; accumulators are combined left to right with
    /// `combine`, so the floating-point summation order never depends on
    /// scheduling.
    pub fn chunked_sum<T, A, F, C>(self, items: &[T], chunk_fn: F, init: A, combine: C) -> A
    where
        T: Sync,
        A: Send,
        F: Fn(&[T]) -> A + Sync + Send,
        C: Fn(A, A) -> A,
    {
        let chunks: Vec<&[T]> = items.chunks(REDUCE_CHUNK).collect();
        self.map(&chunks, |c| chunk_fn(c))
            .into_iter()
            .fold(init, combine)
    }
}

/// Runs `f` inside a pool of `threads` workers (0 = rayon default).
///
/// Without the `parallel` feature this simply calls `f`.
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(f),
            Err(e) => {
                log::warn!("could not build a {threads}-thread pool ({e}); using the global pool");
                f()
            }
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        f()
    }
}
