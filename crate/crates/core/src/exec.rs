//! Execution strategy for the data-parallel loops.
//!
//! Every hot loop in the crate (confusion-index construction, triple sampling,
//! cell enumeration, pair probing, congruence scans) is written once as a map
//! over independent chunks and dispatched through [`Exec`]. Chunk boundaries
//! and per-chunk RNG streams do not depend on the strategy, so both paths
//! produce bit-identical results.

/// How to run a data-parallel loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, otherwise runs
    /// sequentially.
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Maps `f` over `0..n` and collects results in index order.
    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            _ => (0..n).map(f).collect(),
        }
    }

    /// Maps `f` over a slice and collects results in slice order.
    pub fn map_slice<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            _ => items.iter().map(f).collect(),
        }
    }

    /// Maps `f` over the half-open chunks `[i*chunk, min((i+1)*chunk, n))`.
    pub fn map_chunks<R, F>(self, n: usize, chunk: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(std::ops::Range<usize>) -> R + Sync + Send,
    {
        assert!(chunk > 0);
        let count = n.div_ceil(chunk);
        self.map_range(count, |i| {
            let start = i * chunk;
            f(start..n.min(start + chunk))
        })
    }

    pub fn sort_unstable<T: Ord + Send>(self, v: &mut [T]) {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                v.par_sort_unstable()
            }
            _ => v.sort_unstable(),
        }
    }
}
