//! Sequential or data-parallel execution of independent work items.
//!
//! With the `parallel` feature (on by default) `Exec::Parallel` dispatches
//! through rayon. Without it every strategy runs sequentially, so callers
//! never need their own `cfg` guards. Results always come back in input
//! order, which keeps reports deterministic.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution strategy for the engine's inner loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// True when work will actually be spread over the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Ordered map over a slice.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Ordered map over an index range.
    pub fn map_range<R, F>(self, range: std::ops::Range<usize>, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return range.into_par_iter().map(f).collect();
        }
        range.map(f).collect()
    }
}
