//! Execution mode for the data-parallel loops.
//!
//! Every parallel loop in the crate maps over an indexed range and collects results in
//! index order, so the output never depends on the mode or on the worker count.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    /// Rayon work-stealing. Falls back to sequential without the `parallel` feature.
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

    /// `f(0), …, f(n − 1)` in index order.
    pub fn map<R, F>(self, n: usize, f: F) -> Vec<R>
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

    /// Like [`Execution::map`] but stops at the first error (the lowest failing index wins).
    pub fn try_map<R, E, F>(self, n: usize, f: F) -> Result<Vec<R>, E>
    where
        R: Send,
        E: Send,
        F: Fn(usize) -> Result<R, E> + Sync + Send,
    {
        self.map(n, f).into_iter().collect()
    }

    /// Sum of `f(i)` over `0..n`. Integer sums are exact, so order is irrelevant.
    pub fn sum_u64<F>(self, n: usize, f: F) -> u64
    where
        F: Fn(usize) -> u64 + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).sum();
        }
        (0..n).map(f).sum()
    }
}
