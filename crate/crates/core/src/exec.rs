//! Execution strategy for batch samplers.
//!
//! Batch samplers describe the work as "evaluate `f(i)` for `i in 0..n`" and
//! hand it to an [`Executor`]. Sample `i` always draws from stream `i`, so
//! any executor that preserves index order returns identical results.

use alloc::vec::Vec;

pub trait Executor {
    /// Evaluates `f` on `0..n` and returns the results in index order.
    fn map_indexed<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs everything on the calling thread.
#[derive(Debug, Default, Clone, Copy)]
pub struct Sequential;

impl Executor for Sequential {
    fn map_indexed<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).map(f).collect()
    }
}
