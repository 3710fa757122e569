//! Fan-out of independent work items.
//!
//! Every parallelizable loop in the crate is expressed as "evaluate `f(i)` for
//! `i in 0..len` and collect in index order". Reductions happen afterwards on
//! the ordered vector, so an executor only decides *where* items run, never
//! what the result is.

use alloc::vec::Vec;

pub trait Executor: Sync {
    /// Evaluates `f` on `0..len` and returns the results in index order.
    fn map<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs everything on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..len).map(f).collect()
    }
}
