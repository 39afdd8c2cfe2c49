//! Replica-parallel evaluation with results in replica order.

use rayon::prelude::*;

use crate::error::Result;

/// Evaluates `f(0..n)` on the current rayon pool. The output is indexed by
/// replica, so whatever is folded over it afterwards does not depend on the
/// number of threads or on scheduling.
pub fn replica_map<R, F>(n: u64, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64) -> R + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Like [`replica_map`] for fallible work. Returns the error of the lowest
/// failing replica.
pub fn try_replica_map<R, F>(n: u64, f: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(u64) -> Result<R> + Sync + Send,
{
    replica_map(n, f).into_iter().collect()
}
