//! Order-preserving parallel map on a dedicated thread pool.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Applies `f` to `0..n` on `workers` threads and returns the results in index order.
///
/// Each item is computed independently, so the output does not depend on `workers`.
pub fn par_map<T, F>(workers: usize, n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    if workers <= 1 {
        return (0..n).map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Unsupported(format!("cannot start thread pool: {e}")))?;
    pool.install(|| (0..n).into_par_iter().map(f).collect())
}

/// Number of worker threads to use when the caller does not say.
pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, usize::from)
}
