//! Execution strategy for the data-parallel loops (determinant grids, batch
//! rigidity sweeps, exceptional-root enumeration).
//!
//! Results are always collected in index order, so the parallel and
//! sequential paths produce bit-identical output.

/// How an indexed map is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    /// Runs on the rayon pool when the `parallel` feature is enabled and
    /// falls back to [`Exec::Sequential`] otherwise.
    #[default]
    Parallel,
}

impl Exec {
    /// Whether this strategy actually runs in parallel in the current build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Evaluates `f(0..len)` and returns the results in index order.
    pub fn map<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            use rayon::prelude::*;
            return (0..len).into_par_iter().map(f).collect();
        }
        (0..len).map(f).collect()
    }
}

/// Configures the global rayon pool. A no-op without the `parallel` feature.
pub fn set_threads(threads: usize) -> crate::Result<()> {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| crate::Error::InvalidParameter(format!("thread pool: {e}")))?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}
