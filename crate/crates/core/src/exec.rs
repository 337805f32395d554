//! Data-parallel map with a sequential fallback.
//!
//! Results always come back in index order, so reductions over them are
//! bit-identical whatever the worker count.

use serde::Serialize;

/// Worker-count override read by [`Execution::from_env`].
pub const WORKERS_ENV: &str = "ORIENT_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Execution {
    Sequential,
    /// Global rayon pool.
    #[default]
    Parallel,
    Workers(usize),
}

impl Execution {
    pub fn from_workers(workers: Option<usize>) -> Self {
        match workers {
            Some(0) | None => Execution::Parallel,
            Some(1) => Execution::Sequential,
            Some(n) => Execution::Workers(n),
        }
    }

    /// `ORIENT_WORKERS` when set and parseable, else the global pool.
    pub fn from_env() -> Self {
        let workers = std::env::var(WORKERS_ENV).ok().and_then(|v| v.trim().parse().ok());
        Self::from_workers(workers)
    }

    pub fn is_parallel(&self) -> bool {
        cfg!(feature = "parallel") && !matches!(self, Execution::Sequential)
    }
}

pub fn map_indexed<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        match exec {
            Execution::Sequential => (0..n).map(f).collect(),
            Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
            Execution::Workers(w) => match rayon::ThreadPoolBuilder::new().num_threads(w).build() {
                Ok(pool) => pool.install(|| (0..n).into_par_iter().map(&f).collect()),
                Err(_) => (0..n).map(f).collect(),
            },
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = exec;
        (0..n).map(f).collect()
    }
}
