//! Batch executor: rayon work-stealing when the `parallel` feature is on,
//! a plain sequential loop otherwise (or when one worker is requested).
//!
//! `map` always returns results in input order, so any reduction performed
//! over its output is independent of scheduling.

use crate::Result;

pub struct Executor {
    #[cfg(feature = "parallel")]
    pool: Option<rayon::ThreadPool>,
}

impl Executor {
    /// Runs everything on the calling thread.
    pub fn sequential() -> Self {
        Executor {
            #[cfg(feature = "parallel")]
            pool: None,
        }
    }

    /// `jobs == 0` picks the number of logical CPUs, `jobs == 1` is sequential.
    pub fn with_jobs(jobs: usize) -> Result<Self> {
        if jobs == 1 {
            return Ok(Self::sequential());
        }
        #[cfg(feature = "parallel")]
        {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| crate::Error::ThreadPool(e.to_string()))?;
            Ok(Executor { pool: Some(pool) })
        }
        #[cfg(not(feature = "parallel"))]
        {
            log::debug!("built without `parallel`; ignoring jobs={jobs}");
            Ok(Self::sequential())
        }
    }

    pub fn is_parallel(&self) -> bool {
        #[cfg(feature = "parallel")]
        {
            self.pool.is_some()
        }
        #[cfg(not(feature = "parallel"))]
        {
            false
        }
    }

    pub fn workers(&self) -> usize {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            return pool.current_num_threads();
        }
        1
    }

    /// Order-preserving map over `items`.
    pub fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            use rayon::prelude::*;
            return pool.install(|| items.par_iter().map(&f).collect());
        }
        items.iter().map(f).collect()
    }
}

impl Default for Executor {
    fn default() -> Self {
        Self::sequential()
    }
}
