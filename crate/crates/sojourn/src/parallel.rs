//! Rayon-backed executor.

use anyhow::Context;
use rayon::prelude::*;
use sojourn_core::Executor;

pub struct Parallel {
    pool: rayon::ThreadPool,
}

impl Parallel {
    /// `threads = None` uses the available parallelism.
    pub fn new(threads: Option<usize>) -> anyhow::Result<Self> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            anyhow::ensure!(n > 0, "--threads must be positive");
            builder = builder.num_threads(n);
        }
        let pool = builder.build().context("building the worker pool")?;
        Ok(Self { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for Parallel {
    fn map_indexed<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..n).into_par_iter().map(f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use sojourn_core::occupation::simulate_occupation;
    use sojourn_core::{ProcessModel, Sequential};

    #[test]
    fn matches_sequential() {
        let par = Parallel::new(Some(3)).unwrap();
        assert_eq!(par.threads(), 3);
        let model = ProcessModel::BrownianDrift { mu: 0.5 };
        let a = simulate_occupation(&model, 1.0, 128, 500, 9, &par).unwrap();
        let b = simulate_occupation(&model, 1.0, 128, 500, 9, &Sequential).unwrap();
        assert_eq!(a, b);
        assert_eq!(par.map_indexed(5, |i| i * i), vec![0, 1, 4, 9, 16]);
    }

    #[test]
    fn zero_threads_rejected() {
        assert!(Parallel::new(Some(0)).is_err());
    }
}
