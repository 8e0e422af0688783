//! Instance-level parallelism. With the `parallel` feature, maps run on the
//! rayon pool; without it everything is sequential. Results always come back
//! in input order, so output never depends on scheduling.

use std::sync::Once;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "QSSA_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// `Parallel` when compiled with rayon support, otherwise `Sequential`.
    pub fn available() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

static INIT: Once = Once::new();

/// Sizes the global pool from `QSSA_THREADS` if set. Only the first call
/// has any effect; returns the configured count.
pub fn init_threads_from_env() -> Option<usize> {
    let n = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0);
    INIT.call_once(|| {
        #[cfg(feature = "parallel")]
        if let Some(n) = n {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    });
    n
}

/// `f(0), …, f(n−1)` in order.
pub fn map_range<R, F>(exec: Execution, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}
