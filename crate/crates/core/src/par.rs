//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the helpers run on the rayon pool; otherwise,
//! or when [`Parallelism::Sequential`] is requested, they run in order on the
//! calling thread. Results are always returned in index order.

use std::sync::atomic::{AtomicU8, Ordering};

/// Execution strategy for data-parallel loops.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    Rayon,
}

static MODE: AtomicU8 = AtomicU8::new(1);

/// Sets the process-wide default strategy.
pub fn set_default(mode: Parallelism) {
    MODE.store(matches!(mode, Parallelism::Rayon) as u8, Ordering::Relaxed);
}

/// The process-wide default strategy.
pub fn default_mode() -> Parallelism {
    if cfg!(feature = "parallel") && MODE.load(Ordering::Relaxed) == 1 {
        Parallelism::Rayon
    } else {
        Parallelism::Sequential
    }
}

/// Configures the global rayon pool size. Ignored without the feature.
pub fn init_threads(threads: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
}

/// Maps `f` over `0..n` and collects in index order.
pub fn map_range<T, F>(n: usize, mode: Parallelism, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        Parallelism::Rayon => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// Maps `f` over a slice and collects in order.
pub fn map_slice<S, T, F>(items: &[S], mode: Parallelism, f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        Parallelism::Rayon => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

/// Splits `0..n` into chunks, maps each chunk, and returns per-chunk results
/// in order. Chunk boundaries do not depend on the strategy.
pub fn map_chunks<T, F>(n: usize, chunk: usize, mode: Parallelism, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(std::ops::Range<usize>) -> T + Sync + Send,
{
    let chunk = chunk.max(1);
    let count = n.div_ceil(chunk);
    map_range(count, mode, |i| f(i * chunk..((i + 1) * chunk).min(n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        let a = map_range(1000, Parallelism::Sequential, |i| i * i);
        let b = map_range(1000, Parallelism::Rayon, |i| i * i);
        assert_eq!(a, b);
        let c: Vec<usize> = map_chunks(1000, 64, Parallelism::Rayon, |r| r.sum());
        assert_eq!(c.iter().sum::<usize>(), (0..1000).sum());
    }
}
