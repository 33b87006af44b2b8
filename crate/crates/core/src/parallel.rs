//! Worker-pool control.
//!
//! Training and cross-validation parallelize internally with rayon. Running
//! them inside [`with_workers`] pins the pool size; results are identical
//! for any worker count because every random draw is keyed by seed and
//! index, never by scheduling order.

use rayon::ThreadPoolBuilder;

/// Runs `f` inside a rayon pool with `workers` threads (0 = all available).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("worker pool")
        .install(f)
}
