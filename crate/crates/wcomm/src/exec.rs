//! Parallel/sequential execution switch.
//!
//! With the default `parallel` feature the heavy sweeps run on rayon;
//! without it the sequential fallbacks are the only paths compiled. The
//! sequential code is always present and always produces identical results
//! (parallel candidates are re-sorted deterministically before they are
//! committed), so the override below exists for benchmarking and debugging,
//! not for correctness.

use std::sync::atomic::{AtomicU8, Ordering};

/// 0 = follow the feature default, 1 = force sequential, 2 = force parallel.
static OVERRIDE: AtomicU8 = AtomicU8::new(0);

/// Force the execution mode: `Some(false)` = sequential, `Some(true)` =
/// parallel (a no-op without the `parallel` feature), `None` = feature
/// default. Used by the benchmark suite to compare both paths.
pub fn set_parallel_override(mode: Option<bool>) {
    let v = match mode {
        None => 0,
        Some(false) => 1,
        Some(true) => 2,
    };
    OVERRIDE.store(v, Ordering::Relaxed);
}

/// Pin the worker-thread count: `0` or `1` forces the sequential paths;
/// larger values size the global pool. Sizing can only happen before the
/// pool's first use — a late call reports the problem instead of
/// changing anything.
#[cfg(feature = "parallel")]
pub fn set_thread_count(n: usize) -> Result<(), String> {
    if n <= 1 {
        set_parallel_override(Some(false));
        return Ok(());
    }
    set_parallel_override(Some(true));
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

/// Without the `parallel` feature only the sequential paths exist, so any
/// requested count runs on one thread.
#[cfg(not(feature = "parallel"))]
pub fn set_thread_count(_n: usize) -> Result<(), String> {
    set_parallel_override(Some(false));
    Ok(())
}

/// Should data-parallel paths be taken right now?
pub fn parallel() -> bool {
    match OVERRIDE.load(Ordering::Relaxed) {
        1 => false,
        2 => cfg!(feature = "parallel"),
        _ => cfg!(feature = "parallel"),
    }
}
