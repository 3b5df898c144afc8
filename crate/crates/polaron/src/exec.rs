//! Data-parallel helpers. With the default `parallel` feature the maps run
//! on rayon; without it they fall back to sequential iteration, keeping the
//! public API identical. Results are ordered by input index either way, so
//! output never depends on scheduling.

/// Build a rayon thread pool honoring the `POLARON_THREADS` cap.
#[cfg(feature = "parallel")]
pub fn thread_pool() -> rayon::ThreadPool {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads_from_env() {
        builder = builder.num_threads(n);
    }
    builder.build().expect("thread pool construction")
}

/// Run `f` with the `POLARON_THREADS` cap applied to all parallel maps
/// inside it; without the `parallel` feature this is a plain call.
#[cfg(feature = "parallel")]
pub fn with_thread_cap<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    thread_pool().install(f)
}

#[cfg(not(feature = "parallel"))]
pub fn with_thread_cap<R>(f: impl FnOnce() -> R) -> R {
    f()
}

pub fn threads_from_env() -> Option<usize> {
    std::env::var("POLARON_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Parallel (or sequential) map over a slice, preserving order.
#[cfg(feature = "parallel")]
pub fn pmap<I: Sync, O: Send>(items: &[I], f: impl Fn(&I) -> O + Sync + Send) -> Vec<O> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn pmap<I: Sync, O: Send>(items: &[I], f: impl Fn(&I) -> O + Sync + Send) -> Vec<O> {
    items.iter().map(f).collect()
}
