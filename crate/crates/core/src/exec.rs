//! Choice between the rayon-backed and the sequential implementation of the
//! enumeration loops. Without the `parallel` feature every mode runs
//! sequentially.

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Map `0..count` through `map` and fold the results with `combine`.
    ///
    /// `combine` must be associative with `identity` as neutral element; the
    /// result is then independent of how the range is split.
    pub fn map_reduce<T, M, I, C>(self, count: u64, identity: I, map: M, combine: C) -> T
    where
        T: Send,
        M: Fn(u64) -> Option<T> + Sync + Send,
        I: Fn() -> T + Sync + Send,
        C: Fn(T, T) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return (0..count)
                .into_par_iter()
                .fold(&identity, |acc, i| match map(i) {
                    Some(item) => combine(acc, item),
                    None => acc,
                })
                .reduce(&identity, &combine);
        }
        (0..count).fold(identity(), |acc, i| match map(i) {
            Some(item) => combine(acc, item),
            None => acc,
        })
    }

    /// Order-preserving map over a slice.
    pub fn map_slice<S, T, F>(self, items: &[S], f: F) -> Vec<T>
    where
        S: Sync,
        T: Send,
        F: Fn(&S) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }
}

/// Size the global rayon pool. Ignored without the `parallel` feature or if
/// the pool was already initialized.
pub fn configure_threads(threads: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
}
