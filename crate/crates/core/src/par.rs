//! Execution backends for the data-parallel loops.
//!
//! Every parallel loop in the crate maps an index range to independent
//! results. Each result is computed by the same sequential code on either
//! backend, so outputs are bit-identical regardless of backend or thread
//! count. Without the `parallel` feature only [`Backend::Sequential`]
//! exists and [`Backend::default`] resolves to it.

/// Strategy for running independent per-index work.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Backend {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Backend::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            Backend::Sequential
        }
    }
}

impl Backend {
    /// All backends compiled into this build.
    pub fn available() -> &'static [Backend] {
        #[cfg(feature = "parallel")]
        {
            &[Backend::Sequential, Backend::Parallel]
        }
        #[cfg(not(feature = "parallel"))]
        {
            &[Backend::Sequential]
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Backend::Sequential => "sequential",
            #[cfg(feature = "parallel")]
            Backend::Parallel => "parallel",
        }
    }

    /// Evaluates `f(i)` for `i in 0..n` and collects the results in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Send + Sync,
    {
        match self {
            Backend::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Backend::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
        }
    }

    /// Like [`Backend::map`] for fallible work; the first error in index order wins.
    pub fn try_map<T, E, F>(self, n: usize, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize) -> Result<T, E> + Send + Sync,
    {
        self.map(n, f).into_iter().collect()
    }
}

/// Caps the global worker pool at `threads` workers (0 = let rayon decide).
///
/// Returns `false` if the pool had already been initialised.
#[cfg(feature = "parallel")]
pub fn init_thread_pool(threads: usize) -> bool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backends_agree_in_order() {
        for &b in Backend::available() {
            let v = b.map(100, |i| (i as f64).sqrt());
            assert_eq!(v.len(), 100);
            assert_eq!(v[81], 9.0);
        }
    }

    #[test]
    fn try_map_reports_first_error() {
        let r: Result<Vec<usize>, usize> =
            Backend::default().try_map(10, |i| if i >= 4 { Err(i) } else { Ok(i) });
        assert_eq!(r, Err(4));
    }
}
