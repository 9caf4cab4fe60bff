//! Execution strategy for the data-parallel loops.
//!
//! Every parallel entry point in the crate takes an [`Execution`]. Results
//! never depend on the strategy: parallel maps preserve input order and
//! reductions only use commutative integer addition.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Execution {
    Sequential,
    /// Falls back to sequential when the `parallel` feature is off.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Order-preserving map.
    pub fn map<T, U, F>(self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Order-preserving map over `0..n`.
    pub fn map_range<U, F>(self, n: usize, f: F) -> Vec<U>
    where
        U: Send,
        F: Fn(usize) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Folds fixed-size chunks into partial accumulators, then merges them in
    /// chunk order.
    pub fn fold_chunks<T, A, F, M>(self, items: &[T], chunk: usize, init: A, fold: F, merge: M) -> A
    where
        T: Sync,
        A: Clone + Send + Sync,
        F: Fn(A, &[T]) -> A + Sync + Send,
        M: Fn(A, A) -> A + Sync + Send,
    {
        let chunk = chunk.max(1);
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            let parts: Vec<A> = items
                .par_chunks(chunk)
                .map(|c| fold(init.clone(), c))
                .collect();
            return parts.into_iter().fold(init, &merge);
        }
        let parts: Vec<A> = items.chunks(chunk).map(|c| fold(init.clone(), c)).collect();
        parts.into_iter().fold(init, merge)
    }
}
