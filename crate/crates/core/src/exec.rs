//! Execution strategy for the data-parallel folds (diagram sums, censuses,
//! oracle sweeps). With the `parallel` feature the default is a rayon
//! work-stealing fold; without it everything runs on the calling thread.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Strategy {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Strategy::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            Strategy::Sequential
        }
    }
}

impl Strategy {
    /// Map every item and fold the results with an associative, commutative
    /// `merge`. The result does not depend on the strategy as long as
    /// `merge` really is associative and commutative.
    pub fn map_reduce<I, Acc, M, R, Id>(self, items: Vec<I>, identity: Id, map: M, merge: R) -> Acc
    where
        I: Send,
        Acc: Send,
        Id: Fn() -> Acc + Sync + Send,
        M: Fn(&mut Acc, I) + Sync + Send,
        R: Fn(Acc, Acc) -> Acc + Sync + Send,
    {
        match self {
            Strategy::Sequential => {
                let _ = &merge;
                let mut acc = identity();
                for item in items {
                    map(&mut acc, item);
                }
                acc
            }
            #[cfg(feature = "parallel")]
            Strategy::Parallel => items
                .into_par_iter()
                .fold(&identity, |mut acc, item| {
                    map(&mut acc, item);
                    acc
                })
                .reduce(&identity, &merge),
        }
    }

    /// Order-preserving parallel map.
    pub fn map<I, T, F>(self, items: Vec<I>, f: F) -> Vec<T>
    where
        I: Send,
        T: Send,
        F: Fn(I) -> T + Sync + Send,
    {
        match self {
            Strategy::Sequential => items.into_iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Strategy::Parallel => items.into_par_iter().map(f).collect(),
        }
    }
}
