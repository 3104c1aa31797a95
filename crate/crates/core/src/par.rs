//! Order-preserving map that runs on the rayon pool when the `parallel`
//! feature is enabled and the caller asks for it.

/// Below this many items the sequential path is always taken.
const MIN_PARALLEL_ITEMS: usize = 64;

pub fn map_ordered<T, U, F>(items: &[T], parallel: bool, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    map_ordered_min(items, parallel, MIN_PARALLEL_ITEMS, f)
}

/// Like [`map_ordered`] for expensive items (such as whole loop
/// continuations), where two items already justify the pool.
pub fn map_ordered_coarse<T, U, F>(items: &[T], parallel: bool, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    map_ordered_min(items, parallel, 2, f)
}

fn map_ordered_min<T, U, F>(items: &[T], parallel: bool, min: usize, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if parallel && items.len() >= min {
            return items.par_iter().map(f).collect();
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = (parallel, min);
    items.iter().map(f).collect()
}

/// Whether parallel execution is compiled in.
pub const fn available() -> bool {
    cfg!(feature = "parallel")
}
