//! Order-preserving data-parallel map.
//!
//! With the `parallel` feature (default) work is spread over a rayon pool of
//! the requested size; without it, or when a single worker is requested, the
//! map runs on the calling thread. Results always come back in input order.

/// Worker count. `0` means "one per available core".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Workers(pub usize);

impl Workers {
    pub const SEQUENTIAL: Workers = Workers(1);

    pub fn is_sequential(self) -> bool {
        self.0 == 1 || !cfg!(feature = "parallel")
    }
}

pub fn map_ordered<T, U, F>(items: &[T], workers: Workers, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    if workers.is_sequential() {
        return items.iter().map(f).collect();
    }
    imp::map_ordered(items, workers, f)
}

/// Fallible variant; the first error in input order wins.
pub fn try_map_ordered<T, U, E, F>(items: &[T], workers: Workers, f: F) -> Result<Vec<U>, E>
where
    T: Sync,
    U: Send,
    E: Send,
    F: Fn(&T) -> Result<U, E> + Sync + Send,
{
    map_ordered(items, workers, f).into_iter().collect()
}

#[cfg(feature = "parallel")]
mod imp {
    use super::Workers;
    use rayon::prelude::*;

    pub(super) fn map_ordered<T, U, F>(items: &[T], workers: Workers, f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        match rayon::ThreadPoolBuilder::new().num_threads(workers.0).build() {
            Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
            Err(err) => {
                log::warn!("could not build a {}-thread pool ({err}); running sequentially", workers.0);
                items.iter().map(f).collect()
            }
        }
    }
}

#[cfg(not(feature = "parallel"))]
mod imp {
    use super::Workers;

    pub(super) fn map_ordered<T, U, F>(items: &[T], _workers: Workers, f: F) -> Vec<U>
    where
        F: Fn(&T) -> U,
    {
        items.iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved_for_any_worker_count() {
        let items: Vec<u64> = (0..10_000).collect();
        let seq = map_ordered(&items, Workers::SEQUENTIAL, |x| x * 3 + 1);
        for w in [0, 2, 4, 7] {
            assert_eq!(map_ordered(&items, Workers(w), |x| x * 3 + 1), seq);
        }
    }

    #[test]
    fn first_error_in_input_order() {
        let items: Vec<i32> = (0..100).collect();
        let res: Result<Vec<i32>, i32> =
            try_map_ordered(&items, Workers(4), |&x| if x % 30 == 29 { Err(x) } else { Ok(x) });
        assert_eq!(res, Err(29));
    }
}
