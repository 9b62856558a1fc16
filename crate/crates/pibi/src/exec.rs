//! Data-parallel map helpers.
//!
//! Independent jobs (restarts, partitions, grid points, SDP instances) run
//! through [`map_collect`]. With the `parallel` feature the map is dispatched
//! on the rayon pool; without it the sequential path below runs. Results come
//! back in input order, so reductions downstream are deterministic either way.

/// Sequential map, always compiled; the fallback and the baseline for benches.
pub fn map_collect_serial<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    F: Fn(T) -> R,
{
    items.into_iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_collect<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_collect<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    F: Fn(T) -> R,
{
    map_collect_serial(items, f)
}

/// Index of the minimum in a slice of partially ordered keys, first wins ties.
pub fn argmin_by_key<T, K: PartialOrd>(items: &[T], key: impl Fn(&T) -> K) -> Option<usize> {
    if items.is_empty() {
        return None;
    }
    let mut best = 0;
    let mut best_key = key(&items[0]);
    for (i, it) in items.iter().enumerate().skip(1) {
        let k = key(it);
        if k < best_key {
            best = i;
            best_key = k;
        }
    }
    Some(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_serial_agree() {
        let items: Vec<u64> = (0..200).collect();
        let a = map_collect(items.clone(), |x| x * x + 1);
        let b = map_collect_serial(items, |x| x * x + 1);
        assert_eq!(a, b);
    }

    #[test]
    fn argmin_breaks_ties_first() {
        let v = [(2.0, 'a'), (1.0, 'b'), (1.0, 'c')];
        assert_eq!(argmin_by_key(&v, |t| t.0), Some(1));
    }
}
