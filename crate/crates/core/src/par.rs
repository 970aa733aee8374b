//! Data-parallel helpers. With the `parallel` feature these run on the
//! rayon pool; without it they fall back to plain sequential iteration.
//! Results never depend on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `items`, preserving order.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Maps `f` over `0..n`, preserving order.
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Smallest `(key, index)` over `0..n` among indices where `f` yields a key.
/// Ties in `key` go to the smaller index.
pub fn min_by_key_u64<K, F>(n: u64, f: F) -> Option<(K, u64)>
where
    K: Ord + Send,
    F: Fn(u64) -> Option<K> + Sync + Send,
{
    let pick = |a: Option<(K, u64)>, b: Option<(K, u64)>| match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => Some(if (&b.0, b.1) < (&a.0, a.1) { b } else { a }),
    };
    #[cfg(feature = "parallel")]
    {
        (0..n)
            .into_par_iter()
            .map(|i| f(i).map(|k| (k, i)))
            .reduce(|| None, pick)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(|i| f(i).map(|k| (k, i))).fold(None, pick)
    }
}

/// First index in `0..n` (smallest) where `f` returns `Some`.
pub fn find_first<R, F>(n: usize, f: F) -> Option<(usize, R)>
where
    R: Send,
    F: Fn(usize) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n)
            .into_par_iter()
            .filter_map(|i| f(i).map(|r| (i, r)))
            .min_by_key(|(i, _)| *i)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).find_map(|i| f(i).map(|r| (i, r)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_prefers_smaller_index_on_ties() {
        let got = min_by_key_u64(100, |i| if i % 7 == 3 { Some(i % 2) } else { None });
        assert_eq!(got, Some((0, 10)));
    }

    #[test]
    fn find_first_is_smallest() {
        assert_eq!(
            find_first(50, |i| (i > 20 && i % 5 == 0).then_some(i * 2)),
            Some((25, 50))
        );
        assert_eq!(find_first(5, |_| None::<u8>), None);
    }

    #[test]
    fn map_preserves_order() {
        assert_eq!(map(&[1, 2, 3], |x| x * 10), vec![10, 20, 30]);
        assert_eq!(map_range(4, |i| i * i), vec![0, 1, 4, 9]);
    }
}
