//! Deterministic parallel reductions.
//!
//! Work is split into fixed rows that are evaluated in parallel and collected
//! in index order; the row results are then combined by a pairwise tree whose
//! shape depends only on the number of rows. The result is therefore
//! bit-identical for every thread count.

use rayon::prelude::*;

/// Evaluate `f(i)` for `i in 0..n` in parallel, returning results in order.
pub fn par_rows<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Pairwise tree reduction with a shape fixed by `items.len()`.
pub fn tree_reduce<T: Clone, F: Fn(T, T) -> T>(items: &[T], zero: T, op: &F) -> T {
    match items.len() {
        0 => zero,
        1 => items[0].clone(),
        n => {
            let (a, b) = items.split_at(n / 2);
            let left = tree_reduce(a, zero.clone(), op);
            let right = tree_reduce(b, zero, op);
            op(left, right)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_sum_matches_shape() {
        let v: Vec<f64> = (0..17).map(|i| 1.0 / (i as f64 + 1.0)).collect();
        let s = tree_reduce(&v, 0.0, &|a, b| a + b);
        let direct: f64 = v.iter().sum();
        assert!((s - direct).abs() < 1e-14);
        assert_eq!(tree_reduce(&[] as &[f64], 0.0, &|a, b| a + b), 0.0);
    }

    #[test]
    fn rows_are_ordered() {
        let v = par_rows(100, |i| i * i);
        assert!(v.iter().enumerate().all(|(i, &x)| x == i * i));
    }
}
