//! Deterministic parallel reductions over sample rows.

use crate::scalar::Scalar;
use rayon::prelude::*;

/// Rows per leaf block; fixed so that the summation tree never depends on
/// the worker count.
pub const BLOCK: usize = 512;

/// `Σᵢ f(i)` of `width`-vectors over rows `0..n`.
///
/// Rows are summed sequentially inside fixed blocks; block sums are combined
/// by a pairwise tree in block order. Parallel execution only changes which
/// worker evaluates a block, so the result is bit-identical for any thread
/// count.
pub fn sum_rows<T: Scalar>(n: usize, width: usize, f: impl Fn(usize, &mut [T]) + Sync) -> Vec<T> {
    let blocks = n.div_ceil(BLOCK);
    let partial: Vec<Vec<T>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = vec![T::zero(); width];
            let mut row = vec![T::zero(); width];
            for i in b * BLOCK..((b + 1) * BLOCK).min(n) {
                row.iter_mut().for_each(|v| *v = T::zero());
                f(i, &mut row);
                for (a, r) in acc.iter_mut().zip(&row) {
                    *a += *r;
                }
            }
            acc
        })
        .collect();
    pairwise(partial, width)
}

fn pairwise<T: Scalar>(mut parts: Vec<Vec<T>>, width: usize) -> Vec<T> {
    if parts.is_empty() {
        return vec![T::zero(); width];
    }
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(mut a) = it.next() {
            if let Some(b) = it.next() {
                for (x, y) in a.iter_mut().zip(&b) {
                    *x += *y;
                }
            }
            next.push(a);
        }
        parts = next;
    }
    parts.pop().expect("non-empty")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn independent_of_thread_count() {
        let f = |i: usize, out: &mut [f64]| {
            out[0] = (i as f64 * 0.37).sin() * 1e3;
            out[1] = 1.0 / (1.0 + i as f64);
        };
        let n = 100_003;
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| sum_rows(n, 2, f));
        let b = four.install(|| sum_rows(n, 2, f));
        assert_eq!(a, b);
        let direct: f64 = (0..n).map(|i| 1.0 / (1.0 + i as f64)).sum();
        assert!((a[1] - direct).abs() < 1e-10);
    }

    #[test]
    fn empty_sum_is_zero() {
        assert_eq!(sum_rows::<f64>(0, 3, |_, _| {}), vec![0.0; 3]);
    }
}
