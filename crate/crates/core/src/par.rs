//! Data-parallel helpers.
//!
//! With the `parallel` feature (default) these run on the rayon global pool;
//! without it they fall back to plain sequential iterators with identical
//! results. Output order is always the input order.

use faer::Par;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Whether this build runs the data-parallel paths on rayon.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

/// Parallelism handed to faer kernels (matrix products, factorizations).
pub fn faer_par() -> Par {
    #[cfg(feature = "parallel")]
    {
        if rayon::current_num_threads() > 1 {
            return Par::rayon(0);
        }
    }
    Par::Seq
}

/// `(0..n).map(f).collect()`, parallel when enabled.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
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

/// `items.iter().map(f).collect()`, parallel when enabled.
pub fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Send + Sync,
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

/// Calls `f(row, chunk)` for each consecutive `width`-sized chunk of `buf`.
pub fn for_each_row<F>(buf: &mut [f64], width: usize, f: F)
where
    F: Fn(usize, &mut [f64]) + Send + Sync,
{
    if width == 0 {
        return;
    }
    #[cfg(feature = "parallel")]
    {
        buf.par_chunks_mut(width)
            .enumerate()
            .for_each(|(i, row)| f(i, row));
    }
    #[cfg(not(feature = "parallel"))]
    {
        buf.chunks_mut(width)
            .enumerate()
            .for_each(|(i, row)| f(i, row));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_range_preserves_order() {
        let v = map_range(100, |i| i * i);
        assert_eq!(v, (0..100).map(|i| i * i).collect::<Vec<_>>());
    }

    #[test]
    fn rows_are_visited_once() {
        let mut buf = vec![0.0; 12];
        for_each_row(&mut buf, 4, |i, row| row.iter_mut().for_each(|x| *x += i as f64));
        assert_eq!(buf, vec![0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 2.0]);
    }
}
