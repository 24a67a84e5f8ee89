//! Grid evaluation. With the `parallel` feature the work is spread over the
//! rayon pool; without it (or through [`try_map_seq`]) it runs in order on the
//! calling thread. Results always come back in input order.

use crate::error::Result;

/// Evaluates `f` on every item, stopping at the first error.
pub fn try_map<T, R, F>(items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        try_map_par(items, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        try_map_seq(items, f)
    }
}

pub fn try_map_seq<T, R, F>(items: &[T], f: F) -> Result<Vec<R>>
where
    F: Fn(&T) -> Result<R>,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn try_map_par<T, R, F>(items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

/// Sizes the global rayon pool. Must run before the first parallel sweep;
/// without the `parallel` feature it does nothing.
pub fn configure_threads(n: usize) -> Result<()> {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| crate::Error::Domain(format!("thread pool: {e}")))
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = n;
        Ok(())
    }
}

/// `n` points evenly spaced on [lo, hi], both ends included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn order_and_errors() {
        let xs: Vec<f64> = (0..1000).map(f64::from).collect();
        let ys = try_map(&xs, |x| Ok(x * 2.0)).unwrap();
        assert_eq!(ys, try_map_seq(&xs, |x| Ok(x * 2.0)).unwrap());
        assert_eq!(ys[999], 1998.0);
        let e = try_map(&xs, |x| if *x > 500.0 { Err(Error::domain("x")) } else { Ok(*x) });
        assert!(e.is_err());
    }

    #[test]
    fn linspace_ends() {
        let g = linspace(0.1, 3.0, 200);
        assert_eq!(g.len(), 200);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[199], 3.0);
        assert_eq!(linspace(1.0, 2.0, 1), vec![1.0]);
        assert!(linspace(1.0, 2.0, 0).is_empty());
    }
}
