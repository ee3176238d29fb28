//! Index-ordered parallel map; falls back to a plain loop without `parallel`.

/// `(0..n).map(f)` collected in index order, run on the rayon pool when the
/// `parallel` feature is on.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}
