//! Index-space data parallelism with a sequential fallback.
//!
//! Every helper here is deterministic: reductions use a total order on
//! `(value, index)` so the parallel and sequential builds pick the same
//! element, and maps preserve index order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Whether the crate was built with the rayon backend.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

/// Evaluates `f` on `0..n` and collects the results in index order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
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

/// Returns the index and value of the largest `f(i)` over `0..n`.
///
/// Ties go to the lowest index; NaN never wins. Returns `None` for `n == 0`.
pub fn argmax_indexed<F>(n: usize, f: F) -> Option<(usize, f64)>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let pair = |i: usize| (i, f(i));
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(pair).reduce_with(better)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(pair).reduce(better)
    }
}

/// Like [`argmax_indexed`], but `f` returns a payload alongside the score.
pub fn argmax_with<T, F>(n: usize, f: F) -> Option<(usize, f64, T)>
where
    T: Send,
    F: Fn(usize) -> (f64, T) + Sync + Send,
{
    let triple = |i: usize| {
        let (v, t) = f(i);
        (i, v, t)
    };
    let pick = |l: (usize, f64, T), r: (usize, f64, T)| {
        if better((l.0, l.1), (r.0, r.1)).0 == l.0 {
            l
        } else {
            r
        }
    };
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(triple).reduce_with(pick)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(triple).reduce(pick)
    }
}

fn better(l: (usize, f64), r: (usize, f64)) -> (usize, f64) {
    match (l.1.is_nan(), r.1.is_nan()) {
        (true, false) => return r,
        (false, true) => return l,
        (true, true) => return if l.0 <= r.0 { l } else { r },
        _ => {}
    }
    if l.1 > r.1 || (l.1 == r.1 && l.0 < r.0) {
        l
    } else {
        r
    }
}
