//! Bisection on monotone functions. All the root problems in this crate
//! (delay integral equation, equilibrium, lag crossing, transform inverse)
//! are strictly monotone, so bisection is unconditionally safe.

/// Bisection for a monotone `g` with a sign change on [lo, hi].
///
/// Stops when |g(mid)| <= `residual_tol` or the bracket width drops below
/// `width_tol` (pass 0.0 to drive purely on the other criterion), with a hard
/// iteration cap. Returns the midpoint of the final bracket.
pub fn bisect_monotone<F: Fn(f64) -> f64>(
    g: F,
    mut lo: f64,
    mut hi: f64,
    width_tol: f64,
    residual_tol: f64,
    max_iter: usize,
) -> f64 {
    let glo = g(lo);
    let ghi = g(hi);
    if glo == 0.0 {
        return lo;
    }
    if ghi == 0.0 {
        return hi;
    }
    debug_assert!(
        glo.signum() != ghi.signum(),
        "bisect_monotone: no sign change on [{lo}, {hi}] (g: {glo}, {ghi})"
    );
    let increasing = ghi > glo;
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..max_iter {
        mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm == 0.0 || (residual_tol > 0.0 && gm.abs() <= residual_tol) {
            return mid;
        }
        if (gm > 0.0) == increasing {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= width_tol {
            return 0.5 * (lo + hi);
        }
    }
    mid
}

/// Double `hi` from `start` until `g(hi) >= 0` (for increasing `g` with
/// `g(start) < 0`), returning the bracketing upper bound.
pub fn grow_upper<F: Fn(f64) -> f64>(g: F, start: f64, max_doublings: usize) -> Option<f64> {
    let mut hi = start;
    for _ in 0..max_doublings {
        if g(hi) >= 0.0 {
            return Some(hi);
        }
        hi *= 2.0;
    }
    None
}
