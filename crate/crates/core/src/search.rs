//! Scalar search primitives used by the allocation solvers.

/// Golden ratio conjugate, `(sqrt(5) - 1) / 2`.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Finds `x` in `[lo, hi]` with `f(x) = target` for `f` non-decreasing,
/// assuming `f(lo) <= target <= f(hi)`.
///
/// Stops after `max_iter` halvings or once the bracket is narrower than
/// `rel_tol * hi`. Returns the bracket midpoint.
pub fn bisect_increasing<F>(f: F, target: f64, mut lo: f64, mut hi: f64, rel_tol: f64, max_iter: usize) -> f64
where
    F: Fn(f64) -> f64,
{
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= rel_tol * hi.abs() {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`, shrinking the
/// bracket to `tol`. Returns `(argmax, max)` over every point evaluated,
/// including both ends, so the result is never worse than `f(lo)` or `f(hi)`.
pub fn golden_section_max<F>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let mut best = (lo, f(lo));
    let consider = |x: f64, v: f64, best: &mut (f64, f64)| {
        if v > best.1 || (v == best.1 && x < best.0) {
            *best = (x, v);
        }
    };
    let f_hi = f(hi);
    consider(hi, f_hi, &mut best);

    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    consider(x1, f1, &mut best);
    consider(x2, f2, &mut best);
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
            consider(x1, f1, &mut best);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
            consider(x2, f2, &mut best);
        }
    }
    best
}
