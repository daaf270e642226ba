//! Scalar root isolation and minimization used throughout the crate.

use crate::error::{Error, Result};

/// Bisection on a bracket with `f(lo)` and `f(hi)` of opposite sign.
///
/// Runs until the bracket is narrower than `rel_tol * max(|lo|, |hi|)` or the
/// midpoint no longer separates the endpoints, whichever comes first. A zero
/// relative tolerance therefore bisects down to adjacent floats.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.is_nan() || f_hi.is_nan() || f_lo.signum() == f_hi.signum() {
        return Err(Error::Numeric(format!(
            "bisection bracket [{lo:e}, {hi:e}] does not straddle a root (f = {f_lo:e}, {f_hi:e})"
        )));
    }
    for _ in 0..2200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        if (hi - lo).abs() <= rel_tol * lo.abs().max(hi.abs()) {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Find the `s >= 0` with `g(s) = target` for a nondecreasing `g` with `g(0) <= target`.
///
/// The bracket starts at `[0, 1]` and its upper end doubles until `g(hi) >= target`.
pub fn invert_increasing<F>(mut g: F, target: f64, rel_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if target <= g(0.0) {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    let mut lo = 0.0;
    let mut grown = 0;
    while g(hi) < target {
        lo = hi;
        hi *= 2.0;
        grown += 1;
        if grown > 1100 || !hi.is_finite() {
            return Err(Error::no_solution(
                "inverse",
                format!("target {target:e} not reached by bracket growth"),
            ));
        }
    }
    bisect(|s| g(s) - target, lo, hi, rel_tol)
}

/// Same as [`invert_increasing`] for a nonincreasing `g`, `g(0) >= target`.
pub fn invert_decreasing<F>(mut g: F, target: f64, rel_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    invert_increasing(move |s| -g(s), -target, rel_tol)
}

/// Golden-section search for the minimum of a unimodal function on `[lo, hi]`.
///
/// Returns the final bracket `(a, b)` and the best abscissa seen.
pub fn golden_section<F>(mut f: F, lo: f64, hi: f64, abs_tol: f64) -> (f64, f64, f64)
where
    F: FnMut(f64) -> f64,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..400 {
        if (b - a).abs() <= abs_tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let best = if fc < fd { c } else { d };
    (a, b, best)
}

/// Locate the sign changes of `f` sampled at `n` evenly spaced points of `[lo, hi]`
/// and refine each by bisection. Non-finite samples are skipped.
pub fn sign_changes<F>(mut f: F, lo: f64, hi: f64, n: usize, rel_tol: f64) -> Vec<f64>
where
    F: FnMut(f64) -> f64,
{
    let n = n.max(2);
    let xs: Vec<f64> = (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut roots = Vec::new();
    for k in 0..n - 1 {
        let (y0, y1) = (ys[k], ys[k + 1]);
        if !y0.is_finite() || !y1.is_finite() {
            continue;
        }
        if y0 == 0.0 {
            roots.push(xs[k]);
        } else if y0.signum() != y1.signum() && y1 != 0.0 {
            if let Ok(r) = bisect(&mut f, xs[k], xs[k + 1], rel_tol) {
                roots.push(r);
            }
        }
    }
    if ys[n - 1] == 0.0 {
        roots.push(xs[n - 1]);
    }
    roots
}
