//! Dormand-Prince 5(4) with dense output, and a backward Euler fallback for
//! stretches where the explicit step size collapses.

use crate::error::Error;

/// Steps shorter than this abort the explicit integrator.
pub const MIN_STEP: f64 = 1e-12;
/// Components below `-NEGATIVE_CLAMP` after a step are reset to zero.
pub const NEGATIVE_CLAMP: f64 = 1e-14;
const MAX_STEPS: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rel: 1e-8,
            abs: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Solution<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
    pub accepted: usize,
    pub rejected: usize,
    /// Time at which the implicit fallback took over, if it did.
    pub fallback_from: Option<f64>,
    /// Most negative value seen before clamping.
    pub min_before_clamp: f64,
}

#[derive(Debug, Clone)]
pub struct Failure<const N: usize> {
    pub error: Error,
    pub partial: Solution<N>,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

/// Output times `0, dt, 2 dt, ...` up to and including `t_end`.
pub fn uniform_times(t_end: f64, dt: f64) -> Vec<f64> {
    let n = (t_end / dt).floor() as usize;
    let mut ts: Vec<f64> = (0..=n).map(|k| k as f64 * dt).collect();
    if ts.last().is_some_and(|&t| t < t_end * (1.0 - 1e-12)) {
        ts.push(t_end);
    }
    ts
}

fn clamp<const N: usize>(y: &mut [f64; N], min_seen: &mut f64, on: bool) -> bool {
    if !on {
        return false;
    }
    let mut changed = false;
    for v in y.iter_mut() {
        *min_seen = min_seen.min(*v);
        if *v < -NEGATIVE_CLAMP {
            *v = 0.0;
            changed = true;
        }
    }
    changed
}

/// Recorded samples are floored at zero so that rounding-level undershoots
/// never reach the caller.
fn recorded<const N: usize>(mut y: [f64; N], on: bool) -> [f64; N] {
    if on {
        for v in y.iter_mut() {
            *v = v.max(0.0);
        }
    }
    y
}

/// Integrate `y' = f(t, y)` from `times[0]` to the last entry of `times`,
/// recording the solution at every entry. `times` must be increasing. With
/// `nonnegative`, components that undershoot below `-NEGATIVE_CLAMP` are reset
/// to zero after every step.
pub fn integrate<const N: usize, F>(
    mut f: F,
    y0: [f64; N],
    times: &[f64],
    tol: Tolerances,
    nonnegative: bool,
) -> Result<Solution<N>, Failure<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let mut sol = Solution {
        t: Vec::with_capacity(times.len()),
        y: Vec::with_capacity(times.len()),
        accepted: 0,
        rejected: 0,
        fallback_from: None,
        min_before_clamp: 0.0,
    };
    let Some(&t0) = times.first() else {
        return Ok(sol);
    };
    let t_end = *times.last().unwrap();
    let mut t = t0;
    let mut y = y0;
    clamp(&mut y, &mut sol.min_before_clamp, nonnegative);
    sol.t.push(t);
    sol.y.push(recorded(y, nonnegative));
    let mut next_out = 1;

    let mut k1 = f(t, &y);
    let scale0 = y
        .iter()
        .zip(&k1)
        .map(|(v, d)| d.abs() / (tol.abs + tol.rel * v.abs()))
        .fold(0.0, f64::max);
    let mut h = if scale0 > 0.0 {
        (0.01 / scale0).min(t_end - t0)
    } else {
        (t_end - t0) * 1e-3
    };
    h = h.max(MIN_STEP * 10.0);

    let mut steps = 0usize;
    while next_out < times.len() {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Failure {
                error: Error::Numeric(format!("step budget exhausted at t = {t}")),
                partial: sol,
            });
        }
        if t + h > t_end {
            h = t_end - t;
        }
        if h < MIN_STEP && t_end - t > MIN_STEP {
            sol.fallback_from = Some(t);
            return backward_euler(f, t, y, times, next_out, tol, nonnegative, sol);
        }

        let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(
            t + C4 * h,
            &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        );
        let k5 = f(
            t + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &axpy(
                &y,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let y_new = axpy(
            &y,
            h,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = f(t + h, &y_new);

        let mut err: f64 = 0.0;
        for i in 0..N {
            let e =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = tol.abs + tol.rel * y[i].abs().max(y_new[i].abs());
            err = err.max(e.abs() / sc);
        }
        if !err.is_finite() {
            sol.rejected += 1;
            h *= 0.2;
            continue;
        }
        if err > 1.0 {
            sol.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).max(0.2);
            continue;
        }

        // dense output on [t, t + h]
        let t_new = t + h;
        while next_out < times.len() && times[next_out] <= t_new {
            let theta = (times[next_out] - t) / h;
            let th1 = 1.0 - theta;
            let mut out = [0.0; N];
            for i in 0..N {
                let ydiff = y_new[i] - y[i];
                let bspl = h * k1[i] - ydiff;
                let r4 = ydiff - h * k7[i] - bspl;
                let r5 = h
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                out[i] = y[i] + theta * (ydiff + th1 * (bspl + theta * (r4 + th1 * r5)));
            }
            if next_out == times.len() - 1 && times[next_out] == t_new {
                out = y_new;
            }
            clamp(&mut out, &mut sol.min_before_clamp, nonnegative);
            sol.t.push(times[next_out]);
            sol.y.push(recorded(out, nonnegative));
            next_out += 1;
        }

        sol.accepted += 1;
        t = t_new;
        y = y_new;
        if clamp(&mut y, &mut sol.min_before_clamp, nonnegative) {
            k1 = f(t, &y);
        } else {
            k1 = k7;
        }
        let fac = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= fac;
    }
    Ok(sol)
}

fn solve_linear<const N: usize>(mut a: [[f64; N]; N], mut b: [f64; N]) -> Option<[f64; N]> {
    for col in 0..N {
        let piv = (col..N).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col] == 0.0 || !a[piv][col].is_finite() {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..N {
            let m = a[r][col] / a[col][col];
            if m != 0.0 {
                for c in col..N {
                    a[r][c] -= m * a[col][c];
                }
                b[r] -= m * b[col];
            }
        }
    }
    let mut x = [0.0; N];
    for r in (0..N).rev() {
        let mut s = b[r];
        for c in r + 1..N {
            s -= a[r][c] * x[c];
        }
        x[r] = s / a[r][r];
    }
    Some(x)
}

/// One backward Euler step solved by Newton with a finite-difference Jacobian.
fn be_step<const N: usize, F>(
    f: &mut F,
    t: f64,
    y: &[f64; N],
    h: f64,
    tol: Tolerances,
) -> Option<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let t1 = t + h;
    let mut z = *y;
    for _ in 0..20 {
        let fz = f(t1, &z);
        let mut g = [0.0; N];
        for i in 0..N {
            g[i] = z[i] - y[i] - h * fz[i];
        }
        let mut jac = [[0.0; N]; N];
        for j in 0..N {
            let dz = (1e-7 * z[j].abs()).max(1e-12);
            let mut zp = z;
            zp[j] += dz;
            let fp = f(t1, &zp);
            for i in 0..N {
                jac[i][j] = if i == j { 1.0 } else { 0.0 } - h * (fp[i] - fz[i]) / dz;
            }
        }
        let delta = solve_linear(jac, g)?;
        let mut done = true;
        for i in 0..N {
            z[i] -= delta[i];
            if delta[i].abs() > 1e-3 * (tol.abs + tol.rel * z[i].abs()) {
                done = false;
            }
        }
        if done {
            return Some(z);
        }
    }
    None
}

/// Adaptive backward Euler with a step-doubling error estimate.
fn backward_euler<const N: usize, F>(
    mut f: F,
    mut t: f64,
    mut y: [f64; N],
    times: &[f64],
    mut next_out: usize,
    tol: Tolerances,
    nonnegative: bool,
    mut sol: Solution<N>,
) -> Result<Solution<N>, Failure<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let t_end = *times.last().unwrap();
    let mut h = (t_end - t).min(1e-6);
    while next_out < times.len() {
        let target = times[next_out];
        let step = h.min(target - t);
        if step < MIN_STEP && target - t > MIN_STEP {
            return Err(Failure {
                error: Error::StepUnderflow { t, h: step },
                partial: sol,
            });
        }
        let full = be_step(&mut f, t, &y, step, tol);
        let half = be_step(&mut f, t, &y, 0.5 * step, tol)
            .and_then(|m| be_step(&mut f, t + 0.5 * step, &m, 0.5 * step, tol));
        let (Some(full), Some(half)) = (full, half) else {
            sol.rejected += 1;
            h = 0.25 * step;
            continue;
        };
        let mut err: f64 = 0.0;
        for i in 0..N {
            let sc = tol.abs + tol.rel * half[i].abs();
            err = err.max((half[i] - full[i]).abs() / sc);
        }
        if err > 1.0 {
            sol.rejected += 1;
            h = step * (0.9 / err.sqrt()).max(0.1);
            continue;
        }
        sol.accepted += 1;
        t += step;
        // Richardson extrapolation of the two first-order solutions
        for i in 0..N {
            y[i] = 2.0 * half[i] - full[i];
        }
        clamp(&mut y, &mut sol.min_before_clamp, nonnegative);
        if (t - target).abs() <= 1e-12 * t.abs().max(1.0) {
            sol.t.push(target);
            sol.y.push(recorded(y, nonnegative));
            next_out += 1;
        }
        h = step
            * if err == 0.0 {
                4.0
            } else {
                (0.9 / err.sqrt()).min(4.0)
            };
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let sol = integrate(
            |_, y: &[f64; 1]| [-y[0]],
            [1.0],
            &[0.0, 0.5, 1.0],
            Tolerances::default(),
            true,
        )
        .unwrap();
        assert_eq!(sol.t, vec![0.0, 0.5, 1.0]);
        assert!((sol.y[1][0] - (-0.5f64).exp()).abs() < 1e-8);
        assert!((sol.y[2][0] - (-1.0f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn harmonic_oscillator_dense_output() {
        let ts = uniform_times(10.0, 0.37);
        let sol = integrate(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            [1.0, 0.0],
            &ts,
            Tolerances {
                rel: 1e-10,
                abs: 1e-12,
            },
            false,
        )
        .unwrap();
        for (t, y) in sol.t.iter().zip(&sol.y) {
            assert!(
                (y[0] - t.cos()).abs() < 1e-7,
                "t = {t}: {} vs {}",
                y[0],
                t.cos()
            );
        }
    }

    #[test]
    fn uniform_times_include_end() {
        let ts = uniform_times(1.0, 0.3);
        assert_eq!(ts.len(), 5);
        assert_eq!(*ts.last().unwrap(), 1.0);
    }

    #[test]
    fn backward_euler_handles_stiff_decay() {
        let ts = [0.0, 1.0];
        let sol = backward_euler(
            |_, y: &[f64; 1]| [-1e3 * (y[0] - 1.0)],
            0.0,
            [0.0],
            &ts,
            1,
            Tolerances::default(),
            true,
            Solution::default(),
        )
        .unwrap();
        assert!((sol.y[0][0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn linear_solve() {
        let x = solve_linear([[2.0, 1.0], [1.0, 3.0]], [3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-15 && (x[1] - 1.4).abs() < 1e-15);
    }
}
