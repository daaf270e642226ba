//! Time integration of the food web, attractor classification and the
//! eigenvalue scan used to locate Hopf bifurcations of SS3.

use rayon::prelude::*;
use serde::Serialize;

use crate::equilibria::{self, SteadyState, SteadyStateKind};
use crate::error::{Error, Result};
use crate::kinetics::{FoodWeb, FullParameters, GrowthModel};
use crate::ode::{self, Tolerances};
use crate::stability::{self, Complex64};

/// Rescaled right-hand side; `state = (x0, x1, x2, s0, s1, s2)`.
pub fn rhs_rescaled<G: GrowthModel>(
    state: &[f64; 6],
    d: f64,
    s0in: f64,
    web: &FoodWeb<G>,
) -> [f64; 6] {
    let [x0, x1, x2, s0, s1, s2] = *state;
    let [a0, a1, a2] = web.decay;
    let g = &web.growth;
    let r0 = g.mu0(s0, s2) * x0;
    let r1 = g.mu1(s1, s2) * x1;
    let r2 = g.mu2(s2) * x2;
    [
        r0 - (d + a0) * x0,
        r1 - (d + a1) * x1,
        r2 - (d + a2) * x2,
        d * (s0in - s0) - r0,
        -d * s1 + r0 - r1,
        -d * s2 + r1 - web.omega * r0 - r2,
    ]
}

/// Right-hand side in kgCOD/m3, `state = (X_ch, X_ph, X_H2, S_ch, S_ph, S_H2)`,
/// with inflows `(S_ch,in, S_ph,in, S_H2,in)`.
pub fn rhs_full(state: &[f64; 6], d: f64, inflow: [f64; 3], p: &FullParameters) -> [f64; 6] {
    let [xc, xp, xh, sc, sp, sh] = *state;
    let f0 = p.km_ch * sc / (p.ks_ch + sc) * sh / (p.ks_h2_c + sh);
    let f1 = p.km_ph * sp / (p.ks_ph + sp) / (1.0 + sh / p.ki_h2);
    let f2 = p.km_h2 * sh / (p.ks_h2 + sh);
    [
        -d * xc + p.y_ch * f0 * xc - p.kdec_ch * xc,
        -d * xp + p.y_ph * f1 * xp - p.kdec_ph * xp,
        -d * xh + p.y_h2 * f2 * xh - p.kdec_h2 * xh,
        d * (inflow[0] - sc) - f0 * xc,
        d * (inflow[1] - sp) + p.y3() * f0 * xc - f1 * xp,
        d * (inflow[2] - sh) + p.y4() * f1 * xp
            - crate::kinetics::HYDROGEN_USED_BY_DECHLORINATION * f0 * xc
            - f2 * xh,
    ]
}

/// Scale factors taking full coordinates to rescaled ones.
pub fn rescaling_factors(p: &FullParameters) -> [f64; 6] {
    let (y3, y4) = (p.y3(), p.y4());
    [
        y3 * y4 / p.y_ch,
        y4 / p.y_ph,
        1.0 / p.y_h2,
        y3 * y4,
        y4,
        1.0,
    ]
}

pub fn full_to_rescaled(state: &[f64; 6], p: &FullParameters) -> [f64; 6] {
    let k = rescaling_factors(p);
    std::array::from_fn(|i| state[i] * k[i])
}

pub fn rescaled_to_full(state: &[f64; 6], p: &FullParameters) -> [f64; 6] {
    let k = rescaling_factors(p);
    std::array::from_fn(|i| state[i] / k[i])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Coordinates {
    Full,
    Rescaled,
}

/// A system that can be integrated at fixed `(D, S_ch,in)`.
pub trait ChemostatSystem: Sync {
    fn coordinates(&self) -> Coordinates;
    fn rhs(&self, state: &[f64; 6], d: f64, s_ch_in: f64) -> [f64; 6];
}

impl ChemostatSystem for FullParameters {
    fn coordinates(&self) -> Coordinates {
        Coordinates::Full
    }

    fn rhs(&self, state: &[f64; 6], d: f64, s_ch_in: f64) -> [f64; 6] {
        rhs_full(state, d, [s_ch_in, 0.0, 0.0], self)
    }
}

impl<G: GrowthModel> ChemostatSystem for FoodWeb<G> {
    fn coordinates(&self) -> Coordinates {
        Coordinates::Rescaled
    }

    fn rhs(&self, state: &[f64; 6], d: f64, s_ch_in: f64) -> [f64; 6] {
        rhs_rescaled(state, d, self.y3y4 * s_ch_in, self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegrationSpec {
    pub d: f64,
    /// Chlorophenol inflow in kgCOD/m3; the other inflows are zero.
    pub s_ch_in: f64,
    pub t_end: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Spacing of the recorded samples (d).
    pub sample_interval: f64,
    /// Initial state in the coordinates of the integrated system.
    pub initial: [f64; 6],
}

impl IntegrationSpec {
    pub fn new(d: f64, s_ch_in: f64, t_end: f64, initial: [f64; 6]) -> Self {
        let tol = Tolerances::default();
        IntegrationSpec {
            d,
            s_ch_in,
            t_end,
            rel_tol: tol.rel,
            abs_tol: tol.abs,
            sample_interval: 1.0,
            initial,
        }
    }

    fn validate(&self) -> Result<()> {
        let checks = [
            ("D", self.d > 0.0 && self.d.is_finite()),
            ("S_ch_in", self.s_ch_in >= 0.0 && self.s_ch_in.is_finite()),
            ("t_end", self.t_end > 0.0 && self.t_end.is_finite()),
            ("rel_tol", self.rel_tol > 0.0),
            ("abs_tol", self.abs_tol > 0.0),
            ("sample_interval", self.sample_interval > 0.0),
            (
                "initial",
                self.initial.iter().all(|v| *v >= 0.0 && v.is_finite()),
            ),
        ];
        for (name, ok) in checks {
            if !ok {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "out of range".into(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub coordinates: Coordinates,
    pub t: Vec<f64>,
    pub states: Vec<[f64; 6]>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub fallback_from: Option<f64>,
    pub min_before_clamp: f64,
}

impl Trajectory {
    fn from_solution(coordinates: Coordinates, sol: ode::Solution<6>) -> Self {
        Trajectory {
            coordinates,
            t: sol.t,
            states: sol.y,
            accepted_steps: sol.accepted,
            rejected_steps: sol.rejected,
            fallback_from: sol.fallback_from,
            min_before_clamp: sol.min_before_clamp,
        }
    }

    pub fn last(&self) -> Option<(f64, [f64; 6])> {
        Some((*self.t.last()?, *self.states.last()?))
    }

    /// Write `t` and the six components as CSV; the header names the coordinates.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> std::result::Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        let header: [&str; 7] = match self.coordinates {
            Coordinates::Full => ["t", "X_ch", "X_ph", "X_H2", "S_ch", "S_ph", "S_H2"],
            Coordinates::Rescaled => ["t", "x0", "x1", "x2", "s0", "s1", "s2"],
        };
        w.write_record(header)?;
        for (t, y) in self.t.iter().zip(&self.states) {
            let mut rec = vec![format!("{t}")];
            rec.extend(y.iter().map(|v| format!("{v:e}")));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct IntegrationError {
    pub error: Error,
    pub partial: Trajectory,
}

impl std::fmt::Display for IntegrationError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} (partial trajectory up to t = {})",
            self.error,
            self.partial.t.last().copied().unwrap_or(0.0)
        )
    }
}

impl std::error::Error for IntegrationError {}

pub fn integrate<S: ChemostatSystem + ?Sized>(
    spec: &IntegrationSpec,
    system: &S,
) -> std::result::Result<Trajectory, IntegrationError> {
    let coords = system.coordinates();
    if let Err(error) = spec.validate() {
        return Err(IntegrationError {
            error,
            partial: Trajectory::from_solution(coords, ode::Solution::default()),
        });
    }
    let times = ode::uniform_times(spec.t_end, spec.sample_interval);
    let tol = Tolerances {
        rel: spec.rel_tol,
        abs: spec.abs_tol,
    };
    ode::integrate(
        |_, y| system.rhs(y, spec.d, spec.s_ch_in),
        spec.initial,
        &times,
        tol,
        true,
    )
    .map(|sol| Trajectory::from_solution(coords, sol))
    .map_err(|f| IntegrationError {
        error: f.error,
        partial: Trajectory::from_solution(coords, f.partial),
    })
}

/// Generic starting point: biomass `(0.1, 0.05, 0.1) s0in`, substrates
/// `(s0in / 2, 0, 1e-6)`, rescaled.
pub fn default_initial(s0in: f64) -> [f64; 6] {
    [0.1 * s0in, 0.05 * s0in, 0.1 * s0in, 0.5 * s0in, 0.0, 1e-6]
}

/// Fraction of SS3's chlorophenol degrader kept in [`transect_initial`].
pub const TRANSECT_X0_FRACTION: f64 = 0.6;

/// Start near SS3 with the chlorophenol degrader knocked down, or at
/// [`default_initial`] when SS3 does not exist. Rescaled.
pub fn transect_initial<G: GrowthModel>(d: f64, s0in: f64, web: &FoodWeb<G>) -> Result<[f64; 6]> {
    Ok(match equilibria::find_ss3(d, s0in, web)? {
        Some(ss3) => {
            let mut y = ss3.state;
            y[0] *= TRANSECT_X0_FRACTION;
            y
        }
        None => default_initial(s0in),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    #[serde(rename = "converged_SS1")]
    ConvergedSs1,
    #[serde(rename = "converged_SS2")]
    ConvergedSs2,
    #[serde(rename = "converged_SS3")]
    ConvergedSs3,
    #[serde(rename = "limit_cycle")]
    LimitCycle,
    #[serde(rename = "growing_oscillation_to_SS1")]
    GrowingOscillationToSs1,
    #[serde(rename = "growing_oscillation")]
    GrowingOscillation,
    #[serde(rename = "undecided")]
    Undecided,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::ConvergedSs1 => "converged_SS1",
            Outcome::ConvergedSs2 => "converged_SS2",
            Outcome::ConvergedSs3 => "converged_SS3",
            Outcome::LimitCycle => "limit_cycle",
            Outcome::GrowingOscillationToSs1 => "growing_oscillation_to_SS1",
            Outcome::GrowingOscillation => "growing_oscillation",
            Outcome::Undecided => "undecided",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillationMetrics {
    pub peaks: usize,
    pub period: f64,
    pub first_amplitude: f64,
    pub last_amplitude: f64,
    /// `(last - first) / mean` of the peak-to-trough amplitudes.
    pub relative_drift: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AttractorReport {
    pub outcome: Outcome,
    pub terminal_time: f64,
    pub terminal_state: [f64; 6],
    pub terminal_rhs_norm: f64,
    pub oscillation: Option<OscillationMetrics>,
}

/// Terminal residual bound for a converged outcome.
pub const CONVERGED_RHS: f64 = 1e-6;
/// Relative distance bound for a converged outcome.
pub const CONVERGED_DISTANCE: f64 = 1e-5;
/// Amplitude drift band separating a limit cycle from a growing orbit.
pub const LIMIT_CYCLE_DRIFT: f64 = 0.02;
/// Fraction of the trajectory analysed for oscillations.
pub const TRAILING_FRACTION: f64 = 0.2;

/// Interpolated `(time, value)` of the local extrema of `v`.
fn extrema(t: &[f64], v: &[f64], maxima: bool) -> Vec<(f64, f64)> {
    let sgn = if maxima { 1.0 } else { -1.0 };
    let mut out = Vec::new();
    for k in 1..v.len().saturating_sub(1) {
        let (a, b, c) = (sgn * v[k - 1], sgn * v[k], sgn * v[k + 1]);
        if b > a && b >= c {
            // parabola through the three samples
            let denom = a - 2.0 * b + c;
            let (dt, peak) = if denom != 0.0 {
                let off = 0.5 * (a - c) / denom;
                (off, b - 0.25 * (a - c) * off)
            } else {
                (0.0, b)
            };
            let h = t[k + 1] - t[k];
            out.push((t[k] + dt * h, sgn * peak));
        }
    }
    out
}

/// Oscillations smaller than this fraction of the largest value of the
/// signal are ignored.
pub const SIGNIFICANT_AMPLITUDE: f64 = 1e-4;

/// Peak-to-following-trough amplitudes with the peak times, dropping
/// insignificant wiggles.
fn amplitudes(t: &[f64], v: &[f64]) -> Vec<(f64, f64)> {
    let peaks = extrema(t, v, true);
    let troughs = extrema(t, v, false);
    let floor = SIGNIFICANT_AMPLITUDE * v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut out = Vec::new();
    for &(tp, vp) in &peaks {
        if let Some(&(_, vt)) = troughs.iter().find(|(tt, _)| *tt > tp) {
            if vp - vt > floor {
                out.push((tp, vp - vt));
            }
        }
    }
    out
}

fn metrics(amps: &[(f64, f64)]) -> Option<OscillationMetrics> {
    if amps.len() < 2 {
        return None;
    }
    let first = amps[0].1;
    let last = amps[amps.len() - 1].1;
    let mean = amps.iter().map(|a| a.1).sum::<f64>() / amps.len() as f64;
    let period = (amps[amps.len() - 1].0 - amps[0].0) / (amps.len() - 1) as f64;
    Some(OscillationMetrics {
        peaks: amps.len(),
        period,
        first_amplitude: first,
        last_amplitude: last,
        relative_drift: (last - first) / mean,
    })
}

fn sup_norm(v: &[f64; 6]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Classify the long-time behaviour of a rescaled trajectory.
pub fn classify_attractor<G: GrowthModel>(
    traj: &Trajectory,
    known: &[SteadyState],
    web: &FoodWeb<G>,
) -> AttractorReport {
    let (t_end, y_end) = traj.last().unwrap_or((0.0, [0.0; 6]));
    let (d, s0in) = known.first().map(|s| (s.d, s.s0in)).unwrap_or((0.0, 0.0));
    let rhs_norm = sup_norm(&rhs_rescaled(&y_end, d, s0in, web));
    let mut report = AttractorReport {
        outcome: Outcome::Undecided,
        terminal_time: t_end,
        terminal_state: y_end,
        terminal_rhs_norm: rhs_norm,
        oscillation: None,
    };
    if traj.states.len() < 3 {
        return report;
    }

    // distances are relative to the state, or to the start when the state is the origin
    let start_norm = sup_norm(&traj.states[0]);
    let converged_to = known.iter().find(|ss| {
        let diff: [f64; 6] = std::array::from_fn(|i| y_end[i] - ss.state[i]);
        let norm = sup_norm(&ss.state);
        let scale = if norm > 0.0 {
            norm
        } else {
            start_norm.max(f64::MIN_POSITIVE)
        };
        rhs_norm < CONVERGED_RHS && sup_norm(&diff) / scale < CONVERGED_DISTANCE
    });

    let x0: Vec<f64> = traj.states.iter().map(|y| y[0]).collect();
    if let Some(ss) = converged_to {
        report.outcome = match ss.kind {
            SteadyStateKind::Ss1 => {
                let amps = amplitudes(&traj.t, &x0);
                report.oscillation = metrics(&amps);
                if growing(&amps) {
                    Outcome::GrowingOscillationToSs1
                } else {
                    Outcome::ConvergedSs1
                }
            }
            SteadyStateKind::Ss3 => Outcome::ConvergedSs3,
            _ => Outcome::ConvergedSs2,
        };
        return report;
    }

    let start = t_end - TRAILING_FRACTION * (t_end - traj.t[0]);
    let k0 = traj.t.partition_point(|&t| t < start);
    let amps = amplitudes(&traj.t[k0..], &x0[k0..]);
    report.oscillation = metrics(&amps);
    if let Some(m) = report.oscillation {
        if m.peaks >= 5 && m.relative_drift.abs() < LIMIT_CYCLE_DRIFT {
            report.outcome = Outcome::LimitCycle;
        } else if growing(&amps) {
            report.outcome = Outcome::GrowingOscillation;
        }
    }
    report
}

/// At least three oscillations, with the amplitude increasing from one to the
/// next in at least 80% of the cases.
fn growing(amps: &[(f64, f64)]) -> bool {
    if amps.len() < 3 {
        return false;
    }
    let ups = amps.windows(2).filter(|w| w[1].1 > w[0].1).count();
    ups as f64 >= 0.8 * (amps.len() - 1) as f64
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanPoint {
    pub s_ch_in: f64,
    /// `None` when SS3 does not exist here.
    pub max_real_part: Option<f64>,
    #[serde(serialize_with = "stability::serialize_eigenvalues")]
    pub eigenvalues: Option<Vec<Complex64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HopfCrossing {
    pub s_low: f64,
    pub s_high: f64,
    /// Linear interpolation of the leading real part between the two points.
    pub s_ch_in: f64,
    pub frequency: f64,
    /// Direction of the crossing with increasing `S_ch,in`.
    pub destabilizing: bool,
    pub others_negative: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HopfScan {
    pub d: f64,
    pub points: Vec<ScanPoint>,
    pub crossings: Vec<HopfCrossing>,
    /// Scan points without SS3.
    pub skipped: usize,
    /// Every eigenvalue other than the leading pair has negative real part at
    /// every point with SS3.
    pub others_negative_throughout: bool,
}

fn leading_pair_is_complex(ev: &[Complex64]) -> bool {
    ev.len() >= 2 && ev[0].im != 0.0 && (ev[0].im + ev[1].im).abs() <= 1e-9 * ev[0].im.abs()
}

/// Eigenvalues of the full Jacobian at SS3 along `S_ch,in`, `n` evenly spaced
/// points of `[s_lo, s_hi]`, flagging sign changes of a complex pair.
pub fn hopf_scan<G: GrowthModel>(
    d: f64,
    (s_lo, s_hi): (f64, f64),
    n: usize,
    web: &FoodWeb<G>,
) -> Result<HopfScan> {
    let n = n.max(2);
    let slice = equilibria::DilutionSlice::new(d, web)?;
    let points = (0..n)
        .into_par_iter()
        .map(|k| {
            let s = s_lo + (s_hi - s_lo) * k as f64 / (n - 1) as f64;
            let s0in = web.y3y4 * s;
            let ss3 = equilibria::find_ss3_in(&slice, s0in, web)?;
            let ev = match ss3 {
                Some(ss) => Some(stability::spectrum(&ss, web)?),
                None => None,
            };
            Ok(ScanPoint {
                s_ch_in: s,
                max_real_part: ev.as_ref().map(|e| e[0].re),
                eigenvalues: ev,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let others_neg = |ev: &[Complex64]| ev.iter().skip(2).all(|l| l.re < 0.0);
    let mut crossings = Vec::new();
    for w in points.windows(2) {
        let (Some(ea), Some(eb)) = (&w[0].eigenvalues, &w[1].eigenvalues) else {
            continue;
        };
        let (ra, rb) = (ea[0].re, eb[0].re);
        if (ra < 0.0) == (rb < 0.0) {
            continue;
        }
        if !(leading_pair_is_complex(ea) && leading_pair_is_complex(eb)) {
            continue;
        }
        let frac = ra / (ra - rb);
        crossings.push(HopfCrossing {
            s_low: w[0].s_ch_in,
            s_high: w[1].s_ch_in,
            s_ch_in: w[0].s_ch_in + frac * (w[1].s_ch_in - w[0].s_ch_in),
            frequency: 0.5 * (ea[0].im.abs() + eb[0].im.abs()),
            destabilizing: rb > ra,
            others_negative: others_neg(ea) && others_neg(eb),
        });
    }
    let skipped = points.iter().filter(|p| p.eigenvalues.is_none()).count();
    let others_negative_throughout =
        points
            .iter()
            .filter_map(|p| p.eigenvalues.as_deref())
            .all(|ev| {
                if leading_pair_is_complex(ev) {
                    others_neg(ev)
                } else {
                    ev.iter().skip(1).all(|l| l.re < 0.0)
                }
            });
    Ok(HopfScan {
        d,
        points,
        crossings,
        skipped,
        others_negative_throughout,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetics::rescale;

    #[test]
    fn washout_is_a_rest_point() {
        let web = rescale(&FullParameters::default()).unwrap().food_web();
        let ss1 = equilibria::find_ss1(0.1, 0.05);
        assert_eq!(rhs_rescaled(&ss1.state, 0.1, 0.05, &web), [0.0; 6]);
        let p = FullParameters::default();
        let y = [0.0, 0.0, 0.0, 0.3, 0.0, 0.0];
        assert_eq!(rhs_full(&y, 0.1, [0.3, 0.0, 0.0], &p), [0.0; 6]);
    }

    #[test]
    fn coordinate_maps_invert() {
        let p = FullParameters::default();
        let y = [0.01, 0.02, 0.003, 0.1, 0.05, 1e-7];
        let back = rescaled_to_full(&full_to_rescaled(&y, &p), &p);
        for i in 0..6 {
            assert!((back[i] - y[i]).abs() <= 1e-15 * y[i]);
        }
    }

    #[test]
    fn extrema_of_sine() {
        let t: Vec<f64> = (0..2000).map(|k| k as f64 * 0.01).collect();
        let v: Vec<f64> = t.iter().map(|x| x.sin()).collect();
        let peaks = extrema(&t, &v, true);
        assert_eq!(peaks.len(), 3);
        assert!((peaks[0].0 - std::f64::consts::FRAC_PI_2).abs() < 1e-4);
        assert!((peaks[0].1 - 1.0).abs() < 1e-8);
        let amps = amplitudes(&t, &v);
        assert!(amps.iter().all(|a| (a.1 - 2.0).abs() < 1e-7));
    }

    #[test]
    fn growth_detector() {
        let up: Vec<(f64, f64)> = (0..6).map(|k| (k as f64, 1.0 + k as f64)).collect();
        let flat: Vec<(f64, f64)> = (0..6).map(|k| (k as f64, 1.0)).collect();
        assert!(growing(&up));
        assert!(!growing(&flat));
    }
}
