//! Steady states of the rescaled food web and the threshold functions that
//! decide their existence.
//!
//! `psi(s2)` is the inflow concentration for which a hydrogenotroph-free
//! steady state has hydrogen level `s2`. Its minimum `F1(D)` is the SS2
//! existence threshold and its value `F2(D)` at the hydrogen break-even
//! `M2(D + a2)` is the SS3 existence threshold.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kinetics::{FoodWeb, GrowthModel};
use crate::roots;

/// Relative width of the band in which `s0in = F1(D)` is treated as a double root.
pub const COALESCENCE_BAND: f64 = 1e-10;
/// Endpoint guard of psi, as a fraction of `s2_1 - s2_0`.
pub const ENDPOINT_GUARD: f64 = 1e-14;
/// Number of samples used to bracket sign changes of `F3` on `I2`.
pub const F3_SAMPLES: usize = 256;
/// Samples per end of the psi interval used to bracket its minimum.
const PSI_SAMPLES: usize = 160;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SteadyStateKind {
    #[serde(rename = "SS1")]
    Ss1,
    #[serde(rename = "SS2_flat")]
    Ss2Flat,
    #[serde(rename = "SS2_sharp")]
    Ss2Sharp,
    /// `SS2_flat` and `SS2_sharp` merged at `s0in = F1(D)`.
    #[serde(rename = "SS2_double")]
    Ss2Double,
    #[serde(rename = "SS3")]
    Ss3,
}

impl SteadyStateKind {
    pub fn name(self) -> &'static str {
        match self {
            SteadyStateKind::Ss1 => "SS1",
            SteadyStateKind::Ss2Flat => "SS2_flat",
            SteadyStateKind::Ss2Sharp => "SS2_sharp",
            SteadyStateKind::Ss2Double => "SS2_double",
            SteadyStateKind::Ss3 => "SS3",
        }
    }
}

impl std::fmt::Display for SteadyStateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// An equilibrium in rescaled coordinates `(x0, x1, x2, s0, s1, s2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyState {
    pub kind: SteadyStateKind,
    pub state: [f64; 6],
    pub d: f64,
    pub s0in: f64,
}

impl SteadyState {
    pub fn x(&self) -> [f64; 3] {
        [self.state[0], self.state[1], self.state[2]]
    }

    pub fn s(&self) -> [f64; 3] {
        [self.state[3], self.state[4], self.state[5]]
    }

    /// Sup-norm of the right-hand side at this state.
    pub fn residual<G: GrowthModel>(&self, web: &FoodWeb<G>) -> f64 {
        crate::simulate::rhs_rescaled(&self.state, self.d, self.s0in, web)
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Break-even hydrogen level of the chlorophenol degrader at dilution `d`.
pub fn s2_0<G: GrowthModel>(d: f64, web: &FoodWeb<G>) -> Result<f64> {
    web.growth.mu0_break_even(d + web.decay[0])
}

/// Hydrogen level above which the phenol degrader cannot sustain dilution `d`.
pub fn s2_1<G: GrowthModel>(d: f64, web: &FoodWeb<G>) -> Result<f64> {
    web.growth.mu1_break_even(d + web.decay[1])
}

/// Hydrogen level at which the hydrogenotroph grows at `d + a2`.
pub fn m2_break_even<G: GrowthModel>(d: f64, web: &FoodWeb<G>) -> Result<f64> {
    web.growth.mu2_inverse(d + web.decay[2])
}

fn check_omega<G>(web: &FoodWeb<G>) -> Result<()> {
    if web.omega >= 1.0 {
        Err(Error::OmegaRegime { omega: web.omega })
    } else {
        Ok(())
    }
}

/// Open interval `(s2_0, s2_1)` on which psi is defined.
pub fn psi_interval<G: GrowthModel>(d: f64, web: &FoodWeb<G>) -> Result<(f64, f64)> {
    let lo = s2_0(d, web)?;
    let hi = s2_1(d, web)?;
    if lo >= hi {
        return Err(Error::domain(
            "psi",
            format!("D = {d} is outside I1 (s2_0 = {lo:e} >= s2_1 = {hi:e})"),
        ));
    }
    Ok((lo, hi))
}

fn clip((lo, hi): (f64, f64)) -> (f64, f64) {
    let eps = ENDPOINT_GUARD * (hi - lo);
    (lo + eps, hi - eps)
}

/// psi without domain checks: `+inf` wherever an inverse does not exist.
fn psi_raw<G: GrowthModel>(s2: f64, d: f64, web: &FoodWeb<G>) -> f64 {
    let g = &web.growth;
    match (
        g.mu0_inverse(d + web.decay[0], s2),
        g.mu1_inverse(d + web.decay[1], s2),
    ) {
        (Ok(s0), Ok(s1)) => s0 + (s1 + s2) / (1.0 - web.omega),
        _ => f64::INFINITY,
    }
}

fn dpsi_raw<G: GrowthModel>(s2: f64, d: f64, web: &FoodWeb<G>) -> f64 {
    let g = &web.growth;
    match (
        g.mu0_inverse(d + web.decay[0], s2),
        g.mu1_inverse(d + web.decay[1], s2),
    ) {
        (Ok(s0), Ok(s1)) => {
            let p = g.partials(s0, s1, s2);
            -p.f / p.e + (p.h / p.g + 1.0) / (1.0 - web.omega)
        }
        _ => f64::NAN,
    }
}

fn check_psi_domain<G: GrowthModel>(s2: f64, d: f64, web: &FoodWeb<G>) -> Result<()> {
    check_omega(web)?;
    let (lo, hi) = psi_interval(d, web)?;
    if !(s2 > lo && s2 < hi) {
        return Err(Error::domain(
            "psi",
            format!("s2 = {s2:e} outside ({lo:e}, {hi:e})"),
        ));
    }
    Ok(())
}

/// `psi(s2) = M0(D + a0, s2) + (M1(D + a1, s2) + s2) / (1 - omega)`.
pub fn psi<G: GrowthModel>(s2: f64, d: f64, web: &FoodWeb<G>) -> Result<f64> {
    check_psi_domain(s2, d, web)?;
    Ok(psi_raw(s2, d, web))
}

/// Derivative of psi with respect to `s2`.
pub fn dpsi_ds2<G: GrowthModel>(s2: f64, d: f64, web: &FoodWeb<G>) -> Result<f64> {
    check_psi_domain(s2, d, web)?;
    Ok(dpsi_raw(s2, d, web))
}

/// Sample points of the clipped psi interval, dense near both poles.
fn psi_samples(lo: f64, hi: f64) -> Vec<f64> {
    let w = hi - lo;
    let (a, b) = ((ENDPOINT_GUARD).ln(), 0.5f64.ln());
    let offset = |k: usize| (a + (b - a) * k as f64 / (PSI_SAMPLES - 1) as f64).exp();
    let mut xs: Vec<f64> = (0..PSI_SAMPLES).map(|k| lo + w * offset(k)).collect();
    xs.extend((0..PSI_SAMPLES - 1).rev().map(|k| hi - w * offset(k)));
    xs.dedup();
    xs
}

/// Brackets of the local minima of psi found on the sample grid.
fn psi_minimum_brackets<G: GrowthModel>(
    d: f64,
    web: &FoodWeb<G>,
    (lo, hi): (f64, f64),
) -> Vec<(f64, f64)> {
    let xs = psi_samples(lo, hi);
    let ys: Vec<f64> = xs.iter().map(|&s| dpsi_raw(s, d, web)).collect();
    let mut brackets = Vec::new();
    let mut last_neg: Option<usize> = None;
    for (k, &y) in ys.iter().enumerate() {
        if y.is_nan() {
            continue;
        }
        if y < 0.0 {
            last_neg = Some(k);
        } else if let Some(j) = last_neg.take() {
            brackets.push((xs[j], xs[k]));
        }
    }
    brackets
}

/// Errors with an assumption violation if psi has more than one local
/// minimum on its interval at dilution `d`.
pub fn psi_minimum_is_unique<G: GrowthModel>(d: f64, web: &FoodWeb<G>) -> Result<()> {
    check_omega(web)?;
    let interval = clip(psi_interval(d, web)?);
    let n = psi_minimum_brackets(d, web, interval).len();
    if n != 1 {
        return Err(Error::AssumptionViolation {
            assumption: "H8",
            detail: format!("psi has {n} local minima at D = {d}"),
        });
    }
    Ok(())
}

/// Minimizer of psi on `(s2_0(D), s2_1(D))`.
pub fn sbar2<G: GrowthModel>(d: f64, web: &FoodWeb<G>) -> Result<f64> {
    check_omega(web)?;
    let interval = clip(psi_interval(d, web)?);
    let brackets = psi_minimum_brackets(d, web, interval);
    match brackets.as_slice() {
        [(a, b)] => {
            let root = roots::bisect(|s| dpsi_raw(s, d, web), *a, *b, 0.0);
            match root {
                Ok(s) => Ok(s),
                Err(_) => {
                    let tol = 1e-12 * (interval.1 - interval.0);
                    Ok(roots::golden_section(|s| psi_raw(s, d, web), *a, *b, tol).2)
                }
            }
        }
        [] => {
            let tol = 1e-12 * (interval.1 - interval.0);
            let (_, _, best) =
                roots::golden_section(|s| psi_raw(s, d, web), interval.0, interval.1, tol);
            Ok(best)
        }
        many => Err(Error::AssumptionViolation {
            assumption: "H8",
            detail: format!("psi has {} local minima at D = {d}", many.len()),
        }),
    }
}

/// `F1(D) = min psi`, the SS2 existence threshold.
pub fn f1<G: GrowthModel>(d: f64, web: &FoodWeb<G>) -> Result<f64> {
    let s = sbar2(d, web)?;
    Ok(psi_raw(s, d, web))
}

/// Hydrogen break-even `M2(D + a2)` when `D` lies in `I2`.
fn i2_point<G: GrowthModel>(d: f64, web: &FoodWeb<G>) -> Result<f64> {
    check_omega(web)?;
    let (lo, hi) = psi_interval(d, web)?;
    let s2 = m2_break_even(d, web)
        .map_err(|e| Error::domain("F2", format!("D = {d} is outside I2: {e}")))?;
    if !(s2 > lo && s2 < hi) {
        return Err(Error::domain(
            "F2",
            format!("D = {d} is outside I2 (M2 = {s2:e} not in ({lo:e}, {hi:e}))"),
        ));
    }
    Ok(s2)
}

/// `F2(D) = psi(M2(D + a2))`, the SS3 existence threshold.
pub fn f2<G: GrowthModel>(d: f64, web: &FoodWeb<G>) -> Result<f64> {
    let s2 = i2_point(d, web)?;
    Ok(psi_raw(s2, d, web))
}

/// `F3(D) = psi'(M2(D + a2))`.
pub fn f3<G: GrowthModel>(d: f64, web: &FoodWeb<G>) -> Result<f64> {
    let s2 = i2_point(d, web)?;
    Ok(dpsi_raw(s2, d, web))
}

/// Everything about psi that depends on `D` only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DilutionSlice {
    pub d: f64,
    /// `(s2_0, s2_1)` when `D` lies in `I1`.
    pub interval: Option<(f64, f64)>,
    pub sbar2: Option<f64>,
    pub f1: Option<f64>,
    /// `M2(D + a2)` when `D` lies in `I2`.
    pub s2_ss3: Option<f64>,
    pub f2: Option<f64>,
    pub f3: Option<f64>,
}

impl DilutionSlice {
    pub fn new<G: GrowthModel>(d: f64, web: &FoodWeb<G>) -> Result<Self> {
        let mut slice = DilutionSlice {
            d,
            interval: None,
            sbar2: None,
            f1: None,
            s2_ss3: None,
            f2: None,
            f3: None,
        };
        if web.omega >= 1.0 || !(d > 0.0) {
            return Ok(slice);
        }
        let Ok(interval) = psi_interval(d, web) else {
            return Ok(slice);
        };
        slice.interval = Some(interval);
        let sb = sbar2(d, web)?;
        slice.sbar2 = Some(sb);
        slice.f1 = Some(psi_raw(sb, d, web));
        if let Ok(s2) = i2_point(d, web) {
            slice.s2_ss3 = Some(s2);
            slice.f2 = Some(psi_raw(s2, d, web));
            slice.f3 = Some(dpsi_raw(s2, d, web));
        }
        Ok(slice)
    }

    pub fn in_i1(&self) -> bool {
        self.interval.is_some()
    }

    pub fn in_i2(&self) -> bool {
        self.s2_ss3.is_some()
    }

    /// `s0in` lies within the coalescence band around `F1(D)`.
    pub fn near_f1(&self, s0in: f64) -> bool {
        self.f1
            .is_some_and(|f1| (s0in - f1).abs() < COALESCENCE_BAND * s0in.max(1.0))
    }
}

pub fn find_ss1(d: f64, s0in: f64) -> SteadyState {
    SteadyState {
        kind: SteadyStateKind::Ss1,
        state: [0.0, 0.0, 0.0, s0in, 0.0, 0.0],
        d,
        s0in,
    }
}

fn ss2_state<G: GrowthModel>(
    kind: SteadyStateKind,
    s2: f64,
    d: f64,
    s0in: f64,
    web: &FoodWeb<G>,
) -> Result<SteadyState> {
    let g = &web.growth;
    let [a0, a1, _] = web.decay;
    let s0 = g.mu0_inverse(d + a0, s2)?;
    let s1 = g.mu1_inverse(d + a1, s2)?;
    let x0 = d / (d + a0) * (s0in - s0);
    let x1 = d / (d + a1) * (s0in - s0 - s1);
    Ok(SteadyState {
        kind,
        state: [x0, x1, 0.0, s0, s1, s2],
        d,
        s0in,
    })
}

/// Hydrogenotroph-free steady states at `(D, s0in)`: none below `F1(D)`, a
/// single double root inside the coalescence band, otherwise `SS2_flat` and
/// `SS2_sharp` in that order.
pub fn find_ss2<G: GrowthModel>(d: f64, s0in: f64, web: &FoodWeb<G>) -> Result<Vec<SteadyState>> {
    let slice = DilutionSlice::new(d, web)?;
    find_ss2_in(&slice, s0in, web)
}

pub fn find_ss2_in<G: GrowthModel>(
    slice: &DilutionSlice,
    s0in: f64,
    web: &FoodWeb<G>,
) -> Result<Vec<SteadyState>> {
    let (Some((lo, hi)), Some(sb), Some(f1)) = (slice.interval, slice.sbar2, slice.f1) else {
        return Ok(Vec::new());
    };
    let d = slice.d;
    if slice.near_f1(s0in) {
        return Ok(vec![ss2_state(
            SteadyStateKind::Ss2Double,
            sb,
            d,
            s0in,
            web,
        )?]);
    }
    if s0in < f1 {
        return Ok(Vec::new());
    }
    let gap = |s: f64| {
        if s <= lo || s >= hi {
            f64::INFINITY
        } else {
            psi_raw(s, d, web) - s0in
        }
    };
    let flat = roots::bisect(gap, lo, sb, 0.0)?;
    let sharp = roots::bisect(gap, sb, hi, 0.0)?;
    Ok(vec![
        ss2_state(SteadyStateKind::Ss2Flat, flat, d, s0in, web)?,
        ss2_state(SteadyStateKind::Ss2Sharp, sharp, d, s0in, web)?,
    ])
}

/// The coexistence steady state, present when `D` lies in `I2` and `s0in > F2(D)`.
pub fn find_ss3<G: GrowthModel>(
    d: f64,
    s0in: f64,
    web: &FoodWeb<G>,
) -> Result<Option<SteadyState>> {
    let slice = DilutionSlice::new(d, web)?;
    find_ss3_in(&slice, s0in, web)
}

pub fn find_ss3_in<G: GrowthModel>(
    slice: &DilutionSlice,
    s0in: f64,
    web: &FoodWeb<G>,
) -> Result<Option<SteadyState>> {
    let (Some(s2), Some(f2)) = (slice.s2_ss3, slice.f2) else {
        return Ok(None);
    };
    if !(s0in > f2) {
        return Ok(None);
    }
    Ok(Some(ss3_state(slice.d, s0in, s2, web)?))
}

/// SS3 formulas at hydrogen level `s2`, without the existence test.
pub fn ss3_state<G: GrowthModel>(
    d: f64,
    s0in: f64,
    s2: f64,
    web: &FoodWeb<G>,
) -> Result<SteadyState> {
    let g = &web.growth;
    let [a0, a1, a2] = web.decay;
    let s0 = g.mu0_inverse(d + a0, s2)?;
    let s1 = g.mu1_inverse(d + a1, s2)?;
    let x0 = d / (d + a0) * (s0in - s0);
    let x1 = d / (d + a1) * (s0in - s0 - s1);
    let x2 = d / (d + a2) * ((1.0 - web.omega) * (s0in - s0) - s1 - s2);
    Ok(SteadyState {
        kind: SteadyStateKind::Ss3,
        state: [x0, x1, x2, s0, s1, s2],
        d,
        s0in,
    })
}

/// Every steady state at `(D, s0in)`, SS1 first.
pub fn all_steady_states<G: GrowthModel>(
    d: f64,
    s0in: f64,
    web: &FoodWeb<G>,
) -> Result<Vec<SteadyState>> {
    let slice = DilutionSlice::new(d, web)?;
    all_steady_states_in(&slice, s0in, web)
}

pub fn all_steady_states_in<G: GrowthModel>(
    slice: &DilutionSlice,
    s0in: f64,
    web: &FoodWeb<G>,
) -> Result<Vec<SteadyState>> {
    let mut out = vec![find_ss1(slice.d, s0in)];
    out.extend(find_ss2_in(slice, s0in, web)?);
    out.extend(find_ss3_in(slice, s0in, web)?);
    Ok(out)
}

/// Shape of the interval `I2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum I2Kind {
    Empty,
    /// `I2 = (0, D2)`
    IntervalFromZero {
        d2: f64,
    },
    /// `I2 = (D2min, D2max)`
    InteriorInterval {
        d2min: f64,
        d2max: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    AOrB,
    COrD,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SubRegime {
    C,
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegimeTag {
    pub regime: Regime,
    pub sub: Option<SubRegime>,
}

impl std::fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.regime, self.sub) {
            (Regime::AOrB, _) => f.write_str("a_or_b"),
            (Regime::COrD, Some(SubRegime::C)) => f.write_str("c_or_d/c"),
            (Regime::COrD, Some(SubRegime::D)) => f.write_str("c_or_d/d"),
            (Regime::COrD, None) => f.write_str("c_or_d"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalDilutions {
    /// Upper end of `I1 = [0, D1)`; absent when `I1` is empty.
    pub d1: Option<f64>,
    pub i2: I2Kind,
    /// Sign changes of `F3` on `I2`, ascending.
    pub f3_zeros: Vec<f64>,
    /// Smallest zero of `F3`; bounds `I3`.
    pub d3: Option<f64>,
    /// `I3 = {D in I2 : F3(D) < 0}` as a list of open intervals.
    pub i3: Vec<(f64, f64)>,
    pub i3_equals_i2: bool,
    pub regime: Option<RegimeTag>,
}

impl CriticalDilutions {
    pub fn i2_bounds(&self) -> Option<(f64, f64)> {
        match self.i2 {
            I2Kind::Empty => None,
            I2Kind::IntervalFromZero { d2 } => Some((0.0, d2)),
            I2Kind::InteriorInterval { d2min, d2max } => Some((d2min, d2max)),
        }
    }
}

/// `D1`, the positive solution of `s2_0(D) = s2_1(D)`.
pub fn dilution_upper_bound<G: GrowthModel>(web: &FoodWeb<G>) -> Result<f64> {
    let g = &web.growth;
    let [a0, a1, _] = web.decay;
    if let Some(d1) = g.break_even_crossing(a0, a1) {
        return Ok(d1);
    }
    let upper = (g.mu0_sup(f64::INFINITY) - a0).min(g.mu1_sup(0.0) - a1);
    if !(upper > 0.0) {
        return Err(Error::no_solution(
            "D1",
            "decay rates exceed the growth asymptotes",
        ));
    }
    let gap = |d: f64| {
        let lo = s2_0(d, web).unwrap_or(f64::INFINITY);
        let hi = s2_1(d, web).unwrap_or(0.0);
        lo - hi
    };
    let lo = upper * 1e-12;
    let hi = upper * (1.0 - 1e-12);
    if gap(lo) >= 0.0 {
        return Err(Error::no_solution("D1", "I1 is empty: s2_0(0) >= s2_1(0)"));
    }
    roots::bisect(gap, lo, hi, 0.0)
}

/// Open intervals of `(lo, hi)` where `inside` holds, given every breakpoint.
fn intervals_between(
    lo: f64,
    hi: f64,
    mut cuts: Vec<f64>,
    mut inside: impl FnMut(f64) -> bool,
) -> Vec<(f64, f64)> {
    cuts.retain(|&c| c > lo && c < hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = vec![lo];
    edges.extend(cuts);
    edges.push(hi);
    let mut out: Vec<(f64, f64)> = Vec::new();
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        if inside(0.5 * (a + b)) {
            match out.last_mut() {
                Some(last) if last.1 == a => last.1 = b,
                _ => out.push((a, b)),
            }
        }
    }
    out
}

/// `D1`, the interval `I2`, the zeros of `F3` and the interval `I3`.
pub fn critical_dilutions<G: GrowthModel>(web: &FoodWeb<G>) -> CriticalDilutions {
    let empty = CriticalDilutions {
        d1: None,
        i2: I2Kind::Empty,
        f3_zeros: Vec::new(),
        d3: None,
        i3: Vec::new(),
        i3_equals_i2: false,
        regime: classify_regime(web).ok(),
    };
    let Ok(d1) = dilution_upper_bound(web) else {
        return empty;
    };
    let mut out = CriticalDilutions {
        d1: Some(d1),
        ..empty
    };

    let lo = d1 * 1e-12;
    let hi = d1 * (1.0 - 1e-12);
    let below = |d: f64| {
        let m2 = m2_break_even(d, web).unwrap_or(f64::INFINITY);
        m2 - s2_0(d, web).unwrap_or(f64::INFINITY)
    };
    let above = |d: f64| {
        let m2 = m2_break_even(d, web).unwrap_or(f64::INFINITY);
        s2_1(d, web).unwrap_or(0.0) - m2
    };
    let mut cuts = roots::sign_changes(below, lo, hi, F3_SAMPLES, 0.0);
    cuts.extend(roots::sign_changes(above, lo, hi, F3_SAMPLES, 0.0));
    let i2 = intervals_between(0.0, d1, cuts, |d| below(d) > 0.0 && above(d) > 0.0);
    out.i2 = match i2.as_slice() {
        [] => I2Kind::Empty,
        [(a, b), ..] if *a == 0.0 => I2Kind::IntervalFromZero { d2: *b },
        [(a, b), ..] => I2Kind::InteriorInterval {
            d2min: *a,
            d2max: *b,
        },
    };

    let f3_or_nan = |d: f64| f3(d, web).unwrap_or(f64::NAN);
    let mut zeros = Vec::new();
    let mut i3 = Vec::new();
    for &(a, b) in &i2 {
        let w = b - a;
        let (sa, sb) = (a + 1e-9 * w, b - 1e-9 * w);
        let z = roots::sign_changes(f3_or_nan, sa, sb, F3_SAMPLES, 0.0);
        zeros.extend(z.iter().copied());
        i3.extend(intervals_between(a, b, z, |d| f3_or_nan(d) < 0.0));
    }
    out.i3_equals_i2 = !i2.is_empty() && i3 == i2;
    out.d3 = zeros.first().copied();
    out.f3_zeros = zeros;
    out.i3 = i3;
    out
}

/// Which pair of operating-diagram cases the parameters produce, decided by
/// comparing the two break-even curves `s2_0(D)` and `M2(D + a2)` at `D = 0`.
pub fn classify_regime<G: GrowthModel>(web: &FoodWeb<G>) -> Result<RegimeTag> {
    let start0 = s2_0(0.0, web)?;
    let start2 = m2_break_even(0.0, web)?;
    let scale = start0.abs().max(start2.abs());
    let a_or_b = if (start0 - start2).abs() > 1e-12 * scale && scale > 0.0 {
        start0 < start2
    } else {
        // tie at D = 0: compare the slopes
        let h = 1e-7;
        let slope0 = (s2_0(h, web)? - start0) / h;
        let slope2 = (m2_break_even(h, web)? - start2) / h;
        slope0 < slope2
    };
    if a_or_b {
        return Ok(RegimeTag {
            regime: Regime::AOrB,
            sub: None,
        });
    }
    let sub = dilution_upper_bound(web).ok().and_then(|d1| {
        let m2 = m2_break_even(d1, web).ok()?;
        let s20 = s2_0(d1, web).ok()?;
        Some(if m2 < s20 { SubRegime::C } else { SubRegime::D })
    });
    Ok(RegimeTag {
        regime: Regime::COrD,
        sub,
    })
}
