//! Operating diagrams: region labels J1..J5 over the `(S_ch_in, D)` plane
//! and the boundary curves Gamma1, Gamma2 and Gamma3.
//!
//! Inflow concentrations here are in full units (kgCOD/m^3); the conversion
//! to the rescaled `s0in` uses the web's `y3y4`.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::equilibria::{self, CriticalDilutions, DilutionSlice, SteadyState, SteadyStateKind};
use crate::error::{Error, Result};
use crate::kinetics::{rescale_inflow, unrescale_inflow, FoodWeb, GrowthModel};
use crate::roots;
use crate::stability::{self, Verdict};

/// Samples used to bracket the lowest Gamma3 crossing above Gamma2.
pub const GAMMA3_SAMPLES: usize = 96;
/// Gamma3 is searched for in `(Gamma2, GAMMA3_SPAN * Gamma2)`.
pub const GAMMA3_SPAN: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Region {
    J1,
    J2,
    J3,
    J4,
    J5,
}

impl Region {
    pub const ALL: [Region; 5] = [Region::J1, Region::J2, Region::J3, Region::J4, Region::J5];

    pub fn name(self) -> &'static str {
        match self {
            Region::J1 => "J1",
            Region::J2 => "J2",
            Region::J3 => "J3",
            Region::J4 => "J4",
            Region::J5 => "J5",
        }
    }
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// How steady-state stability is decided in a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Closed-form criteria; requires zero decay.
    Analytic,
    /// Sign of the largest real part of the Jacobian spectrum.
    Numeric,
}

impl Method {
    /// Analytic without decay, numeric otherwise.
    pub fn default_for<G: GrowthModel>(web: &FoodWeb<G>) -> Self {
        if web.has_maintenance() {
            Method::Numeric
        } else {
            Method::Analytic
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateSummary {
    pub kind: SteadyStateKind,
    pub verdict: Verdict,
    /// Largest real part of the spectrum, when it could be computed.
    pub max_real_part: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionLabel {
    pub d: f64,
    pub s_ch_in: f64,
    /// `None` when the cell could not be classified; see `error`.
    pub label: Option<Region>,
    pub states: Vec<StateSummary>,
    /// The cell sits inside a coalescence or stability band.
    pub near_boundary: bool,
    pub error: Option<String>,
}

impl RegionLabel {
    fn unclassified(d: f64, s_ch_in: f64, err: &Error) -> Self {
        RegionLabel {
            d,
            s_ch_in,
            label: None,
            states: Vec::new(),
            near_boundary: false,
            error: Some(err.to_string()),
        }
    }

    pub fn existing(&self) -> Vec<SteadyStateKind> {
        self.states.iter().map(|s| s.kind).collect()
    }

    pub fn state(&self, kind: SteadyStateKind) -> Option<&StateSummary> {
        self.states.iter().find(|s| s.kind == kind)
    }

    pub fn verdict(&self, kind: SteadyStateKind) -> Option<Verdict> {
        self.state(kind).map(|s| s.verdict)
    }

    pub fn has(&self, kind: SteadyStateKind) -> bool {
        self.state(kind).is_some()
    }

    /// SS2 exists, as a pair or as the merged double root.
    pub fn has_ss2(&self) -> bool {
        self.has(SteadyStateKind::Ss2Flat)
            || self.has(SteadyStateKind::Ss2Sharp)
            || self.has(SteadyStateKind::Ss2Double)
    }
}

/// Region of a single operating point.
pub fn classify_point<G: GrowthModel>(
    d: f64,
    s_ch_in: f64,
    web: &FoodWeb<G>,
    method: Method,
) -> RegionLabel {
    if !(d > 0.0) || !(s_ch_in >= 0.0) {
        let err = Error::InvalidParameter {
            name: "operating point",
            reason: format!("need D > 0 and S_ch_in >= 0, got D = {d}, S_ch_in = {s_ch_in}"),
        };
        return RegionLabel::unclassified(d, s_ch_in, &err);
    }
    match DilutionSlice::new(d, web) {
        Ok(slice) => classify_in(&slice, s_ch_in, web, method),
        Err(e) => RegionLabel::unclassified(d, s_ch_in, &e),
    }
}

/// As [`classify_point`] with the `D`-only quantities precomputed.
pub fn classify_in<G: GrowthModel>(
    slice: &DilutionSlice,
    s_ch_in: f64,
    web: &FoodWeb<G>,
    method: Method,
) -> RegionLabel {
    let d = slice.d;
    match classify_inner(slice, s_ch_in, web, method) {
        Ok(label) => label,
        Err(e) => RegionLabel::unclassified(d, s_ch_in, &e),
    }
}

fn summarize<G: GrowthModel>(
    ss: &SteadyState,
    web: &FoodWeb<G>,
    method: Method,
) -> Result<StateSummary> {
    let spectrum = stability::spectrum(ss, web);
    let verdict = match method {
        Method::Analytic => stability::stability_analytic(ss, web)?.verdict,
        Method::Numeric => {
            let ev = spectrum.as_ref().map_err(Clone::clone)?;
            stability::classify_real_part(ev[0].re)
        }
    };
    Ok(StateSummary {
        kind: ss.kind,
        verdict,
        max_real_part: spectrum.ok().map(|ev| ev[0].re),
    })
}

fn classify_inner<G: GrowthModel>(
    slice: &DilutionSlice,
    s_ch_in: f64,
    web: &FoodWeb<G>,
    method: Method,
) -> Result<RegionLabel> {
    if method == Method::Analytic && web.has_maintenance() {
        return Err(Error::WrongMethod {
            operation: "analytic diagram classification",
            decay: web.decay,
        });
    }
    let d = slice.d;
    let s0in = rescale_inflow(s_ch_in, web.y3y4);
    let found = equilibria::all_steady_states_in(slice, s0in, web)?;
    let states = found
        .iter()
        .map(|ss| summarize(ss, web, method))
        .collect::<Result<Vec<_>>>()?;

    let band = equilibria::COALESCENCE_BAND * s0in.max(1.0);
    let near_f2 = slice.f2.is_some_and(|f2| (s0in - f2).abs() < band);
    let mut near_boundary = slice.near_f1(s0in) || near_f2;

    let by_kind = |k| states.iter().find(|s: &&StateSummary| s.kind == k);
    let label = if let Some(ss3) = by_kind(SteadyStateKind::Ss3) {
        near_boundary |= ss3.verdict == Verdict::Marginal;
        if ss3.verdict == Verdict::Unstable {
            Region::J5
        } else {
            Region::J3
        }
    } else if let Some(sharp) = by_kind(SteadyStateKind::Ss2Sharp) {
        near_boundary |= sharp.verdict == Verdict::Marginal;
        if sharp.verdict == Verdict::Unstable {
            Region::J4
        } else {
            Region::J2
        }
    } else if let Some(double) = found.iter().find(|s| s.kind == SteadyStateKind::Ss2Double) {
        // The merged root is marginal; label by whether hydrogenotrophs can
        // invade the sharp branch that opens just above it.
        near_boundary = true;
        let s2 = double.state[5];
        if web.growth.mu2(s2) < d + web.decay[2] {
            Region::J2
        } else {
            Region::J4
        }
    } else {
        Region::J1
    };
    Ok(RegionLabel {
        d,
        s_ch_in,
        label: Some(label),
        states,
        near_boundary,
        error: None,
    })
}

/// `Gamma1(D) = F1(D) / y3y4`; absent outside `I1`.
pub fn gamma1<G: GrowthModel>(d: f64, web: &FoodWeb<G>) -> Option<f64> {
    let f1 = equilibria::f1(d, web).ok()?;
    Some(unrescale_inflow(f1, web.y3y4))
}

/// `Gamma2(D) = F2(D) / y3y4`; absent outside `I2`.
pub fn gamma2<G: GrowthModel>(d: f64, web: &FoodWeb<G>) -> Option<f64> {
    let f2 = equilibria::f2(d, web).ok()?;
    Some(unrescale_inflow(f2, web.y3y4))
}

/// Lowest sign change of `g` on a geometric grid above `Gamma2(D)`, in full units.
fn lowest_crossing_above_gamma2<G, F>(d: f64, web: &FoodWeb<G>, mut g: F) -> Result<Option<f64>>
where
    G: GrowthModel,
    F: FnMut(f64) -> Result<f64>,
{
    let Ok(f2) = equilibria::f2(d, web) else {
        return Ok(None);
    };
    let lo = f2 * (1.0 + 1e-9);
    let ratio = GAMMA3_SPAN.powf(1.0 / (GAMMA3_SAMPLES - 1) as f64);
    let mut prev: Option<(f64, f64)> = None;
    let mut s = lo;
    for _ in 0..GAMMA3_SAMPLES {
        let v = g(s)?;
        if let Some((sp, vp)) = prev {
            if vp.signum() != v.signum() {
                let root = roots::bisect(|x| g(x).unwrap_or(f64::NAN), sp, s, 1e-12)?;
                return Ok(Some(unrescale_inflow(root, web.y3y4)));
            }
        }
        prev = Some((s, v));
        s *= ratio;
    }
    Ok(None)
}

/// Gamma3 from `F4(D, y3y4 S) = 0`, no decay only. `Ok(None)` when `F4`
/// keeps its sign above Gamma2 (in particular outside `I3`).
pub fn gamma3_analytic<G: GrowthModel>(d: f64, web: &FoodWeb<G>) -> Result<Option<f64>> {
    if web.has_maintenance() {
        return Err(Error::WrongMethod {
            operation: "analytic Gamma3",
            decay: web.decay,
        });
    }
    match equilibria::f3(d, web) {
        Ok(f3) if f3 < 0.0 => {}
        _ => return Ok(None),
    }
    lowest_crossing_above_gamma2(d, web, |s0in| stability::f4(d, s0in, web))
}

/// Gamma3 as the lowest `S` above Gamma2 where the largest real part of the
/// SS3 spectrum changes sign.
pub fn gamma3_numeric<G: GrowthModel>(d: f64, web: &FoodWeb<G>) -> Result<Option<f64>> {
    lowest_crossing_above_gamma2(d, web, |s0in| {
        let ss3 = equilibria::find_ss3(d, s0in, web)?.ok_or_else(|| {
            Error::domain("Gamma3", format!("no SS3 at D = {d}, s0in = {s0in:e}"))
        })?;
        Ok(stability::spectrum(&ss3, web)?[0].re)
    })
}

/// Analytic Gamma3 without decay, numeric with decay.
pub fn gamma3_locus<G: GrowthModel>(d: f64, web: &FoodWeb<G>) -> Option<f64> {
    if web.has_maintenance() {
        gamma3_numeric(d, web).ok().flatten()
    } else {
        gamma3_analytic(d, web).ok().flatten()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub d_range: (f64, f64),
    pub nd: usize,
    pub s_range: (f64, f64),
    pub ns: usize,
    /// Logarithmic spacing in `S_ch_in`.
    pub s_log: bool,
}

impl GridSpec {
    /// 200 x 200, `D` linear over `[0.001, 1.2 D1]`, `S_ch_in` logarithmic over `[1e-3, 10]`.
    pub fn default_for<G: GrowthModel>(web: &FoodWeb<G>) -> Self {
        let d_hi = equilibria::dilution_upper_bound(web)
            .map(|d1| 1.2 * d1)
            .unwrap_or(1.0);
        GridSpec {
            d_range: (1e-3, d_hi),
            nd: 200,
            s_range: (1e-3, 10.0),
            ns: 200,
            s_log: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: &str| {
            Err(Error::InvalidParameter {
                name: "grid",
                reason: reason.into(),
            })
        };
        let (d0, d1) = self.d_range;
        let (s0, s1) = self.s_range;
        if self.nd == 0 || self.ns == 0 {
            return bad("axes need at least one sample");
        }
        if !(d0 > 0.0 && d1.is_finite() && (d1 > d0 || (self.nd == 1 && d1 >= d0))) {
            return bad("D range must satisfy 0 < lo < hi");
        }
        if !(s0 > 0.0 && s1.is_finite() && (s1 > s0 || (self.ns == 1 && s1 >= s0))) {
            return bad("S_ch_in range must satisfy 0 < lo < hi");
        }
        Ok(())
    }

    pub fn d_axis(&self) -> Vec<f64> {
        linspace(self.d_range, self.nd)
    }

    pub fn s_axis(&self) -> Vec<f64> {
        if self.s_log {
            let (a, b) = self.s_range;
            linspace((a.ln(), b.ln()), self.ns)
                .into_iter()
                .map(f64::exp)
                .collect()
        } else {
            linspace(self.s_range, self.ns)
        }
    }
}

fn linspace((a, b): (f64, f64), n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagramGrid {
    pub d_axis: Vec<f64>,
    pub s_axis: Vec<f64>,
    /// Row-major by `D` index, then `S` index.
    pub cells: Vec<RegionLabel>,
    pub maintenance: bool,
    pub method: Method,
    pub case_tag: String,
}

/// Classify every cell of the grid. Output order does not depend on scheduling.
pub fn scan<G: GrowthModel>(
    spec: &GridSpec,
    web: &FoodWeb<G>,
    method: Method,
    case_tag: &str,
) -> Result<DiagramGrid> {
    spec.validate()?;
    let d_axis = spec.d_axis();
    let s_axis = spec.s_axis();
    let rows: Vec<Vec<RegionLabel>> = d_axis
        .par_iter()
        .map(|&d| match DilutionSlice::new(d, web) {
            Ok(slice) => s_axis
                .iter()
                .map(|&s| classify_in(&slice, s, web, method))
                .collect(),
            Err(e) => s_axis
                .iter()
                .map(|&s| RegionLabel::unclassified(d, s, &e))
                .collect(),
        })
        .collect();
    Ok(DiagramGrid {
        d_axis,
        s_axis,
        cells: rows.into_iter().flatten().collect(),
        maintenance: web.has_maintenance(),
        method,
        case_tag: case_tag.to_string(),
    })
}

pub const CSV_HEADER: [&str; 12] = [
    "D",
    "S_ch_in",
    "label",
    "existing",
    "stab_SS1",
    "stab_SS2_flat",
    "stab_SS2_sharp",
    "stab_SS3",
    "maxre_SS1",
    "maxre_SS2_flat",
    "maxre_SS2_sharp",
    "maxre_SS3",
];

const CSV_KINDS: [SteadyStateKind; 4] = [
    SteadyStateKind::Ss1,
    SteadyStateKind::Ss2Flat,
    SteadyStateKind::Ss2Sharp,
    SteadyStateKind::Ss3,
];

impl DiagramGrid {
    pub fn cell(&self, i_d: usize, i_s: usize) -> &RegionLabel {
        &self.cells[i_d * self.s_axis.len() + i_s]
    }

    pub fn regions(&self) -> BTreeSet<Region> {
        self.cells.iter().filter_map(|c| c.label).collect()
    }

    pub fn unclassified(&self) -> usize {
        self.cells.iter().filter(|c| c.label.is_none()).count()
    }

    pub fn region_counts(&self) -> BTreeMap<Region, usize> {
        let mut out = BTreeMap::new();
        for r in self.cells.iter().filter_map(|c| c.label) {
            *out.entry(r).or_insert(0) += 1;
        }
        out
    }

    pub fn write_csv<W: Write>(&self, out: W) -> std::result::Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for c in &self.cells {
            let mut rec = vec![
                c.d.to_string(),
                c.s_ch_in.to_string(),
                c.label
                    .map_or("unclassified".to_string(), |l| l.to_string()),
                c.states
                    .iter()
                    .map(|s| s.kind.name())
                    .collect::<Vec<_>>()
                    .join(";"),
            ];
            // The merged SS2 root fills both SS2 columns.
            let lookup = |k: SteadyStateKind| {
                c.state(k).or_else(|| match k {
                    SteadyStateKind::Ss2Flat | SteadyStateKind::Ss2Sharp => {
                        c.state(SteadyStateKind::Ss2Double)
                    }
                    _ => None,
                })
            };
            for k in CSV_KINDS {
                rec.push(lookup(k).map_or(String::new(), |s| s.verdict.code().to_string()));
            }
            for k in CSV_KINDS {
                rec.push(
                    lookup(k)
                        .and_then(|s| s.max_real_part)
                        .map_or(String::new(), |v| v.to_string()),
                );
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Curve samples on the grid's `D` axis plus critical values and counts.
    pub fn summary<G: GrowthModel>(&self, web: &FoodWeb<G>) -> DiagramSummary {
        let sample = |f: &(dyn Fn(f64) -> Option<f64> + Sync)| -> Vec<[f64; 2]> {
            self.d_axis
                .par_iter()
                .filter_map(|&d| f(d).map(|s| [d, s]))
                .collect()
        };
        DiagramSummary {
            case_tag: self.case_tag.clone(),
            maintenance: self.maintenance,
            method: self.method,
            decay: web.decay,
            nd: self.d_axis.len(),
            ns: self.s_axis.len(),
            d_range: (
                self.d_axis[0],
                *self.d_axis.last().unwrap_or(&self.d_axis[0]),
            ),
            s_range: (
                self.s_axis[0],
                *self.s_axis.last().unwrap_or(&self.s_axis[0]),
            ),
            criticals: equilibria::critical_dilutions(web),
            region_counts: self
                .region_counts()
                .into_iter()
                .map(|(r, n)| (r.name().to_string(), n))
                .collect(),
            unclassified: self.unclassified(),
            near_boundary: self.cells.iter().filter(|c| c.near_boundary).count(),
            gamma1: sample(&|d| gamma1(d, web)),
            gamma2: sample(&|d| gamma2(d, web)),
            gamma3: sample(&|d| gamma3_locus(d, web)),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagramSummary {
    pub case_tag: String,
    pub maintenance: bool,
    pub method: Method,
    pub decay: [f64; 3],
    pub nd: usize,
    pub ns: usize,
    pub d_range: (f64, f64),
    pub s_range: (f64, f64),
    pub criticals: CriticalDilutions,
    pub region_counts: BTreeMap<String, usize>,
    pub unclassified: usize,
    pub near_boundary: usize,
    /// `[D, S_ch_in]` pairs.
    pub gamma1: Vec<[f64; 2]>,
    pub gamma2: Vec<[f64; 2]>,
    pub gamma3: Vec<[f64; 2]>,
}
