//! C interface to `chemostat-core`.
//!
//! Every function returns a [`ChemostatStatus`]. On failure the message is kept
//! per thread and can be read with [`chemostat_last_error`]. Models are opaque
//! handles created by `chemostat_model_*` and released with
//! [`chemostat_model_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use chemostat_core::cli::{Case, CasePreset};
use chemostat_core::diagram::{self, Method, Region};
use chemostat_core::equilibria::{self, I2Kind, SteadyStateKind};
use chemostat_core::kinetics::rescale_inflow;
use chemostat_core::simulate::rescaled_to_full;
use chemostat_core::stability::{self, Verdict};
use chemostat_core::{rescale, Error, FoodWeb, FullParameters, Monod};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChemostatStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidParameter = 3,
    /// omega >= 1: only washout exists.
    OmegaRegime = 4,
    /// An analytic method was requested for a model with decay.
    WrongMethod = 5,
    NoSolution = 6,
    NumericFailure = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChemostatCase {
    A = 0,
    B = 1,
    C = 2,
    D = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChemostatMethod {
    /// Analytic without decay, numeric otherwise.
    Auto = 0,
    Analytic = 1,
    Numeric = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChemostatRegion {
    Unclassified = 0,
    J1 = 1,
    J2 = 2,
    J3 = 3,
    J4 = 4,
    J5 = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChemostatKind {
    Ss1 = 0,
    Ss2Flat = 1,
    Ss2Sharp = 2,
    Ss2Double = 3,
    Ss3 = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChemostatVerdict {
    Stable = 0,
    Unstable = 1,
    Marginal = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChemostatI2 {
    Empty = 0,
    /// (0, hi)
    FromZero = 1,
    /// (lo, hi)
    Interior = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChemostatGamma {
    Gamma1 = 1,
    Gamma2 = 2,
    Gamma3 = 3,
}

/// Critical dilution rates. Absent values are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ChemostatCriticals {
    pub d1: f64,
    pub i2: ChemostatI2,
    pub i2_lo: f64,
    pub i2_hi: f64,
    pub d3: f64,
    pub i3_equals_i2: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ChemostatSteadyState {
    pub kind: ChemostatKind,
    /// `(x0, x1, x2, s0, s1, s2)`
    pub rescaled: [f64; 6],
    /// `(X_ch, X_ph, X_H2, S_ch, S_ph, S_H2)`
    pub full: [f64; 6],
    pub verdict: ChemostatVerdict,
    pub max_real_part: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ChemostatLabel {
    pub region: ChemostatRegion,
    pub near_boundary: bool,
}

/// Opaque model handle.
pub struct ChemostatModel {
    params: FullParameters,
    web: FoodWeb<Monod>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> ChemostatStatus {
    match e {
        Error::InvalidParameter { .. } | Error::Domain { .. } => ChemostatStatus::InvalidParameter,
        Error::OmegaRegime { .. } => ChemostatStatus::OmegaRegime,
        Error::WrongMethod { .. } => ChemostatStatus::WrongMethod,
        Error::NoSolution { .. } | Error::AssumptionViolation { .. } => ChemostatStatus::NoSolution,
        _ => ChemostatStatus::NumericFailure,
    }
}

struct Failure(ChemostatStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn fail(status: ChemostatStatus, msg: impl Into<String>) -> Failure {
    Failure(status, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ChemostatStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            ChemostatStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            ChemostatStatus::Panic
        }
    }
}

fn model_ref<'a>(model: *const ChemostatModel) -> Result<&'a ChemostatModel, Failure> {
    // SAFETY: the caller passes a handle from `chemostat_model_*` or null.
    unsafe { model.as_ref() }.ok_or_else(|| fail(ChemostatStatus::NullPointer, "model is null"))
}

fn out_ref<'a, T>(out: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    // SAFETY: the caller passes a valid pointer to writable storage or null.
    unsafe { out.as_mut() }
        .ok_or_else(|| fail(ChemostatStatus::NullPointer, format!("{name} is null")))
}

fn positive(v: f64, name: &str) -> Result<(), Failure> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(fail(
            ChemostatStatus::InvalidArgument,
            format!("{name} must be positive and finite, got {v}"),
        ))
    }
}

fn finite_nonneg(v: f64, name: &str) -> Result<(), Failure> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(fail(
            ChemostatStatus::InvalidArgument,
            format!("{name} must be nonnegative and finite, got {v}"),
        ))
    }
}

fn make_model(params: FullParameters, out: *mut *mut ChemostatModel) -> Result<(), Failure> {
    let out = out_ref(out, "out")?;
    params.validate()?;
    let web = rescale(&params)?.food_web();
    *out = Box::into_raw(Box::new(ChemostatModel { params, web }));
    Ok(())
}

/// Message of the last failure on this thread, or null. Valid until the next
/// call into the library from the same thread.
#[no_mangle]
pub extern "C" fn chemostat_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Model from a preset case; `kdec` is applied to all three tiers.
#[no_mangle]
pub extern "C" fn chemostat_model_from_case(
    case: ChemostatCase,
    kdec: f64,
    out: *mut *mut ChemostatModel,
) -> ChemostatStatus {
    guard(|| {
        finite_nonneg(kdec, "kdec")?;
        let case = match case {
            ChemostatCase::A => Case::A,
            ChemostatCase::B => Case::B,
            ChemostatCase::C => Case::C,
            ChemostatCase::D => Case::D,
        };
        make_model(CasePreset::get(case).parameters().with_decay(kdec), out)
    })
}

/// Model from a JSON parameter document. Omitted keys take nominal values.
///
/// # Safety
/// `json` must be null or a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn chemostat_model_from_json(
    json: *const c_char,
    out: *mut *mut ChemostatModel,
) -> ChemostatStatus {
    guard(|| {
        if json.is_null() {
            return Err(fail(ChemostatStatus::NullPointer, "json is null"));
        }
        // SAFETY: checked non-null; NUL termination is the caller's contract.
        let text = unsafe { CStr::from_ptr(json) }
            .to_str()
            .map_err(|e| fail(ChemostatStatus::InvalidArgument, e.to_string()))?;
        let params = FullParameters::from_json(text)
            .map_err(|e| fail(ChemostatStatus::InvalidParameter, e.to_string()))?;
        make_model(params, out)
    })
}

/// # Safety
/// `model` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn chemostat_model_free(model: *mut ChemostatModel) {
    if !model.is_null() {
        // SAFETY: created by Box::into_raw in make_model.
        drop(unsafe { Box::from_raw(model) });
    }
}

/// `omega` and the inflow scale `Y3*Y4` of the rescaled model.
#[no_mangle]
pub extern "C" fn chemostat_model_scales(
    model: *const ChemostatModel,
    omega: *mut f64,
    y3y4: *mut f64,
) -> ChemostatStatus {
    guard(|| {
        let m = model_ref(model)?;
        *out_ref(omega, "omega")? = m.web.omega;
        *out_ref(y3y4, "y3y4")? = m.web.y3y4;
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn chemostat_criticals(
    model: *const ChemostatModel,
    out: *mut ChemostatCriticals,
) -> ChemostatStatus {
    guard(|| {
        let m = model_ref(model)?;
        let out = out_ref(out, "out")?;
        let c = equilibria::critical_dilutions(&m.web);
        let (i2, i2_lo, i2_hi) = match c.i2 {
            I2Kind::Empty => (ChemostatI2::Empty, f64::NAN, f64::NAN),
            I2Kind::IntervalFromZero { d2 } => (ChemostatI2::FromZero, 0.0, d2),
            I2Kind::InteriorInterval { d2min, d2max } => (ChemostatI2::Interior, d2min, d2max),
        };
        *out = ChemostatCriticals {
            d1: c.d1.unwrap_or(f64::NAN),
            i2,
            i2_lo,
            i2_hi,
            d3: c.d3.unwrap_or(f64::NAN),
            i3_equals_i2: c.i3_equals_i2,
        };
        Ok(())
    })
}

/// Value of a Gamma curve at dilution `d`, in chlorophenol inflow units.
/// `defined` is false where the curve does not exist.
#[no_mangle]
pub extern "C" fn chemostat_gamma(
    model: *const ChemostatModel,
    which: ChemostatGamma,
    method: ChemostatMethod,
    d: f64,
    value: *mut f64,
    defined: *mut bool,
) -> ChemostatStatus {
    guard(|| {
        let m = model_ref(model)?;
        positive(d, "d")?;
        let g = match which {
            ChemostatGamma::Gamma1 => diagram::gamma1(d, &m.web),
            ChemostatGamma::Gamma2 => diagram::gamma2(d, &m.web),
            ChemostatGamma::Gamma3 => match core_method(method, &m.web) {
                Method::Analytic => diagram::gamma3_analytic(d, &m.web)?,
                Method::Numeric => diagram::gamma3_numeric(d, &m.web)?,
            },
        };
        *out_ref(value, "value")? = g.unwrap_or(f64::NAN);
        *out_ref(defined, "defined")? = g.is_some();
        Ok(())
    })
}

fn core_method(method: ChemostatMethod, web: &FoodWeb<Monod>) -> Method {
    match method {
        ChemostatMethod::Auto => Method::default_for(web),
        ChemostatMethod::Analytic => Method::Analytic,
        ChemostatMethod::Numeric => Method::Numeric,
    }
}

fn region_code(r: Option<Region>) -> ChemostatRegion {
    match r {
        None => ChemostatRegion::Unclassified,
        Some(Region::J1) => ChemostatRegion::J1,
        Some(Region::J2) => ChemostatRegion::J2,
        Some(Region::J3) => ChemostatRegion::J3,
        Some(Region::J4) => ChemostatRegion::J4,
        Some(Region::J5) => ChemostatRegion::J5,
    }
}

/// Region label of the operating point `(d, s_ch_in)`.
#[no_mangle]
pub extern "C" fn chemostat_classify(
    model: *const ChemostatModel,
    d: f64,
    s_ch_in: f64,
    method: ChemostatMethod,
    out: *mut ChemostatLabel,
) -> ChemostatStatus {
    guard(|| {
        let m = model_ref(model)?;
        let out = out_ref(out, "out")?;
        positive(d, "d")?;
        finite_nonneg(s_ch_in, "s_ch_in")?;
        let l = diagram::classify_point(d, s_ch_in, &m.web, core_method(method, &m.web));
        if let Some(e) = l.error {
            return Err(fail(ChemostatStatus::NumericFailure, e));
        }
        *out = ChemostatLabel {
            region: region_code(l.label),
            near_boundary: l.near_boundary,
        };
        Ok(())
    })
}

fn kind_code(k: SteadyStateKind) -> ChemostatKind {
    match k {
        SteadyStateKind::Ss1 => ChemostatKind::Ss1,
        SteadyStateKind::Ss2Flat => ChemostatKind::Ss2Flat,
        SteadyStateKind::Ss2Sharp => ChemostatKind::Ss2Sharp,
        SteadyStateKind::Ss2Double => ChemostatKind::Ss2Double,
        SteadyStateKind::Ss3 => ChemostatKind::Ss3,
    }
}

fn verdict_code(v: Verdict) -> ChemostatVerdict {
    match v {
        Verdict::Stable => ChemostatVerdict::Stable,
        Verdict::Unstable => ChemostatVerdict::Unstable,
        Verdict::Marginal => ChemostatVerdict::Marginal,
    }
}

/// All steady states at `(d, s_ch_in)` with their numeric stability.
///
/// `count` receives the number of states (at most 4) even when `capacity` is
/// too small, in which case `BufferTooSmall` is returned and nothing is written.
///
/// # Safety
/// `buf` must point to `capacity` writable elements, or be null with `capacity == 0`.
#[no_mangle]
pub unsafe extern "C" fn chemostat_steady_states(
    model: *const ChemostatModel,
    d: f64,
    s_ch_in: f64,
    buf: *mut ChemostatSteadyState,
    capacity: usize,
    count: *mut usize,
) -> ChemostatStatus {
    guard(|| {
        let m = model_ref(model)?;
        let count = out_ref(count, "count")?;
        positive(d, "d")?;
        finite_nonneg(s_ch_in, "s_ch_in")?;
        let states = equilibria::all_steady_states(d, rescale_inflow(s_ch_in, m.web.y3y4), &m.web)?;
        *count = states.len();
        if states.len() > capacity {
            return Err(fail(
                ChemostatStatus::BufferTooSmall,
                format!("{} steady states, capacity {capacity}", states.len()),
            ));
        }
        if buf.is_null() && !states.is_empty() {
            return Err(fail(ChemostatStatus::NullPointer, "buf is null"));
        }
        for (k, ss) in states.iter().enumerate() {
            let v = stability::stability_numeric(ss, &m.web)?;
            let item = ChemostatSteadyState {
                kind: kind_code(ss.kind),
                rescaled: ss.state,
                full: rescaled_to_full(&ss.state, &m.params),
                verdict: verdict_code(v.verdict),
                max_real_part: v.max_real_part.unwrap_or(f64::NAN),
            };
            // SAFETY: k < states.len() <= capacity.
            unsafe { buf.add(k).write(item) };
        }
        Ok(())
    })
}
