//! Local stability of the steady states.
//!
//! Without decay the Jacobian is block triangular in the variables
//! `z_i = s_i + x_i` (suitably combined), so SS2 and SS3 reduce to a 3x3 block
//! `J1` and a Routh-Hurwitz test. With decay only the eigenvalues of the full
//! 6x6 Jacobian are available.

use serde::Serialize;

use crate::equilibria::{self, SteadyState, SteadyStateKind};
use crate::error::{Error, Result};
use crate::kinetics::{FoodWeb, GrowthModel, GrowthPartials};

pub use crate::eigen::{eigenvalues, eigenvalues_of_rows};
pub use num_complex::Complex64;

/// Real parts within this band of zero are reported as marginal.
pub const MARGINAL_BAND: f64 = 1e-7;
/// Band for the Routh-Hurwitz quantities.
pub const ROUTH_HURWITZ_BAND: f64 = 1e-10;
/// Relative band for the analytic criteria (`mu2 - D`, `psi'`, `F4`).
pub const ANALYTIC_BAND: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Stable,
    Unstable,
    Marginal,
}

impl Verdict {
    /// One-letter code: `S`, `U` or `M`.
    pub fn code(self) -> &'static str {
        match self {
            Verdict::Stable => "S",
            Verdict::Unstable => "U",
            Verdict::Marginal => "M",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityMethod {
    AnalyticNoMaintenance,
    EigenvalueNumeric,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityVerdict {
    pub verdict: Verdict,
    pub method: StabilityMethod,
    /// Largest real part of the Jacobian spectrum; numeric method only.
    pub max_real_part: Option<f64>,
    pub detail: String,
}

impl StabilityVerdict {
    fn analytic(verdict: Verdict, detail: impl Into<String>) -> Self {
        StabilityVerdict {
            verdict,
            method: StabilityMethod::AnalyticNoMaintenance,
            max_real_part: None,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobianBundle {
    /// Rows and columns in the order `(x0, x1, x2, s0, s1, s2)`.
    pub full: [[f64; 6]; 6],
    /// Reduced block in `(x0, x1, x2)`; only without decay.
    pub block_j1: Option<[[f64; 3]; 3]>,
    pub partials: GrowthPartials,
}

/// Analytic Jacobian of the rescaled right-hand side at `state`.
pub fn jacobian_full<G: GrowthModel>(state: &[f64; 6], d: f64, web: &FoodWeb<G>) -> JacobianBundle {
    let [x0, x1, x2, s0, s1, s2] = *state;
    let [a0, a1, a2] = web.decay;
    let w = web.omega;
    let g = &web.growth;
    let (m0, m1, m2) = (g.mu0(s0, s2), g.mu1(s1, s2), g.mu2(s2));
    let p = g.partials(s0, s1, s2);
    let (e, f, gg, h, i) = (p.e, p.f, p.g, p.h, p.i);

    let full = [
        [m0 - d - a0, 0.0, 0.0, e * x0, 0.0, f * x0],
        [0.0, m1 - d - a1, 0.0, 0.0, gg * x1, -h * x1],
        [0.0, 0.0, m2 - d - a2, 0.0, 0.0, i * x2],
        [-m0, 0.0, 0.0, -d - e * x0, 0.0, -f * x0],
        [m0, -m1, 0.0, e * x0, -d - gg * x1, f * x0 + h * x1],
        [
            -w * m0,
            m1,
            -m2,
            -w * e * x0,
            gg * x1,
            -d - w * f * x0 - h * x1 - i * x2,
        ],
    ];
    let block_j1 = (!web.decay.iter().any(|&a| a != 0.0)).then(|| {
        [
            [m0 - d - (e + w * f) * x0, f * x0, -f * x0],
            [(gg + w * h) * x1, m1 - d - (gg + h) * x1, h * x1],
            [-w * i * x2, i * x2, m2 - d - i * x2],
        ]
    });
    JacobianBundle {
        full,
        block_j1,
        partials: p,
    }
}

/// Serializes eigenvalue lists as `[[re, im], ...]`.
pub fn serialize_eigenvalues<S: serde::Serializer>(
    ev: &Option<Vec<Complex64>>,
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    let pairs: Option<Vec<[f64; 2]>> = ev
        .as_ref()
        .map(|v| v.iter().map(|l| [l.re, l.im]).collect());
    serde::Serialize::serialize(&pairs, ser)
}

/// Routh-Hurwitz test for `l^3 + f2 l^2 + f1 l + f0`.
pub fn routh_hurwitz_cubic(f2: f64, f1: f64, f0: f64) -> Verdict {
    let q = [f2, f1, f0, f1 * f2 - f0];
    if q.iter().any(|&v| v < -ROUTH_HURWITZ_BAND) {
        Verdict::Unstable
    } else if q.iter().any(|&v| v.abs() <= ROUTH_HURWITZ_BAND) {
        Verdict::Marginal
    } else {
        Verdict::Stable
    }
}

/// Coefficients `(f2, f1, f0)` of the characteristic polynomial of `J1` at an SS3.
pub fn ss3_characteristic<G: GrowthModel>(ss3: &SteadyState, web: &FoodWeb<G>) -> (f64, f64, f64) {
    let [x0, x1, x2, s0, s1, s2] = ss3.state;
    let p = web.growth.partials(s0, s1, s2);
    let w = web.omega;
    let delta = p.e * (p.g + p.h) - (1.0 - w) * p.f * p.g;
    let f2 = p.i * x2 + (p.g + p.h) * x1 + (p.e + w * p.f) * x0;
    let f1 = delta * x0 * x1 + p.e * p.i * x0 * x2 + p.g * p.i * x1 * x2;
    let f0 = p.e * p.g * p.i * x0 * x1 * x2;
    (f2, f1, f0)
}

fn require_no_decay<G>(operation: &'static str, web: &FoodWeb<G>) -> Result<()> {
    if web.decay.iter().any(|&a| a != 0.0) {
        return Err(Error::WrongMethod {
            operation,
            decay: web.decay,
        });
    }
    Ok(())
}

/// `F4 = f1 f2 - f0` at the SS3 state, written in terms of the growth partials.
pub fn f4_at<G: GrowthModel>(ss3: &SteadyState, web: &FoodWeb<G>) -> Result<f64> {
    require_no_decay("F4", web)?;
    let [x0, x1, x2, s0, s1, s2] = ss3.state;
    let p = web.growth.partials(s0, s1, s2);
    let w = web.omega;
    let delta = p.e * (p.g + p.h) - (1.0 - w) * p.f * p.g;
    let f2 = p.i * x2 + (p.g + p.h) * x1 + (p.e + w * p.f) * x0;
    Ok((p.e * p.i * x0 * x2 + delta * x0 * x1) * f2
        + (p.i * x2 + (p.g + p.h) * x1 + w * p.f * x0) * p.g * p.i * x1 * x2)
}

/// `F4(D, s0in)`; fails when SS3 does not exist.
pub fn f4<G: GrowthModel>(d: f64, s0in: f64, web: &FoodWeb<G>) -> Result<f64> {
    require_no_decay("F4", web)?;
    let ss3 = equilibria::find_ss3(d, s0in, web)?.ok_or_else(|| {
        Error::domain(
            "F4",
            format!("SS3 does not exist at D = {d}, s0in = {s0in:e}"),
        )
    })?;
    f4_at(&ss3, web)
}

fn sign_with_band(v: f64, scale: f64) -> Verdict {
    if v.abs() <= ANALYTIC_BAND * scale {
        Verdict::Marginal
    } else if v > 0.0 {
        Verdict::Stable
    } else {
        Verdict::Unstable
    }
}

/// Stable iff `mu2(s2) < D` and `psi'(s2) > 0`.
pub fn stability_ss2_no_maintenance<G: GrowthModel>(
    ss2: &SteadyState,
    web: &FoodWeb<G>,
) -> Result<StabilityVerdict> {
    require_no_decay("analytic SS2 stability", web)?;
    let d = ss2.d;
    let s2 = ss2.state[5];
    let growth_gap = sign_with_band(d - web.growth.mu2(s2), d);
    let (lo, hi) = equilibria::psi_interval(d, web)?;
    let slope = equilibria::dpsi_ds2(s2, d, web)?;
    let slope_scale = equilibria::psi(s2, d, web)? / (hi - lo);
    let branch = sign_with_band(slope, slope_scale);
    Ok(match (growth_gap, branch) {
        (Verdict::Unstable, _) => StabilityVerdict::analytic(Verdict::Unstable, "mu2<D fails"),
        (_, Verdict::Unstable) => StabilityVerdict::analytic(Verdict::Unstable, "dpsi>0 fails"),
        (Verdict::Stable, Verdict::Stable) => {
            StabilityVerdict::analytic(Verdict::Stable, "mu2<D and dpsi>0")
        }
        (Verdict::Marginal, _) => StabilityVerdict::analytic(Verdict::Marginal, "mu2=D"),
        (_, Verdict::Marginal) => StabilityVerdict::analytic(Verdict::Marginal, "dpsi=0"),
    })
}

/// Stable iff `F3(D) >= 0`, or `F3(D) < 0` and `F4(D, s0in) > 0`.
pub fn stability_ss3_no_maintenance<G: GrowthModel>(
    ss3: &SteadyState,
    web: &FoodWeb<G>,
) -> Result<StabilityVerdict> {
    require_no_decay("analytic SS3 stability", web)?;
    let d = ss3.d;
    let f3 = equilibria::f3(d, web)?;
    if f3 >= 0.0 {
        return Ok(StabilityVerdict::analytic(Verdict::Stable, "F3>=0"));
    }
    let (f2c, f1c, f0c) = ss3_characteristic(ss3, web);
    let scale = (f1c * f2c).abs() + f0c.abs();
    let v = f4_at(ss3, web)?;
    Ok(match sign_with_band(v, scale) {
        Verdict::Stable => StabilityVerdict::analytic(Verdict::Stable, "F4>0"),
        Verdict::Unstable => StabilityVerdict::analytic(Verdict::Unstable, "F4<0"),
        Verdict::Marginal => StabilityVerdict::analytic(Verdict::Marginal, "F4=0"),
    })
}

/// Closed-form verdict for any steady state of the model without decay.
pub fn stability_analytic<G: GrowthModel>(
    ss: &SteadyState,
    web: &FoodWeb<G>,
) -> Result<StabilityVerdict> {
    require_no_decay("analytic stability", web)?;
    match ss.kind {
        SteadyStateKind::Ss1 => Ok(StabilityVerdict::analytic(Verdict::Stable, "SS1")),
        SteadyStateKind::Ss2Double => Ok(StabilityVerdict::analytic(Verdict::Marginal, "dpsi=0")),
        SteadyStateKind::Ss2Flat | SteadyStateKind::Ss2Sharp => {
            stability_ss2_no_maintenance(ss, web)
        }
        SteadyStateKind::Ss3 => stability_ss3_no_maintenance(ss, web),
    }
}

pub fn classify_real_part(max_re: f64) -> Verdict {
    if max_re < -MARGINAL_BAND {
        Verdict::Stable
    } else if max_re > MARGINAL_BAND {
        Verdict::Unstable
    } else {
        Verdict::Marginal
    }
}

/// Spectrum of the full Jacobian at `ss`.
pub fn spectrum<G: GrowthModel>(ss: &SteadyState, web: &FoodWeb<G>) -> Result<Vec<Complex64>> {
    let jac = jacobian_full(&ss.state, ss.d, web);
    eigenvalues(&jac.full)
}

/// Verdict from the sign of the largest real part of the full Jacobian's spectrum.
pub fn stability_numeric<G: GrowthModel>(
    ss: &SteadyState,
    web: &FoodWeb<G>,
) -> Result<StabilityVerdict> {
    let ev = spectrum(ss, web)?;
    let max_re = ev[0].re;
    Ok(StabilityVerdict {
        verdict: classify_real_part(max_re),
        method: StabilityMethod::EigenvalueNumeric,
        max_real_part: Some(max_re),
        detail: format!("max Re = {max_re:e}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_spectrum() {
        let mut a = [[0.0; 6]; 6];
        for (k, row) in a.iter_mut().enumerate() {
            row[k] = -(k as f64 + 1.0);
        }
        let ev = eigenvalues(&a).unwrap();
        for (k, l) in ev.iter().enumerate() {
            assert!((l.re + (k + 1) as f64).abs() < 1e-14);
            assert_eq!(l.im, 0.0);
        }
    }

    #[test]
    fn rotation_spectrum() {
        let ev = eigenvalues(&[[0.0, 1.0], [-1.0, 0.0]]).unwrap();
        assert!(ev[0].re.abs() < 1e-15 && (ev[0].im - 1.0).abs() < 1e-15);
        assert!(ev[1].re.abs() < 1e-15 && (ev[1].im + 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_finite_matrix_is_rejected() {
        assert!(eigenvalues(&[[f64::NAN, 1.0], [0.0, 1.0]]).is_err());
    }

    #[test]
    fn routh_hurwitz_examples() {
        assert_eq!(routh_hurwitz_cubic(6.0, 11.0, 6.0), Verdict::Stable);
        assert_eq!(routh_hurwitz_cubic(1.0, 1.0, 2.0), Verdict::Unstable);
        assert_eq!(routh_hurwitz_cubic(2.0, 1.0, 2.0), Verdict::Marginal);
        assert_eq!(routh_hurwitz_cubic(-1.0, 1.0, 1.0), Verdict::Unstable);
    }

    #[test]
    fn real_part_band() {
        assert_eq!(classify_real_part(-1e-3), Verdict::Stable);
        assert_eq!(classify_real_part(5e-8), Verdict::Marginal);
        assert_eq!(classify_real_part(2e-7), Verdict::Unstable);
    }
}
