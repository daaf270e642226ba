//! Growth kinetics, their inverses and the mapping from the biological
//! parameters to the rescaled model.
//!
//! The rescaled system uses `x0 = Y3Y4/Y0 X_ch`, `x1 = Y4/Y1 X_ph`,
//! `x2 = X_H2/Y2`, `s0 = Y3Y4 S_ch`, `s1 = Y4 S_ph`, `s2 = S_H2`, which sets every
//! yield to one except the hydrogen recycle fraction `omega`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots;

/// Stoichiometric fraction of chlorophenol carbon that becomes phenol.
pub const PHENOL_FROM_CHLOROPHENOL: f64 = 224.0 / 208.0;
/// Stoichiometric fraction of phenol that becomes hydrogen.
pub const HYDROGEN_FROM_PHENOL: f64 = 32.0 / 224.0;
/// Hydrogen consumed by dechlorination (Y5).
pub const HYDROGEN_USED_BY_DECHLORINATION: f64 = 16.0 / 208.0;

/// Relative tolerance of the generic (bisection) inverses.
pub const INVERSE_REL_TOL: f64 = 1e-12;

/// Biological parameters in kgCOD units, plus first-order decay rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "ParameterFile")]
pub struct FullParameters {
    pub km_ch: f64,
    #[serde(rename = "Ks_ch")]
    pub ks_ch: f64,
    #[serde(rename = "Y_ch")]
    pub y_ch: f64,
    pub km_ph: f64,
    #[serde(rename = "Ks_ph")]
    pub ks_ph: f64,
    #[serde(rename = "Y_ph")]
    pub y_ph: f64,
    pub km_h2: f64,
    #[serde(rename = "Ks_h2")]
    pub ks_h2: f64,
    #[serde(rename = "Ks_h2_c")]
    pub ks_h2_c: f64,
    #[serde(rename = "Y_h2")]
    pub y_h2: f64,
    #[serde(rename = "Ki_h2")]
    pub ki_h2: f64,
    pub kdec_ch: f64,
    pub kdec_ph: f64,
    pub kdec_h2: f64,
}

impl Default for FullParameters {
    /// Nominal values of the chlorophenol food web.
    fn default() -> Self {
        FullParameters {
            km_ch: 29.0,
            ks_ch: 0.053,
            y_ch: 0.019,
            km_ph: 26.0,
            ks_ph: 0.302,
            y_ph: 0.04,
            km_h2: 35.0,
            ks_h2: 2.5e-5,
            ks_h2_c: 1.0e-6,
            y_h2: 0.06,
            ki_h2: 3.5e-6,
            kdec_ch: 0.02,
            kdec_ph: 0.02,
            kdec_h2: 0.02,
        }
    }
}

/// On-disk parameter document. Omitted fields take their nominal value; `kdec`
/// sets all three decay rates and is overridden by the per-tier fields.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParameterFile {
    km_ch: Option<f64>,
    #[serde(rename = "Ks_ch")]
    ks_ch: Option<f64>,
    #[serde(rename = "Y_ch")]
    y_ch: Option<f64>,
    km_ph: Option<f64>,
    #[serde(rename = "Ks_ph")]
    ks_ph: Option<f64>,
    #[serde(rename = "Y_ph")]
    y_ph: Option<f64>,
    km_h2: Option<f64>,
    #[serde(rename = "Ks_h2")]
    ks_h2: Option<f64>,
    #[serde(rename = "Ks_h2_c")]
    ks_h2_c: Option<f64>,
    #[serde(rename = "Y_h2")]
    y_h2: Option<f64>,
    #[serde(rename = "Ki_h2")]
    ki_h2: Option<f64>,
    kdec: Option<f64>,
    kdec_ch: Option<f64>,
    kdec_ph: Option<f64>,
    kdec_h2: Option<f64>,
}

impl From<ParameterFile> for FullParameters {
    fn from(f: ParameterFile) -> Self {
        let d = FullParameters::default();
        let kdec = f.kdec;
        FullParameters {
            km_ch: f.km_ch.unwrap_or(d.km_ch),
            ks_ch: f.ks_ch.unwrap_or(d.ks_ch),
            y_ch: f.y_ch.unwrap_or(d.y_ch),
            km_ph: f.km_ph.unwrap_or(d.km_ph),
            ks_ph: f.ks_ph.unwrap_or(d.ks_ph),
            y_ph: f.y_ph.unwrap_or(d.y_ph),
            km_h2: f.km_h2.unwrap_or(d.km_h2),
            ks_h2: f.ks_h2.unwrap_or(d.ks_h2),
            ks_h2_c: f.ks_h2_c.unwrap_or(d.ks_h2_c),
            y_h2: f.y_h2.unwrap_or(d.y_h2),
            ki_h2: f.ki_h2.unwrap_or(d.ki_h2),
            kdec_ch: f.kdec_ch.or(kdec).unwrap_or(d.kdec_ch),
            kdec_ph: f.kdec_ph.or(kdec).unwrap_or(d.kdec_ph),
            kdec_h2: f.kdec_h2.or(kdec).unwrap_or(d.kdec_h2),
        }
    }
}

impl FullParameters {
    /// Parse a JSON parameter document.
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn with_decay(mut self, kdec: f64) -> Self {
        self.kdec_ch = kdec;
        self.kdec_ph = kdec;
        self.kdec_h2 = kdec;
        self
    }

    pub fn y3(&self) -> f64 {
        PHENOL_FROM_CHLOROPHENOL * (1.0 - self.y_ch)
    }

    pub fn y4(&self) -> f64 {
        HYDROGEN_FROM_PHENOL * (1.0 - self.y_ph)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("km_ch", self.km_ch),
            ("Ks_ch", self.ks_ch),
            ("km_ph", self.km_ph),
            ("Ks_ph", self.ks_ph),
            ("km_h2", self.km_h2),
            ("Ks_h2", self.ks_h2),
            ("Ks_h2_c", self.ks_h2_c),
            ("Ki_h2", self.ki_h2),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite and > 0, got {v}"),
                });
            }
        }
        for (name, v) in [
            ("Y_ch", self.y_ch),
            ("Y_ph", self.y_ph),
            ("Y_h2", self.y_h2),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("yield must lie in (0, 1), got {v}"),
                });
            }
        }
        for (name, v) in [
            ("kdec_ch", self.kdec_ch),
            ("kdec_ph", self.kdec_ph),
            ("kdec_h2", self.kdec_h2),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("decay rate must be >= 0, got {v}"),
                });
            }
        }
        Ok(())
    }
}

/// Parameters of the rescaled Monod model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescaledParameters {
    pub m0: f64,
    pub k0: f64,
    pub l0: f64,
    pub m1: f64,
    pub k1: f64,
    pub ki: f64,
    pub m2: f64,
    pub k2: f64,
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub omega: f64,
    pub y3y4: f64,
}

impl RescaledParameters {
    pub fn decay(&self) -> [f64; 3] {
        [self.a0, self.a1, self.a2]
    }

    pub fn with_decay(mut self, a: [f64; 3]) -> Self {
        [self.a0, self.a1, self.a2] = a;
        self
    }

    pub fn without_maintenance(self) -> Self {
        self.with_decay([0.0; 3])
    }

    pub fn growth(&self) -> Monod {
        Monod {
            m0: self.m0,
            k0: self.k0,
            l0: self.l0,
            m1: self.m1,
            k1: self.k1,
            ki: self.ki,
            m2: self.m2,
            k2: self.k2,
        }
    }

    pub fn food_web(&self) -> FoodWeb<Monod> {
        FoodWeb {
            growth: self.growth(),
            decay: self.decay(),
            omega: self.omega,
            y3y4: self.y3y4,
        }
    }
}

/// Map the biological parameters onto the rescaled model.
pub fn rescale(full: &FullParameters) -> Result<RescaledParameters> {
    full.validate()?;
    let y3 = full.y3();
    let y4 = full.y4();
    let y3y4 = y3 * y4;
    if !(y3y4 > 0.0) {
        return Err(Error::InvalidParameter {
            name: "Y_ch/Y_ph",
            reason: "a yield of one makes omega singular".into(),
        });
    }
    Ok(RescaledParameters {
        m0: full.y_ch * full.km_ch,
        k0: y3y4 * full.ks_ch,
        l0: full.ks_h2_c,
        m1: full.y_ph * full.km_ph,
        k1: y4 * full.ks_ph,
        ki: full.ki_h2,
        m2: full.y_h2 * full.km_h2,
        k2: full.ks_h2,
        a0: full.kdec_ch,
        a1: full.kdec_ph,
        a2: full.kdec_h2,
        omega: HYDROGEN_USED_BY_DECHLORINATION / y3y4,
        y3y4,
    })
}

/// `S_ch,in` (kgCOD/m3) to the rescaled inflow `s0_in`.
pub fn rescale_inflow(s_ch_in: f64, y3y4: f64) -> f64 {
    y3y4 * s_ch_in
}

pub fn unrescale_inflow(s0_in: f64, y3y4: f64) -> f64 {
    s0_in / y3y4
}

/// Partial derivatives of the growth functions at a point. `h` carries the
/// opposite sign of `d mu1 / d s2` so that all five are positive under the
/// growth assumptions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthPartials {
    /// d mu0 / d s0
    pub e: f64,
    /// d mu0 / d s2
    pub f: f64,
    /// d mu1 / d s1
    pub g: f64,
    /// -d mu1 / d s2
    pub h: f64,
    /// d mu2 / d s2
    pub i: f64,
}

fn fd_step(s: f64) -> f64 {
    (1e-6 * s.abs()).max(1e-12)
}

fn fd_derivative(f: impl Fn(f64) -> f64, s: f64) -> f64 {
    let h = fd_step(s);
    if s - h >= 0.0 {
        (f(s + h) - f(s - h)) / (2.0 * h)
    } else {
        (f(s + h) - f(s)) / h
    }
}

/// The three specific growth rates of the rescaled model.
///
/// Implementors must provide the rates and their suprema in the first
/// substrate argument; inverses, partials and the break-even concentrations
/// fall back to bisection and finite differences.
pub trait GrowthModel: Sync {
    fn mu0(&self, s0: f64, s2: f64) -> f64;
    fn mu1(&self, s1: f64, s2: f64) -> f64;
    fn mu2(&self, s2: f64) -> f64;

    /// `mu0(+inf, s2)`
    fn mu0_sup(&self, s2: f64) -> f64;
    /// `mu1(+inf, s2)`
    fn mu1_sup(&self, s2: f64) -> f64;
    /// `mu2(+inf)`
    fn mu2_sup(&self) -> f64;

    fn partials(&self, s0: f64, s1: f64, s2: f64) -> GrowthPartials {
        GrowthPartials {
            e: fd_derivative(|u| self.mu0(u, s2), s0),
            f: fd_derivative(|u| self.mu0(s0, u), s2),
            g: fd_derivative(|u| self.mu1(u, s2), s1),
            h: -fd_derivative(|u| self.mu1(s1, u), s2),
            i: fd_derivative(|u| self.mu2(u), s2),
        }
    }

    /// `s0` such that `mu0(s0, s2) = y`.
    fn mu0_inverse(&self, y: f64, s2: f64) -> Result<f64> {
        let sup = self.mu0_sup(s2);
        if !(y >= 0.0 && y < sup) {
            return Err(Error::no_solution(
                "M0",
                format!("rate {y:e} outside [0, {sup:e}) at s2 = {s2:e}"),
            ));
        }
        roots::invert_increasing(|s| self.mu0(s, s2), y, INVERSE_REL_TOL)
    }

    /// `s1` such that `mu1(s1, s2) = y`.
    fn mu1_inverse(&self, y: f64, s2: f64) -> Result<f64> {
        let sup = self.mu1_sup(s2);
        if !(y >= 0.0 && y < sup) {
            return Err(Error::no_solution(
                "M1",
                format!("rate {y:e} outside [0, {sup:e}) at s2 = {s2:e}"),
            ));
        }
        roots::invert_increasing(|s| self.mu1(s, s2), y, INVERSE_REL_TOL)
    }

    /// `s2` such that `mu2(s2) = y`.
    fn mu2_inverse(&self, y: f64) -> Result<f64> {
        let sup = self.mu2_sup();
        if !(y >= 0.0 && y < sup) {
            return Err(Error::no_solution(
                "M2",
                format!("rate {y:e} outside [0, {sup:e})"),
            ));
        }
        roots::invert_increasing(|s| self.mu2(s), y, INVERSE_REL_TOL)
    }

    /// Hydrogen level at which `mu0(+inf, s2) = y`; below it the
    /// chlorophenol degrader cannot reach the rate `y`.
    fn mu0_break_even(&self, y: f64) -> Result<f64> {
        if y < 0.0 {
            return Err(Error::no_solution("s2_0", format!("negative rate {y:e}")));
        }
        roots::invert_increasing(|s| self.mu0_sup(s), y, INVERSE_REL_TOL)
            .map_err(|_| Error::no_solution("s2_0", format!("rate {y:e} is never reached")))
    }

    /// Hydrogen level at which `mu1(+inf, s2) = y`; above it the phenol
    /// degrader is inhibited below the rate `y`.
    fn mu1_break_even(&self, y: f64) -> Result<f64> {
        if !(y > 0.0 && y < self.mu1_sup(0.0)) {
            return Err(Error::no_solution(
                "s2_1",
                format!("rate {y:e} outside (0, {:e})", self.mu1_sup(0.0)),
            ));
        }
        roots::invert_decreasing(|s| self.mu1_sup(s), y, INVERSE_REL_TOL)
    }

    /// Closed-form dilution rate at which the two break-even hydrogen levels
    /// meet, if the model has one. `None` makes callers bisect.
    fn break_even_crossing(&self, _a0: f64, _a1: f64) -> Option<f64> {
        None
    }
}

impl<G: GrowthModel + ?Sized> GrowthModel for &G {
    fn mu0(&self, s0: f64, s2: f64) -> f64 {
        (**self).mu0(s0, s2)
    }
    fn mu1(&self, s1: f64, s2: f64) -> f64 {
        (**self).mu1(s1, s2)
    }
    fn mu2(&self, s2: f64) -> f64 {
        (**self).mu2(s2)
    }
    fn mu0_sup(&self, s2: f64) -> f64 {
        (**self).mu0_sup(s2)
    }
    fn mu1_sup(&self, s2: f64) -> f64 {
        (**self).mu1_sup(s2)
    }
    fn mu2_sup(&self) -> f64 {
        (**self).mu2_sup()
    }
    fn partials(&self, s0: f64, s1: f64, s2: f64) -> GrowthPartials {
        (**self).partials(s0, s1, s2)
    }
    fn mu0_inverse(&self, y: f64, s2: f64) -> Result<f64> {
        (**self).mu0_inverse(y, s2)
    }
    fn mu1_inverse(&self, y: f64, s2: f64) -> Result<f64> {
        (**self).mu1_inverse(y, s2)
    }
    fn mu2_inverse(&self, y: f64) -> Result<f64> {
        (**self).mu2_inverse(y)
    }
    fn mu0_break_even(&self, y: f64) -> Result<f64> {
        (**self).mu0_break_even(y)
    }
    fn mu1_break_even(&self, y: f64) -> Result<f64> {
        (**self).mu1_break_even(y)
    }
    fn break_even_crossing(&self, a0: f64, a1: f64) -> Option<f64> {
        (**self).break_even_crossing(a0, a1)
    }
}

/// Monod kinetics with hydrogen dependence of the chlorophenol degrader and
/// hydrogen product inhibition of the phenol degrader.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monod {
    pub m0: f64,
    pub k0: f64,
    pub l0: f64,
    pub m1: f64,
    pub k1: f64,
    pub ki: f64,
    pub m2: f64,
    pub k2: f64,
}

impl GrowthModel for Monod {
    fn mu0(&self, s0: f64, s2: f64) -> f64 {
        self.m0 * s0 / (self.k0 + s0) * s2 / (self.l0 + s2)
    }

    fn mu1(&self, s1: f64, s2: f64) -> f64 {
        self.m1 * s1 / (self.k1 + s1) / (1.0 + s2 / self.ki)
    }

    fn mu2(&self, s2: f64) -> f64 {
        self.m2 * s2 / (self.k2 + s2)
    }

    fn mu0_sup(&self, s2: f64) -> f64 {
        self.m0 * s2 / (self.l0 + s2)
    }

    fn mu1_sup(&self, s2: f64) -> f64 {
        self.m1 / (1.0 + s2 / self.ki)
    }

    fn mu2_sup(&self) -> f64 {
        self.m2
    }

    fn partials(&self, s0: f64, s1: f64, s2: f64) -> GrowthPartials {
        let sat0 = s0 / (self.k0 + s0);
        let sat2 = s2 / (self.l0 + s2);
        let sat1 = s1 / (self.k1 + s1);
        let inhib = 1.0 / (1.0 + s2 / self.ki);
        GrowthPartials {
            e: self.m0 * self.k0 / (self.k0 + s0).powi(2) * sat2,
            f: self.m0 * sat0 * self.l0 / (self.l0 + s2).powi(2),
            g: self.m1 * self.k1 / (self.k1 + s1).powi(2) * inhib,
            h: self.m1 * sat1 * self.ki / (self.ki + s2).powi(2),
            i: self.m2 * self.k2 / (self.k2 + s2).powi(2),
        }
    }

    fn mu0_inverse(&self, y: f64, s2: f64) -> Result<f64> {
        let sup = self.mu0_sup(s2);
        if !(y >= 0.0 && y < sup) {
            return Err(Error::no_solution(
                "M0",
                format!("rate {y:e} outside [0, {sup:e}) at s2 = {s2:e}"),
            ));
        }
        Ok(self.k0 * y / (sup - y))
    }

    fn mu1_inverse(&self, y: f64, s2: f64) -> Result<f64> {
        let sup = self.mu1_sup(s2);
        if !(y >= 0.0 && y < sup) {
            return Err(Error::no_solution(
                "M1",
                format!("rate {y:e} outside [0, {sup:e}) at s2 = {s2:e}"),
            ));
        }
        Ok(self.k1 * y / (sup - y))
    }

    fn mu2_inverse(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0 && y < self.m2) {
            return Err(Error::no_solution(
                "M2",
                format!("rate {y:e} outside [0, {:e})", self.m2),
            ));
        }
        Ok(self.k2 * y / (self.m2 - y))
    }

    fn mu0_break_even(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0 && y < self.m0) {
            return Err(Error::no_solution(
                "s2_0",
                format!("rate {y:e} outside [0, {:e})", self.m0),
            ));
        }
        Ok(self.l0 * y / (self.m0 - y))
    }

    fn mu1_break_even(&self, y: f64) -> Result<f64> {
        if !(y > 0.0 && y < self.m1) {
            return Err(Error::no_solution(
                "s2_1",
                format!("rate {y:e} outside (0, {:e})", self.m1),
            ));
        }
        Ok(self.ki * (self.m1 - y) / y)
    }

    fn break_even_crossing(&self, a0: f64, a1: f64) -> Option<f64> {
        // L0 (u + a0)(u + a1) = Ki (m1 - a1 - u)(m0 - a0 - u)
        let (p, q) = (self.m0 - a0, self.m1 - a1);
        let qa = self.l0 - self.ki;
        let qb = self.l0 * (a0 + a1) + self.ki * (p + q);
        let qc = self.l0 * a0 * a1 - self.ki * p * q;
        let upper = p.min(q);
        let admissible = |u: f64| u > 0.0 && u < upper;
        let roots = if qa == 0.0 {
            vec![-qc / qb]
        } else {
            let disc = qb * qb - 4.0 * qa * qc;
            if disc < 0.0 {
                return None;
            }
            let t = -0.5 * (qb + qb.signum() * disc.sqrt());
            vec![t / qa, qc / t]
        };
        roots.into_iter().find(|&u| admissible(u))
    }
}

/// Wraps a growth model and hides its closed-form inverses and break-even
/// concentrations, so that everything downstream goes through bisection.
/// Rates, suprema and partials are forwarded.
#[derive(Debug, Clone, Copy)]
pub struct NumericInverse<G>(pub G);

impl<G: GrowthModel> GrowthModel for NumericInverse<G> {
    fn mu0(&self, s0: f64, s2: f64) -> f64 {
        self.0.mu0(s0, s2)
    }
    fn mu1(&self, s1: f64, s2: f64) -> f64 {
        self.0.mu1(s1, s2)
    }
    fn mu2(&self, s2: f64) -> f64 {
        self.0.mu2(s2)
    }
    fn mu0_sup(&self, s2: f64) -> f64 {
        self.0.mu0_sup(s2)
    }
    fn mu1_sup(&self, s2: f64) -> f64 {
        self.0.mu1_sup(s2)
    }
    fn mu2_sup(&self) -> f64 {
        self.0.mu2_sup()
    }
    fn partials(&self, s0: f64, s1: f64, s2: f64) -> GrowthPartials {
        self.0.partials(s0, s1, s2)
    }
}

/// A growth model together with the decay rates, `omega` and the inflow
/// scaling factor: everything the steady-state and stability analysis needs.
#[derive(Debug, Clone, Copy)]
pub struct FoodWeb<G> {
    pub growth: G,
    /// `[a0, a1, a2]`
    pub decay: [f64; 3],
    pub omega: f64,
    pub y3y4: f64,
}

impl<G: GrowthModel> FoodWeb<G> {
    pub fn has_maintenance(&self) -> bool {
        self.decay.iter().any(|&a| a != 0.0)
    }

    pub fn with_decay(&self, decay: [f64; 3]) -> FoodWeb<&G> {
        FoodWeb {
            growth: &self.growth,
            decay,
            omega: self.omega,
            y3y4: self.y3y4,
        }
    }

    pub fn by_ref(&self) -> FoodWeb<&G> {
        self.with_decay(self.decay)
    }

    pub fn map_growth<H>(self, f: impl FnOnce(G) -> H) -> FoodWeb<H> {
        FoodWeb {
            growth: f(self.growth),
            decay: self.decay,
            omega: self.omega,
            y3y4: self.y3y4,
        }
    }
}

fn check_substrate(function: &'static str, values: &[f64]) -> Result<()> {
    if values.iter().any(|&s| !(s >= 0.0)) {
        return Err(Error::domain(
            function,
            format!("substrate concentrations must be >= 0, got {values:?}"),
        ));
    }
    Ok(())
}

/// `mu0(s0, s2)` with a domain check.
pub fn mu0<G: GrowthModel>(s0: f64, s2: f64, model: &G) -> Result<f64> {
    check_substrate("mu0", &[s0, s2])?;
    Ok(model.mu0(s0, s2))
}

pub fn mu1<G: GrowthModel>(s1: f64, s2: f64, model: &G) -> Result<f64> {
    check_substrate("mu1", &[s1, s2])?;
    Ok(model.mu1(s1, s2))
}

pub fn mu2<G: GrowthModel>(s2: f64, model: &G) -> Result<f64> {
    check_substrate("mu2", &[s2])?;
    Ok(model.mu2(s2))
}

/// Sample points for [`check_growth_assumptions`].
#[derive(Debug, Clone)]
pub struct SampleGrid {
    pub substrate0: Vec<f64>,
    pub substrate1: Vec<f64>,
    pub hydrogen: Vec<f64>,
    /// Dilution rates, as fractions of `D1`, at which the unique-minimum
    /// property of psi is probed.
    pub dilution_fractions: Vec<f64>,
}

impl SampleGrid {
    /// `n` log-spaced points per axis between `lo` and `hi`; hydrogen spans
    /// `[lo_h2, hi_h2]`.
    pub fn log(n: usize, (lo, hi): (f64, f64), (lo_h2, hi_h2): (f64, f64)) -> Self {
        let logspace = |a: f64, b: f64| -> Vec<f64> {
            (0..n)
                .map(|k| {
                    let t = if n > 1 {
                        k as f64 / (n - 1) as f64
                    } else {
                        0.0
                    };
                    (a.ln() + t * (b.ln() - a.ln())).exp()
                })
                .collect()
        };
        SampleGrid {
            substrate0: logspace(lo, hi),
            substrate1: logspace(lo, hi),
            hydrogen: logspace(lo_h2, hi_h2),
            dilution_fractions: vec![0.05, 0.25, 0.5, 0.75, 0.95],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AssumptionReport {
    pub checks: Vec<AssumptionCheck>,
}

impl AssumptionReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn passed(&self, name: &str) -> bool {
        self.checks
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.passed)
            .unwrap_or(false)
    }
}

struct Checker {
    name: &'static str,
    failure: Option<String>,
}

impl Checker {
    fn new(name: &'static str) -> Self {
        Checker {
            name,
            failure: None,
        }
    }

    fn require(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok && self.failure.is_none() {
            self.failure = Some(msg());
        }
    }

    fn finish(self) -> AssumptionCheck {
        AssumptionCheck {
            name: self.name,
            passed: self.failure.is_none(),
            detail: self.failure,
        }
    }
}

/// Sign tests of the growth assumptions H1-H8 on a sample grid. Failures are
/// reported per assumption, never raised.
pub fn check_growth_assumptions<G: GrowthModel>(
    web: &FoodWeb<G>,
    grid: &SampleGrid,
) -> AssumptionReport {
    let m = &web.growth;
    let pos = |v: f64| v > 0.0 && v.is_finite();

    let mut h1 = Checker::new("H1");
    let mut h2 = Checker::new("H2");
    let mut h3 = Checker::new("H3");
    let mut h4 = Checker::new("H4");
    let mut h5 = Checker::new("H5");
    let mut h6 = Checker::new("H6");
    let mut h7 = Checker::new("H7");

    for &s2 in &grid.hydrogen {
        h1.require(m.mu0(0.0, s2) == 0.0, || format!("mu0(0, {s2:e}) != 0"));
        h2.require(m.mu1(0.0, s2) == 0.0, || format!("mu1(0, {s2:e}) != 0"));
        for &s0 in &grid.substrate0 {
            let v = m.mu0(s0, s2);
            h1.require(pos(v), || format!("mu0({s0:e}, {s2:e}) = {v:e}"));
            let p = m.partials(s0, 0.0, s2);
            h4.require(p.e > 0.0 && p.f > 0.0, || {
                format!(
                    "partials of mu0 at ({s0:e}, {s2:e}) = ({:e}, {:e})",
                    p.e, p.f
                )
            });
        }
        for &s1 in &grid.substrate1 {
            let v = m.mu1(s1, s2);
            h2.require(pos(v), || format!("mu1({s1:e}, {s2:e}) = {v:e}"));
            let p = m.partials(0.0, s1, s2);
            h5.require(p.g > 0.0 && p.h > 0.0, || {
                format!(
                    "partials of mu1 at ({s1:e}, {s2:e}) = ({:e}, {:e})",
                    p.g, -p.h
                )
            });
        }
        let v = m.mu2(s2);
        h3.require(pos(v), || format!("mu2({s2:e}) = {v:e}"));
        let i = m.partials(0.0, 0.0, s2).i;
        h6.require(i > 0.0, || format!("d mu2/d s2 at {s2:e} = {i:e}"));
    }
    for &s0 in &grid.substrate0 {
        h1.require(m.mu0(s0, 0.0) == 0.0, || format!("mu0({s0:e}, 0) != 0"));
    }
    for &s1 in &grid.substrate1 {
        let v = m.mu1(s1, 0.0);
        h2.require(pos(v), || format!("mu1({s1:e}, 0) = {v:e}"));
    }
    h3.require(m.mu2(0.0) == 0.0, || "mu2(0) != 0".into());

    let mut hs = grid.hydrogen.clone();
    hs.sort_by(f64::total_cmp);
    for w in hs.windows(2) {
        let (u, v) = (w[0], w[1]);
        if u == v {
            continue;
        }
        h7.require(m.mu0_sup(v) > m.mu0_sup(u), || {
            format!("mu0(+inf, .) not increasing between {u:e} and {v:e}")
        });
        h7.require(m.mu1_sup(v) < m.mu1_sup(u), || {
            format!("mu1(+inf, .) not decreasing between {u:e} and {v:e}")
        });
    }

    let mut h8 = Checker::new("H8");
    match crate::equilibria::dilution_upper_bound(web) {
        Ok(d1) => {
            for &frac in &grid.dilution_fractions {
                let d = frac * d1;
                if d <= 0.0 {
                    continue;
                }
                if let Err(e) = crate::equilibria::psi_minimum_is_unique(d, web) {
                    h8.require(false, || format!("D = {d:e}: {e}"));
                }
            }
        }
        Err(e) => h8.require(false, || format!("no interval I1: {e}")),
    }

    AssumptionReport {
        checks: vec![
            h1.finish(),
            h2.finish(),
            h3.finish(),
            h4.finish(),
            h5.finish(),
            h6.finish(),
            h7.finish(),
            h8.finish(),
        ],
    }
}
