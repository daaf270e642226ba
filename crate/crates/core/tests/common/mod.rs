#![allow(dead_code)]

use chemostat_core::cli::{Case, CasePreset};
use chemostat_core::{rescale, FoodWeb, FullParameters, Monod};

pub const CASES: [Case; 4] = [Case::A, Case::B, Case::C, Case::D];

pub fn params(case: Case, kdec: f64) -> FullParameters {
    CasePreset::get(case).parameters().with_decay(kdec)
}

pub fn web(case: Case, kdec: f64) -> FoodWeb<Monod> {
    rescale(&params(case, kdec)).unwrap().food_web()
}

pub fn case_name(case: Case) -> &'static str {
    CasePreset::get(case).name
}

/// Sup norm of a matrix difference relative to the sup norm of `b`.
pub fn rel_diff<const N: usize>(a: &[[f64; N]; N], b: &[[f64; N]; N]) -> f64 {
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for i in 0..N {
        for j in 0..N {
            num = num.max((a[i][j] - b[i][j]).abs());
            den = den.max(b[i][j].abs());
        }
    }
    num / den
}
