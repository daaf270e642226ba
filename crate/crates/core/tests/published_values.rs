//! Published values for the nominal parameter set and its variants.

mod common;

use chemostat_core::cli::Case;
use chemostat_core::diagram::{self, GridSpec, Method, Region};
use chemostat_core::equilibria::{self, I2Kind, SteadyStateKind};
use chemostat_core::simulate;
use chemostat_core::stability::Verdict;
use common::*;
use std::collections::BTreeSet;

const TOL: f64 = 0.002;

fn close(got: Option<f64>, want: f64) -> bool {
    got.is_some_and(|g| (g - want).abs() <= TOL)
}

fn interval_from_zero(i2: I2Kind) -> Option<f64> {
    match i2 {
        I2Kind::IntervalFromZero { d2 } => Some(d2),
        _ => None,
    }
}

#[test]
fn case_a_critical_dilutions() {
    for (kdec, d1, d2, d3) in [(0.02, 0.432, 0.373, 0.058), (0.0, 0.452, 0.393, 0.078)] {
        let c = equilibria::critical_dilutions(&web(Case::A, kdec));
        assert!(close(c.d1, d1), "{c:?}");
        assert!(close(interval_from_zero(c.i2), d2), "{c:?}");
        assert!(close(c.d3, d3), "{c:?}");
    }
}

#[test]
fn case_b_critical_dilutions() {
    for (kdec, d1, d2) in [(0.02, 0.329, 0.236), (0.0, 0.349, 0.256)] {
        let c = equilibria::critical_dilutions(&web(Case::B, kdec));
        assert!(close(c.d1, d1), "{c:?}");
        assert!(close(interval_from_zero(c.i2), d2), "{c:?}");
        assert!(c.i3_equals_i2 && c.d3.is_none(), "{c:?}");
    }
}

#[test]
fn case_c_without_maintenance() {
    let c = equilibria::critical_dilutions(&web(Case::C, 0.0));
    assert!(close(c.d1, 0.303), "{c:?}");
    assert_eq!(c.i2, I2Kind::Empty);
}

#[test]
fn case_c_with_maintenance_has_empty_i2() {
    // D1 itself is checked by the acceptance target
    let c = equilibria::critical_dilutions(&web(Case::C, 0.02));
    assert_eq!(c.i2, I2Kind::Empty);
}

#[test]
fn case_d_critical_dilutions() {
    for (kdec, d1, lo, hi, d3) in [
        (0.02, 0.238, 0.101, 0.198, 0.161),
        (0.0, 0.258, 0.121, 0.218, 0.181),
    ] {
        let c = equilibria::critical_dilutions(&web(Case::D, kdec));
        assert!(close(c.d1, d1), "{c:?}");
        let I2Kind::InteriorInterval { d2min, d2max } = c.i2 else {
            panic!("{c:?}");
        };
        assert!(close(Some(d2min), lo) && close(Some(d2max), hi), "{c:?}");
        assert!(close(c.d3, d3), "{c:?}");
    }
}

#[test]
fn gamma1_intercept() {
    let g = diagram::gamma1(1e-9, &web(Case::A, 0.02)).unwrap();
    assert!((g - 0.0195).abs() <= 0.0005, "{g}");
}

#[test]
fn gamma1_and_gamma2_tangent_at_d3() {
    let w = web(Case::A, 0.02);
    let d3 = equilibria::critical_dilutions(&w).d3.unwrap();
    assert!((d3 - 0.058).abs() < TOL);
    for d in [d3 - 1e-4, d3, d3 + 1e-4] {
        let gap = diagram::gamma2(d, &w).unwrap() - diagram::gamma1(d, &w).unwrap();
        assert!((0.0..1e-4).contains(&gap), "D={d}: {gap}");
    }
}

#[test]
fn above_d1_only_washout() {
    let w = web(Case::A, 0.0);
    let l = diagram::classify_point(0.46, 5.0, &w, Method::Analytic);
    assert_eq!(l.label, Some(Region::J1));
    assert_eq!(l.existing(), vec![SteadyStateKind::Ss1]);
}

#[test]
fn j2_between_gamma1_and_gamma2() {
    let w = web(Case::A, 0.0);
    let (g1, g2) = (
        diagram::gamma1(0.2, &w).unwrap(),
        diagram::gamma2(0.2, &w).unwrap(),
    );
    let l = diagram::classify_point(0.2, 0.5 * (g1 + g2), &w, Method::Analytic);
    assert_eq!(l.label, Some(Region::J2));
}

#[test]
fn transect_point_beta_is_j5() {
    let w = web(Case::A, 0.02);
    let l = diagram::classify_point(0.01, 0.097, &w, Method::Numeric);
    assert_eq!(l.label, Some(Region::J5));
}

#[test]
fn j3_point_has_four_states_with_ss3_stable() {
    let w = web(Case::A, 0.0);
    let l = diagram::classify_point(0.2, 1.0, &w, Method::Analytic);
    assert_eq!(l.label, Some(Region::J3));
    assert_eq!(l.existing().len(), 4);
    assert_eq!(l.verdict(SteadyStateKind::Ss3), Some(Verdict::Stable));
    assert_eq!(l.verdict(SteadyStateKind::Ss1), Some(Verdict::Stable));
}

#[test]
fn regions_ordered_along_inflow_between_d3_and_d2() {
    let w = web(Case::A, 0.0);
    for d in [0.1, 0.2, 0.3] {
        let mut seen = Vec::new();
        for k in 0..400 {
            let s = 1e-3 * 10f64.powf(4.0 * k as f64 / 399.0);
            let r = diagram::classify_point(d, s, &w, Method::Analytic)
                .label
                .unwrap();
            if seen.last() != Some(&r) {
                seen.push(r);
            }
        }
        assert_eq!(seen, vec![Region::J1, Region::J2, Region::J3], "D={d}");
    }
}

#[test]
fn hopf_crossing_at_d_001() {
    let w = web(Case::A, 0.02);
    let scan = simulate::hopf_scan(0.01, (0.08, 0.12), 1000, &w).unwrap();
    assert_eq!(scan.crossings.len(), 1);
    let c = scan.crossings[0];
    assert!((c.s_ch_in - 0.1034).abs() <= 0.003, "{c:?}");
    assert!(c.frequency > 0.0 && c.others_negative);
    assert!(scan.others_negative_throughout);
    let g3 = diagram::gamma3_numeric(0.01, &w).unwrap().unwrap();
    assert!((g3 - 0.1034).abs() <= 0.003, "{g3}");
}

fn inventory(case: Case, kdec: f64, n: usize) -> BTreeSet<Region> {
    let w = web(case, kdec);
    let spec = GridSpec {
        nd: n,
        ns: n,
        ..GridSpec::default_for(&w)
    };
    let grid = diagram::scan(&spec, &w, Method::default_for(&w), "t").unwrap();
    assert_eq!(grid.unclassified(), 0);
    grid.regions()
}

#[test]
fn case_b_loses_j2_and_case_c_keeps_j1_j4() {
    for kdec in [0.0, 0.02] {
        assert!(!inventory(Case::B, kdec, 60).contains(&Region::J2));
        let c = inventory(Case::C, kdec, 60);
        assert_eq!(c, BTreeSet::from([Region::J1, Region::J4]));
    }
}

#[test]
fn case_d_without_maintenance_shows_all_five() {
    let all: BTreeSet<Region> = Region::ALL.into_iter().collect();
    assert_eq!(inventory(Case::D, 0.0, 200), all);
}
