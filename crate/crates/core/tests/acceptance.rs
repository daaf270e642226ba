//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero on any failure.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use chemostat_core::cli::Case;
use chemostat_core::diagram::{self, GridSpec, Method, Region};
use chemostat_core::equilibria::{self, CriticalDilutions, I2Kind, SteadyStateKind};
use chemostat_core::simulate::{self, Outcome};
use chemostat_core::stability;
use chemostat_core::{rescale, FoodWeb, FullParameters, GrowthModel, Monod};
use common::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const TABLE_TOL: f64 = 0.002;

struct Check {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Check {
    Check {
        ok,
        detail: detail.into(),
    }
}

fn within(got: Option<f64>, want: f64, tol: f64) -> bool {
    got.is_some_and(|g| (g - want).abs() <= tol)
}

fn d2_of(c: &CriticalDilutions) -> Option<f64> {
    match c.i2 {
        I2Kind::IntervalFromZero { d2 } => Some(d2),
        _ => None,
    }
}

fn fmt(v: Option<f64>) -> String {
    v.map_or("none".into(), |v| format!("{v:.4}"))
}

fn criterion_1() -> Check {
    let t = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for (kdec, d1, d2, d3) in [(0.02, 0.432, 0.373, 0.058), (0.0, 0.452, 0.393, 0.078)] {
        let c = equilibria::critical_dilutions(&web(Case::A, kdec));
        let good = within(c.d1, d1, TABLE_TOL)
            && within(d2_of(&c), d2, TABLE_TOL)
            && within(c.d3, d3, TABLE_TOL);
        ok &= good;
        parts.push(format!(
            "a={kdec}: D1 {} D2 {} D3 {}",
            fmt(c.d1),
            fmt(d2_of(&c)),
            fmt(c.d3)
        ));
    }
    let elapsed = t.elapsed();
    ok &= elapsed < Duration::from_secs(1);
    check(ok, format!("{} ({elapsed:.2?})", parts.join("; ")))
}

fn criterion_2() -> Check {
    // (label, got, want); a missing `want` marks a structural check that failed
    let mut rows: Vec<(String, Option<f64>, Option<f64>)> = Vec::new();
    for (kdec, d1, d2) in [(0.02, 0.329, 0.236), (0.0, 0.349, 0.256)] {
        let c = equilibria::critical_dilutions(&web(Case::B, kdec));
        rows.push((format!("b a={kdec} D1"), c.d1, Some(d1)));
        rows.push((format!("b a={kdec} D2"), d2_of(&c), Some(d2)));
        if !(c.i3_equals_i2 && c.d3.is_none()) {
            rows.push((format!("b a={kdec} I3 != I2"), None, None));
        }
    }
    for (kdec, d1) in [(0.02, 0.287), (0.0, 0.303)] {
        let c = equilibria::critical_dilutions(&web(Case::C, kdec));
        rows.push((format!("c a={kdec} D1"), c.d1, Some(d1)));
        if c.i2 != I2Kind::Empty {
            rows.push((format!("c a={kdec} I2 not empty"), None, None));
        }
    }
    for (kdec, d1, lo, hi, d3) in [
        (0.02, 0.238, 0.101, 0.198, 0.161),
        (0.0, 0.258, 0.121, 0.218, 0.181),
    ] {
        let c = equilibria::critical_dilutions(&web(Case::D, kdec));
        let (gl, gh) = match c.i2 {
            I2Kind::InteriorInterval { d2min, d2max } => (Some(d2min), Some(d2max)),
            _ => (None, None),
        };
        rows.push((format!("d a={kdec} D1"), c.d1, Some(d1)));
        rows.push((format!("d a={kdec} D2min"), gl, Some(lo)));
        rows.push((format!("d a={kdec} D2max"), gh, Some(hi)));
        rows.push((format!("d a={kdec} D3"), c.d3, Some(d3)));
    }
    let failures: Vec<String> = rows
        .iter()
        .filter(|(_, got, want)| !want.is_some_and(|w| within(*got, w, TABLE_TOL)))
        .map(|(label, got, want)| match want {
            Some(w) => format!("{label} {} vs {w}", fmt(*got)),
            None => label.clone(),
        })
        .collect();
    let detail = if failures.is_empty() {
        format!("{} values within {TABLE_TOL}", rows.len())
    } else {
        format!(
            "{} of {} checks off: {}",
            failures.len(),
            rows.len(),
            failures.join("; ")
        )
    };
    check(failures.is_empty(), detail)
}

fn criterion_3() -> Check {
    let w = web(Case::A, 0.02);
    let f1 = equilibria::f1(1e-9, &w).ok();
    let g = f1.map(|f| f / w.y3y4);
    check(
        within(g, 0.0195, 0.0005),
        format!("F1(0+)/Y3Y4 = {}", fmt(g)),
    )
}

fn criterion_4() -> Check {
    let w = web(Case::A, 0.02);
    let t = Instant::now();
    let scan = match simulate::hopf_scan(0.01, (0.08, 0.12), 1000, &w) {
        Ok(s) => s,
        Err(e) => return check(false, e.to_string()),
    };
    let elapsed = t.elapsed();
    let ok = scan.crossings.len() == 1
        && (scan.crossings[0].s_ch_in - 0.1034).abs() <= 0.003
        && scan.crossings[0].frequency > 0.0
        && scan.crossings[0].others_negative
        && scan.others_negative_throughout
        && scan.skipped == 0
        && elapsed < Duration::from_secs(60);
    let at = scan.crossings.first().map(|c| c.s_ch_in);
    check(
        ok,
        format!(
            "{} crossing(s), S = {}, frequency {}, others negative {} ({elapsed:.2?})",
            scan.crossings.len(),
            at.map_or("none".into(), |s| format!("{s:.5}")),
            scan.crossings
                .first()
                .map_or("-".into(), |c| format!("{:.4}", c.frequency)),
            scan.others_negative_throughout
        ),
    )
}

fn criterion_5() -> Check {
    let w = web(Case::A, 0.02);
    let d = 0.01;
    let t = Instant::now();
    let runs = [
        (0.01, Outcome::ConvergedSs1),
        (0.097, Outcome::GrowingOscillationToSs1),
        (0.10052, Outcome::LimitCycle),
        (0.16, Outcome::ConvergedSs3),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (s, want) in runs {
        let s0in = s * w.y3y4;
        let got = simulate::transect_initial(d, s0in, &w)
            .map_err(|e| e.to_string())
            .and_then(|y0| {
                let spec = simulate::IntegrationSpec::new(d, s, 10000.0, y0);
                simulate::integrate(&spec, &w).map_err(|e| e.to_string())
            })
            .and_then(|traj| {
                let known =
                    equilibria::all_steady_states(d, s0in, &w).map_err(|e| e.to_string())?;
                Ok(simulate::classify_attractor(&traj, &known, &w).outcome)
            });
        match got {
            Ok(o) => {
                ok &= o == want;
                parts.push(format!("{s}: {}", o.name()));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{s}: error {e}"));
            }
        }
    }
    let elapsed = t.elapsed();
    ok &= elapsed < Duration::from_secs(120);
    check(ok, format!("{} ({elapsed:.2?})", parts.join(", ")))
}

/// Cells of the grid within one step of a Gamma curve, of a change in where a
/// curve is defined, or of a zero of F3.
fn near_boundary_mask(grid: &diagram::DiagramGrid, w: &FoodWeb<Monod>) -> Vec<bool> {
    let (nd, ns) = (grid.d_axis.len(), grid.s_axis.len());
    let curves: Vec<[Option<f64>; 3]> = grid
        .d_axis
        .iter()
        .map(|&d| {
            [
                diagram::gamma1(d, w),
                diagram::gamma2(d, w),
                diagram::gamma3_analytic(d, w).ok().flatten(),
            ]
        })
        .collect();
    let zeros = equilibria::critical_dilutions(w).f3_zeros;
    let mut mask = vec![false; nd * ns];
    for i in 0..nd {
        let rows: Vec<usize> = (i.saturating_sub(1)..=(i + 1).min(nd - 1)).collect();
        let (dl, dh) = (grid.d_axis[rows[0]], grid.d_axis[*rows.last().unwrap()]);
        let vertical = zeros.iter().any(|z| (dl..=dh).contains(z))
            || (0..3).any(|k| {
                let defined: BTreeSet<bool> =
                    rows.iter().map(|&r| curves[r][k].is_some()).collect();
                defined.len() > 1
            });
        for j in 0..ns {
            let (sl, sh) = (
                grid.s_axis[j.saturating_sub(1)],
                grid.s_axis[(j + 1).min(ns - 1)],
            );
            let crossing = rows
                .iter()
                .flat_map(|&r| curves[r].iter().flatten())
                .any(|g| (sl..=sh).contains(g));
            // a curve passing between two neighbouring rows
            let between = rows.windows(2).any(|p| {
                (0..3).any(|k| match (curves[p[0]][k], curves[p[1]][k]) {
                    (Some(a), Some(b)) => a.min(b) <= sh && a.max(b) >= sl,
                    _ => false,
                })
            });
            mask[i * ns + j] = vertical || crossing || between;
        }
    }
    mask
}

fn criterion_6() -> Check {
    let t = Instant::now();
    let mut compared = 0;
    let mut mismatches = Vec::new();
    for case in CASES {
        let w = web(case, 0.0);
        let spec = GridSpec {
            nd: 50,
            ns: 50,
            ..GridSpec::default_for(&w)
        };
        let (Ok(a), Ok(n)) = (
            diagram::scan(&spec, &w, Method::Analytic, "a"),
            diagram::scan(&spec, &w, Method::Numeric, "n"),
        ) else {
            return check(false, "scan failed");
        };
        let mask = near_boundary_mask(&a, &w);
        for (k, (ca, cn)) in a.cells.iter().zip(&n.cells).enumerate() {
            if mask[k] {
                continue;
            }
            compared += 1;
            let va: Vec<_> = ca.states.iter().map(|s| (s.kind, s.verdict)).collect();
            let vn: Vec<_> = cn.states.iter().map(|s| (s.kind, s.verdict)).collect();
            if ca.label.is_none() || va != vn || ca.label != cn.label {
                mismatches.push(format!(
                    "{} D={:.4} S={:.4}",
                    case_name(case),
                    ca.d,
                    ca.s_ch_in
                ));
            }
        }
    }
    check(
        mismatches.is_empty(),
        format!(
            "{compared} cells compared, {} mismatches{} ({:.2?})",
            mismatches.len(),
            mismatches
                .first()
                .map_or(String::new(), |m| format!(", first {m}")),
            t.elapsed()
        ),
    )
}

fn criterion_7() -> Check {
    let t = Instant::now();
    let all: BTreeSet<Region> = Region::ALL.into_iter().collect();
    let expected = [
        (Case::A, all.clone()),
        (
            Case::B,
            BTreeSet::from([Region::J1, Region::J3, Region::J4, Region::J5]),
        ),
        (Case::C, BTreeSet::from([Region::J1, Region::J4])),
        (Case::D, all),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (case, want) in expected {
        for kdec in [0.0, 0.02] {
            let w = web(case, kdec);
            let grid = diagram::scan(
                &GridSpec::default_for(&w),
                &w,
                Method::default_for(&w),
                case_name(case),
            );
            let got = match grid {
                Ok(g) if g.unclassified() == 0 => g.regions(),
                _ => {
                    ok = false;
                    parts.push(format!("{} a={kdec}: unclassified cells", case_name(case)));
                    continue;
                }
            };
            let good = got == want;
            ok &= good;
            let names: Vec<&str> = got.iter().map(|r| r.name()).collect();
            parts.push(format!(
                "{} a={kdec}: {{{}}}{}",
                &case_name(case)[5..],
                names.join(","),
                if good { "" } else { " MISMATCH" }
            ));
        }
    }
    check(ok, format!("{} ({:.2?})", parts.join("; "), t.elapsed()))
}

fn criterion_8() -> Check {
    let mut rng = StdRng::seed_from_u64(8);
    let mut fails = Vec::new();

    let mut worst_residual: f64 = 0.0;
    let mut states = 0;
    for _ in 0..1000 {
        let case = CASES[rng.gen_range(0..4)];
        let w = web(case, if rng.gen_bool(0.5) { 0.02 } else { 0.0 });
        let d = rng.gen_range(1e-3..0.5);
        let s0in = w.y3y4 * 10f64.powf(rng.gen_range(-3.0..1.0));
        match equilibria::all_steady_states(d, s0in, &w) {
            Ok(found) => {
                for ss in found {
                    states += 1;
                    worst_residual = worst_residual.max(ss.residual(&w));
                }
            }
            Err(e) => fails.push(format!("steady states failed: {e}")),
        }
    }
    if worst_residual >= 1e-8 {
        fails.push(format!("residual {worst_residual:e}"));
    }

    let mut worst_round_trip: f64 = 0.0;
    for _ in 0..1000 {
        let g = web(CASES[rng.gen_range(0..4)], 0.0).growth;
        let u: f64 = rng.gen_range(1e-3..0.999);
        let s2 = g.l0 * 10f64.powf(rng.gen_range(-3.0..3.0));
        let s0 = g.mu0_inverse(u * g.mu0_sup(s2), s2).unwrap();
        let s1 = g.mu1_inverse(u * g.mu1_sup(s2), s2).unwrap();
        let h = g.mu2_inverse(u * g.mu2_sup()).unwrap();
        let errs = [
            (g.mu0_inverse(g.mu0(s0, s2), s2).unwrap() - s0).abs() / s0,
            (g.mu1_inverse(g.mu1(s1, s2), s2).unwrap() - s1).abs() / s1,
            (g.mu2_inverse(g.mu2(h)).unwrap() - h).abs() / h,
        ];
        worst_round_trip = errs.iter().fold(worst_round_trip, |m, e| m.max(*e));
    }
    if worst_round_trip >= 1e-10 {
        fails.push(format!("round trip {worst_round_trip:e}"));
    }

    let mut worst_f4: f64 = 0.0;
    let mut worst_jac: f64 = 0.0;
    let mut worst_ss1: f64 = 0.0;
    for _ in 0..300 {
        let case = CASES[rng.gen_range(0..4)];
        let w0 = web(case, 0.0);
        if let Some((lo, hi)) = equilibria::critical_dilutions(&w0).i2_bounds() {
            let d = lo + rng.gen_range(0.01..0.99) * (hi - lo);
            let f2 = equilibria::f2(d, &w0).unwrap();
            let factor = 10f64.powf(rng.gen_range(1e-4f64.log10()..2.0));
            if let Ok(Some(ss3)) = equilibria::find_ss3(d, f2 * (1.0 + factor), &w0) {
                let (c2, c1, c0) = stability::ss3_characteristic(&ss3, &w0);
                let f4 = stability::f4_at(&ss3, &w0).unwrap();
                let rel = (f4 - (c1 * c2 - c0)).abs() / (c1 * c2).abs().max(c0.abs());
                worst_f4 = worst_f4.max(rel);
            }
        }
        let w = web(case, if rng.gen_bool(0.5) { 0.02 } else { 0.0 });
        let d = rng.gen_range(1e-3..0.4);
        let s0in = w.y3y4 * 10f64.powf(rng.gen_range(-2.0..1.0));
        for ss in equilibria::all_steady_states(d, s0in, &w).unwrap_or_default() {
            let a = stability::jacobian_full(&ss.state, d, &w).full;
            let mut fd = [[0.0; 6]; 6];
            for c in 0..6 {
                let h = 1e-6 * ss.state[c].abs().max(1e-9);
                let (mut up, mut dn) = (ss.state, ss.state);
                up[c] += h;
                dn[c] -= h;
                let fu = simulate::rhs_rescaled(&up, d, s0in, &w);
                let fl = simulate::rhs_rescaled(&dn, d, s0in, &w);
                for r in 0..6 {
                    fd[r][c] = (fu[r] - fl[r]) / (2.0 * h);
                }
            }
            worst_jac = worst_jac.max(rel_diff(&a, &fd));
            if ss.kind == SteadyStateKind::Ss1 {
                let mut re: Vec<f64> = stability::spectrum(&ss, &w)
                    .unwrap()
                    .iter()
                    .map(|l| l.re)
                    .collect();
                let mut want: Vec<f64> = w.decay.iter().map(|a| -d - a).chain([-d; 3]).collect();
                re.sort_by(f64::total_cmp);
                want.sort_by(f64::total_cmp);
                let err = re
                    .iter()
                    .zip(&want)
                    .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
                worst_ss1 = worst_ss1.max(err);
            }
        }
    }
    if worst_f4 >= 1e-9 {
        fails.push(format!("F4 identity {worst_f4:e}"));
    }
    if worst_jac >= 1e-5 {
        fails.push(format!("Jacobian {worst_jac:e}"));
    }
    if worst_ss1 > 4.0 * f64::EPSILON {
        fails.push(format!("SS1 spectrum {worst_ss1:e}"));
    }
    check(
        fails.is_empty(),
        format!(
            "{states} states: residual {worst_residual:.1e}, round trip {worst_round_trip:.1e}, \
             F4 {worst_f4:.1e}, Jacobian {worst_jac:.1e}, SS1 spectrum {worst_ss1:.1e}{}",
            if fails.is_empty() {
                String::new()
            } else {
                format!("; failed: {}", fails.join(", "))
            }
        ),
    )
}

fn criterion_9() -> Check {
    let mut rng = StdRng::seed_from_u64(9);
    let mut points = 0;
    let mut bad = 0;
    let mut webs = 0;
    while webs < 50 {
        let p = FullParameters {
            y_ch: rng.gen_range(0.05..0.95),
            y_ph: rng.gen_range(0.05..0.95),
            ..FullParameters::default()
        };
        let w = rescale(&p).unwrap().food_web();
        if w.omega < 1.0 {
            continue;
        }
        webs += 1;
        for _ in 0..40 {
            let d = rng.gen_range(1e-3..1.0);
            let s0in = w.y3y4 * 10f64.powf(rng.gen_range(-3.0..2.0));
            points += 1;
            match equilibria::all_steady_states(d, s0in, &w) {
                Ok(s) if s.len() == 1 && s[0].kind == SteadyStateKind::Ss1 => {}
                _ => bad += 1,
            }
        }
    }
    check(
        bad == 0,
        format!("{points} points on {webs} parameter sets with omega >= 1, {bad} with SS2/SS3"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("critical dilutions, case (a)", criterion_1),
        ("critical dilutions, cases (b)/(c)/(d)", criterion_2),
        ("Gamma1 intercept", criterion_3),
        ("Hopf crossing at D = 0.01", criterion_4),
        ("transect dynamics", criterion_5),
        ("analytic and numeric stability agree", criterion_6),
        ("region inventories", criterion_7),
        ("oracle suite", criterion_8),
        ("omega >= 1 guard", criterion_9),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let c = run();
        if !c.ok {
            failed += 1;
        }
        println!(
            "{} criterion {}: {name}: {}",
            if c.ok { "PASS" } else { "FAIL" },
            k + 1,
            c.detail
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
