use std::ffi::{CStr, CString};
use std::ptr;

use chemostat_ffi::*;

fn model(case: ChemostatCase, kdec: f64) -> *mut ChemostatModel {
    let mut m = ptr::null_mut();
    assert_eq!(
        chemostat_model_from_case(case, kdec, &mut m),
        ChemostatStatus::Ok
    );
    assert!(!m.is_null());
    m
}

fn last_error() -> String {
    let p = chemostat_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn criticals_of_case_a() {
    let m = model(ChemostatCase::A, 0.02);
    let mut c = std::mem::MaybeUninit::<ChemostatCriticals>::uninit();
    assert_eq!(chemostat_criticals(m, c.as_mut_ptr()), ChemostatStatus::Ok);
    let c = unsafe { c.assume_init() };
    assert!((c.d1 - 0.432).abs() < 0.002);
    assert_eq!(c.i2, ChemostatI2::FromZero);
    assert!((c.i2_hi - 0.373).abs() < 0.002);
    assert!((c.d3 - 0.058).abs() < 0.002);
    assert!(chemostat_last_error().is_null());
    unsafe { chemostat_model_free(m) };
}

#[test]
fn case_c_has_no_d3() {
    let m = model(ChemostatCase::C, 0.0);
    let mut c = std::mem::MaybeUninit::<ChemostatCriticals>::uninit();
    assert_eq!(chemostat_criticals(m, c.as_mut_ptr()), ChemostatStatus::Ok);
    let c = unsafe { c.assume_init() };
    assert_eq!(c.i2, ChemostatI2::Empty);
    assert!(c.d3.is_nan() && c.i2_lo.is_nan());
    unsafe { chemostat_model_free(m) };
}

#[test]
fn json_model_matches_preset() {
    let json = CString::new(r#"{"Ks_h2_c": 7e-6, "kdec": 0}"#).unwrap();
    let mut from_json = ptr::null_mut();
    assert_eq!(
        unsafe { chemostat_model_from_json(json.as_ptr(), &mut from_json) },
        ChemostatStatus::Ok
    );
    let preset = model(ChemostatCase::C, 0.0);
    let (mut a, mut b) = ([0.0; 2], [0.0; 2]);
    chemostat_model_scales(from_json, &mut a[0], &mut a[1]);
    chemostat_model_scales(preset, &mut b[0], &mut b[1]);
    assert_eq!(a, b);
    unsafe {
        chemostat_model_free(from_json);
        chemostat_model_free(preset);
    }
}

#[test]
fn bad_json_reports_its_line() {
    let json = CString::new("{\n\"bogus\": 1\n}").unwrap();
    let mut m = ptr::null_mut();
    let s = unsafe { chemostat_model_from_json(json.as_ptr(), &mut m) };
    assert_eq!(s, ChemostatStatus::InvalidParameter);
    assert!(m.is_null());
    assert!(last_error().contains("line 2"), "{}", last_error());
}

#[test]
fn invalid_parameters_and_arguments() {
    let json = CString::new(r#"{"Y_ch": -1}"#).unwrap();
    let mut m = ptr::null_mut();
    let s = unsafe { chemostat_model_from_json(json.as_ptr(), &mut m) };
    assert_eq!(s, ChemostatStatus::InvalidParameter);
    assert_eq!(
        chemostat_model_from_case(ChemostatCase::A, -1.0, &mut m),
        ChemostatStatus::InvalidArgument
    );
    let m = model(ChemostatCase::A, 0.0);
    let mut l = ChemostatLabel {
        region: ChemostatRegion::Unclassified,
        near_boundary: false,
    };
    assert_eq!(
        chemostat_classify(m, 0.0, 1.0, ChemostatMethod::Auto, &mut l),
        ChemostatStatus::InvalidArgument
    );
    assert_eq!(
        chemostat_classify(m, 0.1, f64::NAN, ChemostatMethod::Auto, &mut l),
        ChemostatStatus::InvalidArgument
    );
    unsafe { chemostat_model_free(m) };
}

#[test]
fn null_pointers_are_rejected() {
    assert_eq!(
        chemostat_model_from_case(ChemostatCase::A, 0.0, ptr::null_mut()),
        ChemostatStatus::NullPointer
    );
    let mut l = ChemostatLabel {
        region: ChemostatRegion::Unclassified,
        near_boundary: false,
    };
    assert_eq!(
        chemostat_classify(ptr::null(), 0.1, 1.0, ChemostatMethod::Auto, &mut l),
        ChemostatStatus::NullPointer
    );
    unsafe { chemostat_model_free(ptr::null_mut()) };
}

#[test]
fn classify_regions() {
    let m = model(ChemostatCase::A, 0.0);
    let mut l = ChemostatLabel {
        region: ChemostatRegion::Unclassified,
        near_boundary: false,
    };
    for (d, s, want) in [
        (0.46, 5.0, ChemostatRegion::J1),
        (0.2, 1.0, ChemostatRegion::J3),
    ] {
        assert_eq!(
            chemostat_classify(m, d, s, ChemostatMethod::Analytic, &mut l),
            ChemostatStatus::Ok
        );
        assert_eq!(l.region, want);
    }
    unsafe { chemostat_model_free(m) };
}

#[test]
fn analytic_method_with_decay_is_refused() {
    let m = model(ChemostatCase::A, 0.02);
    let (mut v, mut defined) = (0.0, false);
    let s = chemostat_gamma(
        m,
        ChemostatGamma::Gamma3,
        ChemostatMethod::Analytic,
        0.01,
        &mut v,
        &mut defined,
    );
    assert_eq!(s, ChemostatStatus::WrongMethod);
    let s = chemostat_gamma(
        m,
        ChemostatGamma::Gamma3,
        ChemostatMethod::Auto,
        0.01,
        &mut v,
        &mut defined,
    );
    assert_eq!(s, ChemostatStatus::Ok);
    assert!(defined && (v - 0.1034).abs() < 0.003, "{v}");
    let s = chemostat_gamma(
        m,
        ChemostatGamma::Gamma1,
        ChemostatMethod::Auto,
        0.46,
        &mut v,
        &mut defined,
    );
    assert_eq!(s, ChemostatStatus::Ok);
    assert!(!defined && v.is_nan());
    unsafe { chemostat_model_free(m) };
}

#[test]
fn steady_states_fill_the_buffer() {
    let m = model(ChemostatCase::A, 0.0);
    let mut count = 0;
    let s = unsafe { chemostat_steady_states(m, 0.2, 1.0, ptr::null_mut(), 0, &mut count) };
    assert_eq!(s, ChemostatStatus::BufferTooSmall);
    assert_eq!(count, 4);
    let mut buf = Vec::with_capacity(count);
    let s = unsafe { chemostat_steady_states(m, 0.2, 1.0, buf.as_mut_ptr(), count, &mut count) };
    assert_eq!(s, ChemostatStatus::Ok);
    unsafe { buf.set_len(count) };
    assert_eq!(buf[0].kind, ChemostatKind::Ss1);
    assert_eq!(buf[0].verdict, ChemostatVerdict::Stable);
    assert_eq!(buf[3].kind, ChemostatKind::Ss3);
    assert_eq!(buf[3].verdict, ChemostatVerdict::Stable);
    // washout keeps the full inflow of chlorophenol
    assert!((buf[0].full[3] - 1.0).abs() < 1e-12);
    assert!(buf.iter().all(|ss| ss.full.iter().all(|v| *v >= 0.0)));
    unsafe { chemostat_model_free(m) };
}

#[test]
fn header_compiles_and_links_from_c() {
    let Some(cc) = ["cc", "gcc", "clang"].into_iter().find(|c| {
        std::process::Command::new(c)
            .arg("--version")
            .output()
            .is_ok()
    }) else {
        eprintln!("no C compiler, skipping");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"#include "chemostat.h"
#include <stdio.h>
int main(void) {
    ChemostatModel *m = NULL;
    if (chemostat_model_from_case(CHEMOSTAT_CASE_D, 0.0, &m) != CHEMOSTAT_STATUS_OK) return 1;
    ChemostatCriticals c;
    if (chemostat_criticals(m, &c) != CHEMOSTAT_STATUS_OK) return 2;
    chemostat_model_free(m);
    printf("%.3f %.3f %.3f %.3f\n", c.d1, c.i2_lo, c.i2_hi, c.d3);
    return c.i2 == CHEMOSTAT_I2_INTERIOR ? 0 : 3;
}
"#,
    )
    .unwrap();
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let deps = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib_dir = deps.parent().unwrap();
    let staticlib = lib_dir.join("libchemostat_ffi.a");
    if !staticlib.exists() {
        eprintln!("{} not built, skipping", staticlib.display());
        return;
    }
    let exe = dir.path().join("smoke");
    let status = std::process::Command::new(cc)
        .arg(&src)
        .arg("-I")
        .arg(include)
        .arg(&staticlib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = std::process::Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status);
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        "0.258 0.121 0.218 0.181"
    );
}
