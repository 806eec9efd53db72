use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use navsim_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(navsim_last_error()) }.to_str().unwrap().to_owned()
}

fn short_scenario() -> *mut NavsimScenario {
    let mut s = ptr::null_mut();
    let st = unsafe { navsim_scenario_new(30.0, 500.0, 0.0, 0.0, 1.0, 0.02, &mut s) };
    assert_eq!(st, NavsimStatus::Ok);
    s
}

fn cstring(p: &Path) -> CString {
    CString::new(p.to_str().unwrap()).unwrap()
}

#[test]
fn bundled_scenarios() {
    for (make, steps) in [(navsim_scenario_a as unsafe extern "C" fn(_) -> _, 180_000), (navsim_scenario_b, 360_000)] {
        let mut s = ptr::null_mut();
        assert_eq!(unsafe { make(&mut s) }, NavsimStatus::Ok);
        assert_eq!(unsafe { navsim_scenario_steps(s) }, steps);
        unsafe { navsim_scenario_free(s) };
    }
    assert_eq!(unsafe { navsim_scenario_steps(ptr::null()) }, 0);
}

#[test]
fn run_summary_and_epochs() {
    let s = short_scenario();
    let mut r = ptr::null_mut();
    let st = unsafe { navsim_run(s, NavsimAlgorithm::Tn, NavsimAlgorithm::Tn, false, &mut r) };
    assert_eq!(st, NavsimStatus::Ok, "{}", last_error());
    assert_eq!(last_error(), "");

    let mut sum = NavsimSummary::default();
    assert_eq!(unsafe { navsim_run_summary(r, &mut sum) }, NavsimStatus::Ok);
    assert_eq!(sum.epochs, 51);
    assert!(sum.max_horiz_pos_err_m > 0.0 && sum.max_horiz_pos_err_m.is_finite());
    assert!(sum.max_dcm_orthonormality_error <= 1e-12);

    let mut e = NavsimEpoch::default();
    assert_eq!(unsafe { navsim_run_epoch(r, 0, &mut e) }, NavsimStatus::Ok);
    assert_eq!(e, NavsimEpoch::default());
    assert_eq!(unsafe { navsim_run_epoch(r, 50, &mut e) }, NavsimStatus::Ok);
    assert_eq!(e.t_s, 1.0);
    assert_eq!(e.horiz_pos_err_m, sum.final_horiz_pos_err_m);
    assert_eq!(e.pos_err_m, sum.final_pos_err_m);

    assert_eq!(unsafe { navsim_run_epoch(r, 51, &mut e) }, NavsimStatus::InvalidArgument);
    assert!(last_error().contains("out of range"), "{}", last_error());

    unsafe {
        navsim_run_free(r);
        navsim_scenario_free(s);
        navsim_run_free(ptr::null_mut());
        navsim_scenario_free(ptr::null_mut());
    }
}

#[test]
fn mixed_pair_and_truth_attitude() {
    let s = short_scenario();
    let mut r = ptr::null_mut();
    let st = unsafe { navsim_run(s, NavsimAlgorithm::Derived, NavsimAlgorithm::Sv2, true, &mut r) };
    assert_eq!(st, NavsimStatus::Ok);
    let mut sum = NavsimSummary::default();
    unsafe { navsim_run_summary(r, &mut sum) };
    assert!(sum.max_horiz_pos_err_m < 1e-6);
    unsafe {
        navsim_run_free(r);
        navsim_scenario_free(s);
    }
}

#[test]
fn csv_matches_cli_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("series.csv");
    let s = short_scenario();
    let mut r = ptr::null_mut();
    unsafe { navsim_run(s, NavsimAlgorithm::Sv1, NavsimAlgorithm::Sv1, false, &mut r) };
    assert_eq!(unsafe { navsim_run_write_csv(r, cstring(&path).as_ptr()) }, NavsimStatus::Ok);
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next(), Some(navsim::report::SERIES_HEADER));
    assert_eq!(text.lines().count(), 52);

    let bad = cstring(&dir.path().join("missing/dir/x.csv"));
    assert_eq!(unsafe { navsim_run_write_csv(r, bad.as_ptr()) }, NavsimStatus::IoError);
    assert!(last_error().contains("missing"));
    unsafe {
        navsim_run_free(r);
        navsim_scenario_free(s);
    }
}

#[test]
fn invalid_inputs_are_reported() {
    let mut s = ptr::null_mut();
    let st = unsafe { navsim_scenario_new(30.0, 500.0, 0.0, 0.0, 1.0, -0.02, &mut s) };
    assert_eq!(st, NavsimStatus::InvalidArgument);
    assert!(s.is_null());
    assert!(last_error().contains("dt"), "{}", last_error());

    assert_eq!(unsafe { navsim_scenario_a(ptr::null_mut()) }, NavsimStatus::NullPointer);
    let mut r = ptr::null_mut();
    let st = unsafe { navsim_run(ptr::null(), NavsimAlgorithm::Tn, NavsimAlgorithm::Tn, false, &mut r) };
    assert_eq!(st, NavsimStatus::NullPointer);
    assert_eq!(unsafe { navsim_run_summary(ptr::null(), ptr::null_mut()) }, NavsimStatus::NullPointer);
    assert_eq!(unsafe { navsim_run_write_csv(ptr::null(), ptr::null()) }, NavsimStatus::NullPointer);
}

#[test]
fn numerical_failure_status() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { navsim_scenario_new(30.0, 1e200, 0.0, 0.0, 1.0, 0.02, &mut s) }, NavsimStatus::Ok);
    let mut r = ptr::null_mut();
    let st = unsafe { navsim_run(s, NavsimAlgorithm::Derived, NavsimAlgorithm::Derived, false, &mut r) };
    assert_eq!(st, NavsimStatus::NumericalError);
    assert!(r.is_null());
    assert!(last_error().contains("epoch 0"), "{}", last_error());
    unsafe { navsim_scenario_free(s) };
}

#[test]
fn config_files() {
    let bundled = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/configs/scenario_b.toml");
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { navsim_scenario_from_config(cstring(&bundled).as_ptr(), &mut s) }, NavsimStatus::Ok);
    assert_eq!(unsafe { navsim_scenario_steps(s) }, 360_000);
    unsafe { navsim_scenario_free(s) };

    let missing = CString::new("/no/such/scenario.toml").unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { navsim_scenario_from_config(missing.as_ptr(), &mut s) }, NavsimStatus::ConfigError);
    assert!(s.is_null());
}

#[test]
fn sculling_and_scrolling_closed_forms() {
    let (w, f, t) = ([0.3, -0.2, 0.5], [1.0, 9.8, -2.0], 0.02);
    let half = |v: [f64; 3]| v.map(|x| x * t / 2.0);
    let (a, b) = (half(w), half(f));
    let mut u = [0.0; 3];
    let mut iu = [0.0; 3];
    unsafe {
        assert_eq!(navsim_sculling(a.as_ptr(), a.as_ptr(), b.as_ptr(), b.as_ptr(), t, u.as_mut_ptr()), NavsimStatus::Ok);
        assert_eq!(navsim_scrolling(a.as_ptr(), a.as_ptr(), b.as_ptr(), b.as_ptr(), t, iu.as_mut_ptr()), NavsimStatus::Ok);
    }
    let wxf = [w[1] * f[2] - w[2] * f[1], w[2] * f[0] - w[0] * f[2], w[0] * f[1] - w[1] * f[0]];
    for i in 0..3 {
        let eu = t * (f[i] + t / 2.0 * wxf[i]);
        let eiu = t * t / 6.0 * (3.0 * f[i] + t * wxf[i]);
        assert!((u[i] - eu).abs() <= 1e-15 * eu.abs().max(1e-3), "{i}");
        assert!((iu[i] - eiu).abs() <= 1e-15 * eiu.abs().max(1e-5), "{i}");
    }

    let nan = [f64::NAN; 3];
    let st = unsafe { navsim_sculling(nan.as_ptr(), a.as_ptr(), b.as_ptr(), b.as_ptr(), t, u.as_mut_ptr()) };
    assert_eq!(st, NavsimStatus::InvalidArgument);
    let st = unsafe { navsim_scrolling(a.as_ptr(), ptr::null(), b.as_ptr(), b.as_ptr(), t, iu.as_mut_ptr()) };
    assert_eq!(st, NavsimStatus::NullPointer);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(navsim_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn header_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/navsim.h")
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(header_path()).unwrap();
    let src = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 15, "{exports:?}");
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    for ty in ["typedef struct NavsimScenario NavsimScenario;", "NAVSIM_STATUS_OK = 0", "NAVSIM_ALGORITHM_SV2 = 3"] {
        assert!(header.contains(ty), "{ty}");
    }
}

const C_SMOKE: &str = r#"
#include <stdio.h>
#include "navsim.h"

int main(void) {
    NavsimScenario *s = NULL;
    NavsimRunResult *r = NULL;
    NavsimSummary sum;
    if (navsim_scenario_new(30.0, 500.0, 0.0, 0.0, 2.0, 0.02, &s) != NAVSIM_STATUS_OK) return 10;
    if (navsim_run(s, NAVSIM_ALGORITHM_SV2, NAVSIM_ALGORITHM_SV2, false, &r) != NAVSIM_STATUS_OK) return 11;
    if (navsim_run_summary(r, &sum) != NAVSIM_STATUS_OK) return 12;
    if (navsim_scenario_new(30.0, 500.0, 0.0, 0.0, 1.0, 0.0, &s) != NAVSIM_STATUS_INVALID_ARGUMENT) return 13;
    printf("%zu %s\n", sum.epochs, navsim_last_error()[0] ? "err" : "none");
    navsim_run_free(r);
    navsim_scenario_free(s);
    return 0;
}
"#;

#[test]
fn c_program_links_against_static_library() {
    // target/<profile>/deps/ffi-<hash> -> target/<profile>/libnavsim_ffi.a
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().and_then(Path::parent).unwrap();
    assert!(lib_dir.join("libnavsim_ffi.a").is_file(), "static library not built in {}", lib_dir.display());

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let bin = dir.path().join("smoke");
    std::fs::write(&src, C_SMOKE).unwrap();
    let out = Command::new("cc")
        .args(["-std=c11", "-Wall", "-Werror", "-o"])
        .arg(&bin)
        .arg(&src)
        .arg("-I")
        .arg(header_path().parent().unwrap())
        .arg(lib_dir.join("libnavsim_ffi.a"))
        .args(["-lpthread", "-ldl", "-lm"])
        .output()
        .expect("a C compiler on PATH");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert_eq!(String::from_utf8(run.stdout).unwrap(), "101 err\n");
}
