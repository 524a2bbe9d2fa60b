//! The C ABI exercised from Rust through raw pointers.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use hsenergy_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 512];
    let mut need = 0;
    unsafe {
        assert_eq!(hse_last_error(buf.as_mut_ptr(), buf.len(), &mut need), HseStatus::Ok);
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn solve_and_measure_standing() {
    unsafe {
        let mut sc = ptr::null_mut();
        assert_eq!(hse_scenario_new(c("standing").as_ptr(), 256, &mut sc), HseStatus::Ok);
        let (mut nodes, mut levels) = (0, 0);
        assert_eq!(hse_scenario_dims(sc, &mut nodes, &mut levels), HseStatus::Ok);
        assert_eq!(nodes, 257);
        let mut e0 = 0.0;
        assert_eq!(hse_scenario_initial_energy(sc, &mut e0), HseStatus::Ok);
        let exact = std::f64::consts::PI.powi(2) / 2.0;
        assert!((e0 - exact).abs() / exact < 1e-4);

        let mut sol = ptr::null_mut();
        assert_eq!(hse_solve(sc, &mut sol), HseStatus::Ok);
        let mut err = 0.0;
        assert_eq!(hse_solution_max_error(sol, &mut err), HseStatus::Ok);
        assert!(err < 1e-4);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(hse_solution_value(sol, 0, 128, &mut re, &mut im), HseStatus::Ok);
        assert!((re - 1.0).abs() < 1e-12 && im == 0.0);
        assert_eq!(hse_solution_value(sol, levels, 0, &mut re, &mut im), HseStatus::InvalidArgument);

        let surface = c(r#"{"kind":"affine","offset":0.3,"slope":[0.4]}"#);
        let mut e = 0.0;
        assert_eq!(hse_surface_energy(sol, surface.as_ptr(), &mut e), HseStatus::Ok);
        assert!((e - exact).abs() / exact < 1e-3);
        let mut r = 1.0;
        assert_eq!(hse_flux_residual(sol, surface.as_ptr(), 0.0, &mut r), HseStatus::Ok);
        assert!(r.abs() / e0 < 1e-3);

        let steep = c(r#"{"kind":"affine","offset":0.0,"slope":[1.0]}"#);
        assert_eq!(hse_surface_energy(sol, steep.as_ptr(), &mut e), HseStatus::Ok);

        hse_solution_free(sol);
        hse_scenario_free(sc);
    }
}

#[test]
fn scenario_hash_is_hex() {
    unsafe {
        let mut sc = ptr::null_mut();
        assert_eq!(hse_scenario_new(c(r#"{"name":"standing","params":{"T":0.5}}"#).as_ptr(), 32, &mut sc), HseStatus::Ok);
        let mut need = 0;
        assert_eq!(hse_scenario_hash(sc, ptr::null_mut(), 0, &mut need), HseStatus::BufferTooSmall);
        assert_eq!(need, 65);
        let mut buf = vec![0 as c_char; need];
        assert_eq!(hse_scenario_hash(sc, buf.as_mut_ptr(), buf.len(), &mut need), HseStatus::Ok);
        let hash = CStr::from_ptr(buf.as_ptr()).to_str().unwrap();
        assert!(hash.chars().all(|ch| ch.is_ascii_hexdigit()));
        hse_scenario_free(sc);
    }
}

#[test]
fn errors_have_codes_and_messages() {
    unsafe {
        let mut sc = ptr::null_mut();
        assert_eq!(hse_scenario_new(c("no-such-thing").as_ptr(), 0, &mut sc), HseStatus::Config);
        assert!(last_error().contains("no-such-thing"));
        assert!(sc.is_null());
        assert_eq!(hse_scenario_new(ptr::null(), 0, &mut sc), HseStatus::NullPointer);
        assert_eq!(hse_scenario_new(c("standing").as_ptr(), 0, ptr::null_mut()), HseStatus::NullPointer);
        let bad = [0xffu8, 0];
        assert_eq!(hse_scenario_new(bad.as_ptr().cast(), 0, &mut sc), HseStatus::InvalidUtf8);

        let mut k = 0.0;
        let mut v = 0.0;
        assert_eq!(hse_gronwall_min(-1.0, &mut k, &mut v), HseStatus::InvalidArgument);
        assert_eq!(hse_gronwall_min(1.0, &mut k, &mut v), HseStatus::Ok);
        assert!(v > 3.5 && v < 4.0);
        assert_eq!(last_error(), "");

        let mut sc = ptr::null_mut();
        assert_eq!(hse_scenario_new(c("zero").as_ptr(), 16, &mut sc), HseStatus::Ok);
        let mut sol = ptr::null_mut();
        assert_eq!(hse_solve(sc, &mut sol), HseStatus::Ok);
        let mut err = 0.0;
        let st = hse_solution_max_error(sol, &mut err);
        assert!(st == HseStatus::Ok || st == HseStatus::Unavailable);
        let timelike = c(r#"{"kind":"affine","offset":0.0,"slope":[1.5]}"#);
        let mut e = 0.0;
        assert_ne!(hse_surface_energy(sol, timelike.as_ptr(), &mut e), HseStatus::Ok);
        hse_solution_free(sol);
        hse_scenario_free(sc);

        hse_scenario_free(ptr::null_mut());
        hse_solution_free(ptr::null_mut());
        hse_report_free(ptr::null_mut());
        assert!(hse_report_json(ptr::null()).is_null());
    }
}

#[test]
fn reports_from_run_and_acceptance() {
    unsafe {
        let cfg = c(r#"{"experiment":"verify","scenario":{"name":"standing"},"identities":"gronwall"}"#);
        let mut rep = ptr::null_mut();
        assert_eq!(hse_run(cfg.as_ptr(), &mut rep), HseStatus::Ok);
        assert!(hse_report_passed(rep));
        let json: serde_json::Value = serde_json::from_str(CStr::from_ptr(hse_report_json(rep)).to_str().unwrap()).unwrap();
        assert_eq!(json["experiment"], "verify");
        hse_report_free(rep);

        let mut rep = ptr::null_mut();
        assert_eq!(hse_acceptance(4, 1, &mut rep), HseStatus::Ok);
        assert!(hse_report_passed(rep));
        hse_report_free(rep);
        assert_eq!(hse_acceptance(0, 1, &mut rep), HseStatus::Config);

        let bad = c(r#"{"experiment":"converge","scenario":{"name":"standing"},"grids":[8]}"#);
        assert_eq!(hse_run(bad.as_ptr(), &mut rep), HseStatus::Config);
    }
}

#[test]
fn version_is_semver() {
    let v = unsafe { CStr::from_ptr(hse_version()) }.to_str().unwrap();
    assert_eq!(v.split('.').count(), 3);
}
