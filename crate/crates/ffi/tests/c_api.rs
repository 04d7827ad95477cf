use std::ffi::{CStr, CString};
use std::ptr;

use lateral_zda_ffi::*;

fn last_error() -> String {
    unsafe {
        let need = zda_last_error_message(ptr::null_mut(), 0);
        let mut buf = vec![0 as std::ffi::c_char; need];
        zda_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn model(params: ZdaVehicleParams, vx: f64) -> *mut ZdaModel {
    let mut m = ptr::null_mut();
    let st = unsafe { zda_model_new(&params, vx, &mut m) };
    assert_eq!(st, ZdaStatus::Ok);
    m
}

fn preset(name: &str) -> *mut ZdaTrajectory {
    let name = CString::new(name).unwrap();
    let mut t = ptr::null_mut();
    let st = unsafe { zda_simulate_preset(name.as_ptr(), &mut t) };
    assert_eq!(st, ZdaStatus::Ok, "{}", last_error());
    t
}

#[test]
fn suv_zero_and_poles() {
    let m = model(zda_suv_params(), 5.0);
    unsafe {
        let mut report = std::mem::zeroed::<ZdaZeroReport>();
        assert_eq!(zda_classify(m, ZdaOutputCase::LateralAccel, &mut report), ZdaStatus::Ok);
        assert!(report.has_zero && report.stable && !report.disruptive);
        assert!((report.zero + 775.3).abs() < 0.1);
        assert_eq!(report.classification, ZdaObservability::StronglyDetectableOnly);

        assert_eq!(zda_classify(m, ZdaOutputCase::Both, &mut report), ZdaStatus::Ok);
        assert!(!report.has_zero && !report.attack_exists);

        let (mut re, mut im) = ([0.0; 2], [0.0; 2]);
        assert_eq!(zda_model_eigenvalues(m, re.as_mut_ptr(), im.as_mut_ptr()), ZdaStatus::Ok);
        assert!(re.iter().all(|&x| x < 0.0));
        assert!((im[0] + im[1]).abs() < 1e-12);

        let mut margin = 0.0;
        assert_eq!(zda_model_stability_margin(m, &mut margin), ZdaStatus::Ok);
        assert!((margin - 8.185).abs() < 1e-3);
        zda_model_free(m);
    }
}

#[test]
fn unstable_front_axle() {
    let mut p = zda_suv_params();
    p.front_axle = 1.521;
    let mut balance = 0.0;
    unsafe {
        assert_eq!(zda_disruptive_condition(&p, &mut balance), ZdaStatus::Ok);
    }
    assert!(balance > 0.0);
    let m = model(p, 5.0);
    unsafe {
        let mut report = std::mem::zeroed::<ZdaZeroReport>();
        zda_classify(m, ZdaOutputCase::LateralAccel, &mut report);
        assert!(report.disruptive);
        assert!((report.zero - 114.6).abs() < 0.1);
        assert_eq!(report.classification, ZdaObservability::NotStronglyDetectable);
        zda_model_free(m);
    }
}

#[test]
fn bad_parameters_report_field() {
    let mut p = zda_suv_params();
    p.mass = -1.0;
    let mut m = ptr::null_mut();
    let st = unsafe { zda_model_new(&p, 5.0, &mut m) };
    assert_eq!(st, ZdaStatus::InvalidParameter);
    assert!(m.is_null());
    assert!(last_error().contains('m'));

    let st = unsafe { zda_model_new(&zda_suv_params(), 0.0, &mut m) };
    assert_eq!(st, ZdaStatus::InvalidParameter);
    assert!(last_error().contains("vx"));
}

#[test]
fn null_pointers() {
    unsafe {
        let mut margin = 0.0;
        assert_eq!(zda_model_stability_margin(ptr::null(), &mut margin), ZdaStatus::NullPointer);
        assert_eq!(zda_simulate_preset(ptr::null(), &mut ptr::null_mut()), ZdaStatus::NullPointer);
        assert_eq!(zda_trajectory_len(ptr::null()), 0);
        assert!(!zda_trajectory_diverged(ptr::null(), ptr::null_mut()));
        zda_model_free(ptr::null_mut());
        zda_trajectory_free(ptr::null_mut());
        let name = CStr::from_ptr(zda_status_name(ZdaStatus::NullPointer));
        assert_eq!(name.to_str().unwrap(), "null pointer");
    }
}

#[test]
fn unknown_preset() {
    let name = CString::new("fig9").unwrap();
    let mut t = ptr::null_mut();
    let st = unsafe { zda_simulate_preset(name.as_ptr(), &mut t) };
    assert_ne!(st, ZdaStatus::Ok);
    assert!(t.is_null());
    assert!(last_error().contains("fig9"));
}

#[test]
fn detector_on_presets() {
    let attacked = preset("fig5");
    unsafe {
        let mut v = std::mem::zeroed::<ZdaVerdict>();
        assert_eq!(zda_detect(attacked, ptr::null(), &mut v), ZdaStatus::Ok);
        assert!(v.attacked);
        assert!(v.first_alarm_time > 0.0 && v.first_alarm_time < 2e-3);

        let mut strict = zda_detector_default();
        strict.ax_alarm_threshold = 1e9;
        zda_detect(attacked, &strict, &mut v);
        assert!(!v.attacked);

        let len = zda_trajectory_len(attacked);
        assert_eq!(len, 20001);
        let mut s = std::mem::zeroed::<ZdaSample>();
        assert_eq!(zda_trajectory_sample(attacked, len - 1, &mut s), ZdaStatus::Ok);
        assert!((s.t - 0.02).abs() < 1e-12);
        assert!(s.ay.abs() < 1e-6);
        assert_eq!(zda_trajectory_sample(attacked, len, &mut s), ZdaStatus::OutOfRange);
        zda_trajectory_free(attacked);
    }
}

#[test]
fn divergence_is_reported() {
    let t = preset("fig6");
    unsafe {
        let mut at = 0.0;
        assert!(zda_trajectory_diverged(t, &mut at));
        assert!(at > 0.05 && at < 0.2);
        zda_trajectory_free(t);
    }
}

#[test]
fn scenario_file_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.toml");
    std::fs::write(&path, "[run]\nvx = 25.0\nduration = 0.1\n").unwrap();
    let c = CString::new(path.to_str().unwrap()).unwrap();
    let mut t = ptr::null_mut();
    unsafe {
        assert_eq!(zda_simulate_scenario_file(c.as_ptr(), &mut t), ZdaStatus::Ok);
        assert_eq!(zda_trajectory_len(t), 1001);
        zda_trajectory_free(t);
    }

    std::fs::write(&path, "[run]\nspeed = 3\n").unwrap();
    let st = unsafe { zda_simulate_scenario_file(c.as_ptr(), &mut t) };
    assert_eq!(st, ZdaStatus::Parse);
    assert!(last_error().contains("speed"));
}

#[test]
fn header_is_generated() {
    let header = include_str!("../include/lateral_zda.h");
    for sym in ["zda_model_new", "zda_detect", "ZDA_STATUS_NULL_POINTER", "typedef struct ZdaModel"] {
        assert!(header.contains(sym), "missing {sym}");
    }
}
