use std::ffi::{CStr, CString};
use std::ptr;

use beltrami_lab_ffi::*;

fn last_error() -> String {
    let p = bl_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

struct Handle(*mut BlField);

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { bl_field_free(self.0) }
    }
}

fn sphere(m: i32) -> Handle {
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { bl_field_sphere_vm(m, &mut f) }, BlStatus::Ok);
    Handle(f)
}

#[test]
fn sphere_eigenvalue_and_residual() {
    let f = sphere(3);
    let mut lambda = 0.0;
    assert_eq!(unsafe { bl_field_eigenvalue(f.0, &mut lambda) }, BlStatus::Ok);
    assert_eq!(lambda, 6.0);
    let mut r = 1.0;
    assert_eq!(unsafe { bl_field_eig_residual(f.0, 8, 1e-3, &mut r) }, BlStatus::Ok);
    assert!(r < 1e-8, "{r}");
    assert!(bl_last_error().is_null());
}

#[test]
fn classify_verdicts() {
    let mut v = BlVerdict::Inconclusive;
    let name = CString::new("hopf").unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { bl_field_sphere_builtin(name.as_ptr(), &mut h) }, BlStatus::Ok);
    let h = Handle(h);
    assert_eq!(unsafe { bl_field_classify(h.0, 256, &mut v) }, BlStatus::Ok);
    assert_eq!(v, BlVerdict::Tight);
    let f = sphere(3);
    assert_eq!(unsafe { bl_field_classify(f.0, 256, &mut v) }, BlStatus::Ok);
    assert_eq!(v, BlVerdict::Overtwisted);

    let mut t = ptr::null_mut();
    assert_eq!(unsafe { bl_field_torus_standard(5, &mut t) }, BlStatus::Ok);
    let t = Handle(t);
    assert_eq!(unsafe { bl_field_classify(t.0, 256, &mut v) }, BlStatus::Ok);
    assert_eq!(v, BlVerdict::Tight);
}

#[test]
fn report_json() {
    let f = sphere(2);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { bl_field_report_json(f.0, 8, 1e-3, 256, &mut s) }, BlStatus::Ok);
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { bl_string_free(s) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["field"], "V_2");
    assert_eq!(v["lambda"], 4.0);
    assert_eq!(v["verdict"], "Overtwisted");
    assert_eq!(v["hopf_invariant"], -1);
}

#[test]
fn wave_field() {
    let k = [1i64, 1, 0];
    let b = [1i64, -1, 2];
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { bl_field_torus_wave(k.as_ptr(), b.as_ptr(), 2, &mut f) }, BlStatus::Ok);
    let f = Handle(f);
    let mut lambda = 0.0;
    assert_eq!(unsafe { bl_field_eigenvalue(f.0, &mut lambda) }, BlStatus::Ok);
    assert!((lambda - 2f64.sqrt()).abs() < 1e-15);

    let bad = [1i64, 0, 0];
    let mut g = ptr::null_mut();
    assert_eq!(
        unsafe { bl_field_torus_wave(k.as_ptr(), bad.as_ptr(), 1, &mut g) },
        BlStatus::NotPerpendicular
    );
    assert!(g.is_null());
    assert!(last_error().contains("perpendicular"));
}

#[test]
fn hopf_invariants() {
    for (m, h) in [(2, -1), (3, 0), (-2, 0), (-3, -1)] {
        let mut out = 7;
        assert_eq!(unsafe { bl_hopf_invariant_vm(m, &mut out) }, BlStatus::Ok);
        assert_eq!(out, h, "m = {m}");
    }
    let mut out = 0;
    assert_eq!(unsafe { bl_hopf_invariant_vm(1, &mut out) }, BlStatus::InvalidArgument);
}

#[test]
fn error_codes() {
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { bl_field_sphere_vm(1, &mut f) }, BlStatus::InvalidArgument);
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { bl_field_sphere_vm(2, ptr::null_mut()) }, BlStatus::NullPointer);

    let name = CString::new("nope").unwrap();
    assert_eq!(unsafe { bl_field_sphere_builtin(name.as_ptr(), &mut f) }, BlStatus::UnknownName);
    assert_eq!(unsafe { bl_field_sphere_builtin(ptr::null(), &mut f) }, BlStatus::NullPointer);
    assert_eq!(unsafe { bl_field_torus_standard(0, &mut f) }, BlStatus::InvalidArgument);

    let mut lambda = 0.0;
    assert_eq!(unsafe { bl_field_eigenvalue(ptr::null(), &mut lambda) }, BlStatus::NullPointer);

    let h = sphere(2);
    let mut r = 0.0;
    assert_eq!(unsafe { bl_field_eig_residual(h.0, 8, 0.5, &mut r) }, BlStatus::InvalidArgument);
    unsafe { bl_field_free(ptr::null_mut()) };
    unsafe { bl_string_free(ptr::null_mut()) };
}

#[test]
fn builtin_nonaxisymmetric() {
    let name = CString::new("nonaxisymmetric").unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { bl_field_sphere_builtin(name.as_ptr(), &mut f) }, BlStatus::Ok);
    let f = Handle(f);
    let mut lambda = 0.0;
    assert_eq!(unsafe { bl_field_eigenvalue(f.0, &mut lambda) }, BlStatus::Ok);
    assert_eq!(lambda, 4.0);
}

#[test]
fn header_lists_exports() {
    let header = include_str!("../include/beltrami_lab.h");
    for sym in [
        "bl_last_error",
        "bl_field_sphere_vm",
        "bl_field_sphere_builtin",
        "bl_field_torus_standard",
        "bl_field_torus_wave",
        "bl_field_free",
        "bl_field_eigenvalue",
        "bl_field_eig_residual",
        "bl_field_classify",
        "bl_field_report_json",
        "bl_hopf_invariant_vm",
        "bl_string_free",
        "typedef struct BlField BlField",
        "BL_STATUS_NOT_PERPENDICULAR = 4",
    ] {
        assert!(header.contains(sym), "{sym}");
    }
}
