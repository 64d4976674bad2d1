//! C ABI over `beltrami-lab`.
//!
//! Fields are opaque handles created by the `bl_field_*` constructors and
//! released with [`bl_field_free`]. Every fallible call returns a
//! [`BlStatus`]; on failure [`bl_last_error`] describes what went wrong on
//! the calling thread. Strings returned through out-parameters are owned by
//! the caller and must be released with [`bl_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use beltrami_lab::contact::Verdict;
use beltrami_lab::hopf_invariant::hopf_class_vm;
use beltrami_lab::manifold::FdOptions;
use beltrami_lab::report::{
    sphere_eig_residual, sphere_report, to_json_string, torus_eig_residual, torus_report, ReportOptions,
};
use beltrami_lab::sphere_fields::{builtin_example, AxisymmetricField, SphereField};
use beltrami_lab::torus_fields::{build_vk, standard_form, TorusField, WaveSpec};
use beltrami_lab::Error;
use num_rational::Rational64;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnknownName = 3,
    NotPerpendicular = 4,
    Inapplicable = 5,
    /// A numerical check or certificate did not hold.
    Verification = 6,
    Io = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlVerdict {
    Tight = 0,
    Overtwisted = 1,
    Inconclusive = 2,
}

enum Field {
    Sphere(String, SphereField),
    Torus(String, TorusField),
}

/// Opaque field handle.
pub struct BlField(Field);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> BlStatus {
    match e {
        Error::InvalidArgument(_) | Error::NotEigenfunction(_) => BlStatus::InvalidArgument,
        Error::UnknownName(_) => BlStatus::UnknownName,
        Error::NotPerpendicular { .. } => BlStatus::NotPerpendicular,
        Error::Inapplicable(_) => BlStatus::Inapplicable,
        Error::Io(_) => BlStatus::Io,
        _ => BlStatus::Verification,
    }
}

/// Runs `f`, recording errors and panics.
fn guard<F>(f: F) -> BlStatus
where
    F: FnOnce() -> Result<(), (BlStatus, String)>,
{
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BlStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            BlStatus::Panic
        }
    }
}

fn lift(e: Error) -> (BlStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (BlStatus, String) {
    (BlStatus::NullPointer, format!("{what} is null"))
}

unsafe fn field_ref<'a>(f: *const BlField) -> Result<&'a Field, (BlStatus, String)> {
    f.as_ref().map(|b| &b.0).ok_or_else(|| null("field"))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), (BlStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_field(out: *mut *mut BlField, field: Field) -> Result<(), (BlStatus, String)> {
    put(out, Box::into_raw(Box::new(BlField(field))))
}

fn report_options(grid: usize, h: f64, nodal_grid: usize) -> Result<ReportOptions, (BlStatus, String)> {
    let opts = ReportOptions { grid, h, nodal_grid };
    opts.validate().map_err(lift)?;
    Ok(opts)
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn bl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Axisymmetric sphere eigenfield with eigenvalue `2m`, `|m| >= 2`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_field_sphere_vm(m: i32, out: *mut *mut BlField) -> BlStatus {
    guard(|| {
        let v = AxisymmetricField::build_vm(m).map_err(lift)?;
        put_field(out, Field::Sphere(format!("V_{m}"), SphereField::Axisymmetric(v)))
    })
}

/// Named sphere example: `hopf`, `antihopf`, `v2`, `v3` or `nonaxisymmetric`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_field_sphere_builtin(name: *const c_char, out: *mut *mut BlField) -> BlStatus {
    guard(|| {
        if name.is_null() {
            return Err(null("name"));
        }
        let name = CStr::from_ptr(name)
            .to_str()
            .map_err(|_| (BlStatus::InvalidArgument, "name is not UTF-8".to_string()))?;
        let v = builtin_example(name).map_err(lift)?;
        put_field(out, Field::Sphere(name.to_string(), v))
    })
}

/// Standard torus field `sin(m x3) d/dx1 + cos(m x3) d/dx2`, `m > 0`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_field_torus_standard(m: i64, out: *mut *mut BlField) -> BlStatus {
    guard(|| {
        let v = standard_form(m).map_err(lift)?;
        put_field(out, Field::Torus(format!("eta_{m}"), v))
    })
}

/// Single-mode torus eigenfield with wave vector `k` and amplitude
/// `b_num / b_den`, which must be perpendicular to `k`.
///
/// # Safety
/// `k` and `b_num` must point to three `int64_t` each; `out` must be valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_field_torus_wave(
    k: *const i64,
    b_num: *const i64,
    b_den: i64,
    out: *mut *mut BlField,
) -> BlStatus {
    guard(|| {
        if k.is_null() || b_num.is_null() {
            return Err(null("k or b"));
        }
        if b_den == 0 {
            return Err((BlStatus::InvalidArgument, "denominator is zero".into()));
        }
        let k: [i64; 3] = ptr::read(k.cast());
        let b: [i64; 3] = ptr::read(b_num.cast());
        let b = b.map(|n| Rational64::new(n, b_den));
        let spec = WaveSpec::new(k, b).map_err(lift)?;
        put_field(out, Field::Torus(format!("vk_{}_{}_{}", k[0], k[1], k[2]), build_vk(&spec)))
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `field` must come from a `bl_field_*` constructor and not be used again.
#[no_mangle]
pub unsafe extern "C" fn bl_field_free(field: *mut BlField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Curl eigenvalue of the field. Fails with `Inapplicable` when the field
/// is Beltrami with a nonconstant factor.
///
/// # Safety
/// `field` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_field_eigenvalue(field: *const BlField, out: *mut f64) -> BlStatus {
    guard(|| {
        let lambda = match field_ref(field)? {
            Field::Sphere(_, v) => v.lambda(),
            Field::Torus(_, v) => v.lambda(),
        };
        let lambda = lambda.ok_or_else(|| lift(Error::Inapplicable("field has no constant eigenvalue".into())))?;
        put(out, lambda)
    })
}

/// Relative residual of `curl V = lambda V` on a `grid^3` lattice using
/// Richardson-extrapolated differences with step `h`.
///
/// # Safety
/// `field` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_field_eig_residual(field: *const BlField, grid: usize, h: f64, out: *mut f64) -> BlStatus {
    guard(|| {
        report_options(grid, h, beltrami_lab::nodal::MIN_GRID)?;
        let r = match field_ref(field)? {
            Field::Sphere(_, v) => sphere_eig_residual(v, grid, FdOptions::richardson(h)),
            Field::Torus(_, v) => torus_eig_residual(v, grid, FdOptions::richardson(h)),
        }
        .map_err(lift)?;
        put(out, r)
    })
}

/// Tight/overtwisted verdict of the dual contact form.
///
/// # Safety
/// `field` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_field_classify(field: *const BlField, nodal_grid: usize, out: *mut BlVerdict) -> BlStatus {
    guard(|| {
        let c = match field_ref(field)? {
            Field::Sphere(_, v) => beltrami_lab::contact::giroux_classify_sphere(v),
            Field::Torus(_, v) => {
                report_options(2, 1e-3, nodal_grid)?;
                beltrami_lab::contact::giroux_classify_torus(v, nodal_grid)
            }
        }
        .map_err(lift)?;
        put(
            out,
            match c.verdict {
                Verdict::Tight => BlVerdict::Tight,
                Verdict::Overtwisted => BlVerdict::Overtwisted,
                Verdict::Inconclusive => BlVerdict::Inconclusive,
            },
        )
    })
}

/// Full contact report as JSON. Release the string with [`bl_string_free`].
///
/// # Safety
/// `field` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_field_report_json(
    field: *const BlField,
    grid: usize,
    h: f64,
    nodal_grid: usize,
    out: *mut *mut c_char,
) -> BlStatus {
    guard(|| {
        let opts = report_options(grid, h, nodal_grid)?;
        let (report, _) = match field_ref(field)? {
            Field::Sphere(name, v) => sphere_report(name, v, &opts),
            Field::Torus(name, v) => torus_report(name, v, &opts),
        }
        .map_err(lift)?;
        let json = to_json_string(&report).map_err(lift)?;
        let c = CString::new(json).map_err(|e| (BlStatus::Panic, e.to_string()))?;
        put(out, c.into_raw())
    })
}

/// Hopf invariant of the unit-normalized axisymmetric eigenfield with
/// eigenvalue `m`, by quadrature and rounded to the nearest integer.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_hopf_invariant_vm(m: i32, out: *mut i64) -> BlStatus {
    guard(|| {
        let c = hopf_class_vm(m).map_err(lift)?;
        put(out, c.quadrature.rounded)
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used again.
#[no_mangle]
pub unsafe extern "C" fn bl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
