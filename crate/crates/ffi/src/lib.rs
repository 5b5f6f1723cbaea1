//! C ABI over the `tandelbrot` library.
//!
//! Conventions: every fallible function returns a [`TdbStatus`] and writes
//! its results through out-pointers. On failure a message is kept per
//! thread and can be read with [`tdb_last_error_message`]. Objects are
//! opaque handles released with the matching `*_free` function; strings and
//! byte buffers returned to the caller are released with
//! [`tdb_string_free`] and [`tdb_bytes_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use tandelbrot::analysis::analyze_parameter;
use tandelbrot::conjugacy::ModelConstants;
use tandelbrot::newton::{classify_newton_orbit, NewtonFate, NewtonParam};
use tandelbrot::orbit::{classify_orbit, IterationSettings, OrbitFate};
use tandelbrot::render::{
    encode_tile, render_dynamical_plane, render_parameter_plane, DynInstance, ParamFamily, TileGrid, Viewport,
};
use tandelbrot::{SpherePoint, TandelbrotError, TangentParam};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TdbStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A numeric argument was malformed (non-finite, zero-sized, ...).
    InvalidArgument = 2,
    /// The parameter or point lies outside the domain of the map.
    Domain = 3,
    /// An iterative solver did not converge.
    NoConvergence = 4,
    /// Unexpected internal failure; the library caught a panic.
    Internal = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TdbComplex {
    pub re: f64,
    pub im: f64,
}

impl From<TdbComplex> for Complex64 {
    fn from(z: TdbComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

impl From<Complex64> for TdbComplex {
    fn from(z: Complex64) -> Self {
        TdbComplex { re: z.re, im: z.im }
    }
}

/// A point on the Riemann sphere: `is_infinity` set means `z` is unused.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TdbSpherePoint {
    pub z: TdbComplex,
    pub is_infinity: bool,
}

/// Fate codes match the tile format: 0 captured (or converged to a root),
/// 1 attracting cycle, 2 pole hit, 3 undecided. `period`, `multiplier`
/// and `representative` are meaningful only for fate 1.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TdbOrbitResult {
    pub fate: u8,
    pub steps: u32,
    pub period: u32,
    pub multiplier: TdbComplex,
    pub representative: TdbComplex,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TdbModelConstants {
    pub p_star: f64,
    pub t: f64,
    pub c: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TdbFamily {
    Tangent = 0,
    Newton = 1,
}

/// Opaque handle to a map `T_α`.
pub struct TdbTangent(TangentParam);

/// Opaque handle to a rendered fate grid.
pub struct TdbTile(TileGrid);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &TandelbrotError) -> TdbStatus {
    use TandelbrotError::*;
    match e {
        InvalidArgument(_) | ZeroPixelViewport | MalformedTile(_) | InvalidSeed(_) => TdbStatus::InvalidArgument,
        NoConvergence(_) | DegenerateDerivative | ContinuationLost(_) => TdbStatus::NoConvergence,
        _ => TdbStatus::Domain,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard<F>(f: F) -> TdbStatus
where
    F: FnOnce() -> Result<(), (TdbStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TdbStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            TdbStatus::Internal
        }
    }
}

fn lib<T>(r: tandelbrot::Result<T>) -> Result<T, (TdbStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null() -> (TdbStatus, String) {
    (TdbStatus::NullPointer, "null pointer argument".into())
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, (TdbStatus, String)> {
    p.as_mut().ok_or_else(null)
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, (TdbStatus, String)> {
    p.as_ref().ok_or_else(null)
}

fn settings(max_iter: u32) -> IterationSettings {
    if max_iter == 0 {
        IterationSettings::analysis()
    } else {
        IterationSettings::analysis().with_max_iter(max_iter)
    }
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tdb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub unsafe extern "C" fn tdb_tangent_new(alpha: TdbComplex, out_handle: *mut *mut TdbTangent) -> TdbStatus {
    guard(|| {
        let slot = out(out_handle)?;
        let p = lib(TangentParam::new(alpha.into()))?;
        *slot = Box::into_raw(Box::new(TdbTangent(p)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn tdb_tangent_free(h: *mut TdbTangent) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// `T_α(z)` on the sphere; pole inputs yield `is_infinity`.
#[no_mangle]
pub unsafe extern "C" fn tdb_tangent_eval(
    h: *const TdbTangent,
    z: TdbComplex,
    result: *mut TdbSpherePoint,
) -> TdbStatus {
    guard(|| {
        let p = &handle(h)?.0;
        let slot = out(result)?;
        *slot = match p.eval_finite(z.into()).value {
            SpherePoint::Finite(w) => TdbSpherePoint { z: w.into(), is_infinity: false },
            SpherePoint::Infinity => TdbSpherePoint { z: TdbComplex { re: 0.0, im: 0.0 }, is_infinity: true },
        };
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn tdb_tangent_derivative(
    h: *const TdbTangent,
    z: TdbComplex,
    result: *mut TdbComplex,
) -> TdbStatus {
    guard(|| {
        let p = &handle(h)?.0;
        let slot = out(result)?;
        *slot = lib(p.eval_derivative(z.into()))?.into();
        Ok(())
    })
}

/// Classifies the orbit of `z0` under `T_α` (`|α| < 1`). `max_iter = 0`
/// selects the library default.
#[no_mangle]
pub unsafe extern "C" fn tdb_tangent_classify(
    h: *const TdbTangent,
    z0: TdbComplex,
    max_iter: u32,
    result: *mut TdbOrbitResult,
) -> TdbStatus {
    guard(|| {
        let p = &handle(h)?.0;
        let slot = out(result)?;
        let fate = lib(classify_orbit(p, z0.into(), &settings(max_iter)))?;
        let code = match fate {
            OrbitFate::CapturedByZero { .. } => 0,
            OrbitFate::AttractingCycle { .. } => 1,
            OrbitFate::PoleHit { .. } => 2,
            OrbitFate::Undecided { .. } => 3,
        };
        *slot = orbit_result(code, fate.steps(), fate.cycle());
        Ok(())
    })
}

fn orbit_result(fate: u8, steps: u32, cycle: Option<tandelbrot::CycleInfo>) -> TdbOrbitResult {
    let zero = TdbComplex { re: 0.0, im: 0.0 };
    TdbOrbitResult {
        fate,
        steps,
        period: cycle.map_or(0, |c| c.period),
        multiplier: cycle.map_or(zero, |c| c.multiplier.into()),
        representative: cycle.map_or(zero, |c| c.representative.into()),
    }
}

/// Orbit of the free asymptotic value 0 under the Newton map `N_a`.
/// A converged root is reported as fate 0 with the root in
/// `representative`.
#[no_mangle]
pub unsafe extern "C" fn tdb_newton_classify(a: TdbComplex, max_iter: u32, result: *mut TdbOrbitResult) -> TdbStatus {
    guard(|| {
        let slot = out(result)?;
        let p = lib(NewtonParam::new(a.into()))?;
        let fate = lib(classify_newton_orbit(&p, &settings(max_iter)))?;
        *slot = match fate {
            NewtonFate::ConvergedToRoot { root, steps } => {
                TdbOrbitResult { representative: root.into(), ..orbit_result(0, steps, None) }
            }
            NewtonFate::AttractingCycle { info, steps } => orbit_result(1, steps, Some(info)),
            NewtonFate::PoleHit { steps } => orbit_result(2, steps, None),
            NewtonFate::Undecided { steps } => orbit_result(3, steps, None),
        };
        Ok(())
    })
}

/// Parameter report for `α` as a JSON string; free it with
/// [`tdb_string_free`].
#[no_mangle]
pub unsafe extern "C" fn tdb_analyze_json(alpha: TdbComplex, out_json: *mut *mut c_char) -> TdbStatus {
    guard(|| {
        let slot = out(out_json)?;
        let report = lib(analyze_parameter(alpha.into(), &IterationSettings::analysis()))?;
        let c = CString::new(report.to_json()).map_err(|e| (TdbStatus::Internal, e.to_string()))?;
        *slot = c.into_raw();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn tdb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub unsafe extern "C" fn tdb_model_constants(result: *mut TdbModelConstants) -> TdbStatus {
    guard(|| {
        let slot = out(result)?;
        let m = ModelConstants::get();
        *slot = TdbModelConstants { p_star: m.p_star, t: m.t, c: m.c };
        Ok(())
    })
}

unsafe fn store_tile(r: tandelbrot::Result<TileGrid>, slot: *mut *mut TdbTile) -> Result<(), (TdbStatus, String)> {
    let slot = out(slot)?;
    *slot = Box::into_raw(Box::new(TdbTile(lib(r)?)));
    Ok(())
}

/// Renders the parameter plane of `family` on a `px × py` viewport.
#[no_mangle]
pub unsafe extern "C" fn tdb_render_parameter_plane(
    family: TdbFamily,
    center: TdbComplex,
    width: f64,
    px: u32,
    py: u32,
    max_iter: u32,
    out_tile: *mut *mut TdbTile,
) -> TdbStatus {
    guard(|| {
        let vp = lib(Viewport::new(center.into(), width, px, py))?;
        let fam = match family {
            TdbFamily::Tangent => ParamFamily::Tangent,
            TdbFamily::Newton => ParamFamily::Newton,
        };
        let s = IterationSettings::rendering().with_max_iter(if max_iter == 0 { 5000 } else { max_iter });
        store_tile(render_parameter_plane(fam, &vp, &s), out_tile)
    })
}

/// Renders the dynamical plane of `T_param` or `N_param`.
#[no_mangle]
pub unsafe extern "C" fn tdb_render_dynamical_plane(
    family: TdbFamily,
    param: TdbComplex,
    center: TdbComplex,
    width: f64,
    px: u32,
    py: u32,
    max_iter: u32,
    out_tile: *mut *mut TdbTile,
) -> TdbStatus {
    guard(|| {
        let vp = lib(Viewport::new(center.into(), width, px, py))?;
        let inst = match family {
            TdbFamily::Tangent => DynInstance::Tangent(lib(TangentParam::new(param.into()))?),
            TdbFamily::Newton => DynInstance::Newton(lib(NewtonParam::new(param.into()))?),
        };
        let s = IterationSettings::rendering().with_max_iter(if max_iter == 0 { 5000 } else { max_iter });
        store_tile(render_dynamical_plane(inst, &vp, &s), out_tile)
    })
}

#[no_mangle]
pub unsafe extern "C" fn tdb_tile_free(t: *mut TdbTile) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

#[no_mangle]
pub unsafe extern "C" fn tdb_tile_size(t: *const TdbTile, px: *mut u32, py: *mut u32) -> TdbStatus {
    guard(|| {
        let g = &handle(t)?.0;
        *out(px)? = g.viewport.px;
        *out(py)? = g.viewport.py;
        Ok(())
    })
}

/// Borrowed views of the three per-pixel arrays, each `px·py` long and
/// valid while the tile lives. Any out-pointer may be null to skip it.
#[no_mangle]
pub unsafe extern "C" fn tdb_tile_data(
    t: *const TdbTile,
    fate: *mut *const u8,
    value: *mut *const u32,
    aux: *mut *const f32,
) -> TdbStatus {
    guard(|| {
        let g = &handle(t)?.0;
        if let Some(f) = fate.as_mut() {
            *f = g.fate.as_ptr();
        }
        if let Some(v) = value.as_mut() {
            *v = g.value.as_ptr();
        }
        if let Some(a) = aux.as_mut() {
            *a = g.aux.as_ptr();
        }
        Ok(())
    })
}

/// The tile in its binary wire format; free with [`tdb_bytes_free`].
#[no_mangle]
pub unsafe extern "C" fn tdb_tile_encode(t: *const TdbTile, out_bytes: *mut *mut u8, out_len: *mut usize) -> TdbStatus {
    guard(|| {
        let g = &handle(t)?.0;
        let bytes_slot = out(out_bytes)?;
        let len_slot = out(out_len)?;
        let boxed = encode_tile(g).into_boxed_slice();
        *len_slot = boxed.len();
        *bytes_slot = Box::into_raw(boxed) as *mut u8;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn tdb_bytes_free(bytes: *mut u8, len: usize) {
    if !bytes.is_null() {
        drop(Box::from_raw(ptr::slice_from_raw_parts_mut(bytes, len)));
    }
}
