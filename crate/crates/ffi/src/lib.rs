//! C ABI over `meridian_lab`.
//!
//! Surfaces are opaque handles built from the JSON config used by the CLI.
//! Every fallible call returns an [`MlStatus`]; on failure the message is
//! available from [`ml_last_error_message`] on the same thread. Output
//! arrays are caller-owned. Strings returned through `char **` belong to
//! the library and go back through [`ml_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use meridian_lab::classify::{classify_surface, Tolerances};
use meridian_lab::config::SurfaceConfig;
use meridian_lab::error::Error;
use meridian_lab::grid::SampleGrid;
use meridian_lab::minkowski::Bivector;
use meridian_lab::oracle::laplacian_fd;
use meridian_lab::surface::MeridianSurface;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Domain = 4,
    Frame = 5,
    Regime = 6,
    SingularLambda = 7,
    Ode = 8,
    Io = 9,
    Panic = 10,
}

/// Opaque surface handle.
pub struct MlSurface {
    config: SurfaceConfig,
    surface: MeridianSurface,
    grid: SampleGrid,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> MlStatus {
    match e {
        Error::Domain(_) => MlStatus::Domain,
        Error::Frame(_) => MlStatus::Frame,
        Error::SingularLambda { .. } => MlStatus::SingularLambda,
        Error::Regime(_) => MlStatus::Regime,
        Error::Ode(_) => MlStatus::Ode,
        Error::Config { .. } => MlStatus::Config,
        Error::Io(_) => MlStatus::Io,
    }
}

fn guard(f: impl FnOnce() -> Result<(), MlStatus>) -> MlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MlStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic");
            MlStatus::Panic
        }
    }
}

fn check(e: Error) -> MlStatus {
    set_error(e.to_string());
    status_of(&e)
}

unsafe fn surface_ref<'a>(s: *const MlSurface) -> Result<&'a MlSurface, MlStatus> {
    if s.is_null() {
        set_error("null surface handle");
        return Err(MlStatus::NullPointer);
    }
    Ok(&*s)
}

unsafe fn out_slice<'a, const N: usize>(out: *mut f64) -> Result<&'a mut [f64; N], MlStatus> {
    if out.is_null() {
        set_error("null output array");
        return Err(MlStatus::NullPointer);
    }
    Ok(&mut *(out as *mut [f64; N]))
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, MlStatus> {
    if s.is_null() {
        set_error(format!("null {what}"));
        return Err(MlStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        MlStatus::InvalidUtf8
    })
}

fn write_bivector(out: &mut [f64; 6], b: Bivector) {
    *out = b.0;
}

/// Builds a surface from a JSON config (same schema as the CLI).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ml_surface_from_json(json: *const c_char, out: *mut *mut MlSurface) -> MlStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output handle");
            return Err(MlStatus::NullPointer);
        }
        *out = ptr::null_mut();
        let text = read_str(json, "config")?;
        let config = SurfaceConfig::from_json(text).map_err(check)?;
        let surface = config.build().map_err(check)?;
        let grid = config.sample_grid(&surface).map_err(check)?;
        *out = Box::into_raw(Box::new(MlSurface { config, surface, grid }));
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a handle from [`ml_surface_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ml_surface_free(s: *mut MlSurface) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Writes the parameter domain as `u0, u1, v0, v1`.
///
/// # Safety
/// `s` must be a live handle and `out` must hold 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn ml_surface_domain(s: *const MlSurface, out: *mut f64) -> MlStatus {
    guard(|| {
        let s = surface_ref(s)?;
        let out = out_slice::<4>(out)?;
        let ((u0, u1), (v0, v1)) = (s.surface.u_domain(), s.surface.v_domain());
        *out = [u0, u1, v0, v1];
        Ok(())
    })
}

/// `z(u, v)` as 4 doubles `x1..x4`.
///
/// # Safety
/// `s` must be a live handle and `out` must hold 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn ml_surface_immersion(s: *const MlSurface, u: f64, v: f64, out: *mut f64) -> MlStatus {
    guard(|| {
        let s = surface_ref(s)?;
        let out = out_slice::<4>(out)?;
        *out = s.surface.immersion(u, v).map_err(check)?.0;
        Ok(())
    })
}

/// Frame `x, y, n1, n2` as 16 doubles, one vector after another.
///
/// # Safety
/// `s` must be a live handle and `out` must hold 16 doubles.
#[no_mangle]
pub unsafe extern "C" fn ml_surface_frame(s: *const MlSurface, u: f64, v: f64, out: *mut f64) -> MlStatus {
    guard(|| {
        let s = surface_ref(s)?;
        let out = out_slice::<16>(out)?;
        let fr = s.surface.frame(u, v).map_err(check)?;
        for (k, vec) in fr.vectors().iter().enumerate() {
            out[4 * k..4 * k + 4].copy_from_slice(&vec.0);
        }
        Ok(())
    })
}

/// `G = x ^ y` in the order `(12, 13, 14, 23, 24, 34)`.
///
/// # Safety
/// `s` must be a live handle and `out` must hold 6 doubles.
#[no_mangle]
pub unsafe extern "C" fn ml_surface_gauss_map(s: *const MlSurface, u: f64, v: f64, out: *mut f64) -> MlStatus {
    guard(|| {
        let s = surface_ref(s)?;
        write_bivector(out_slice::<6>(out)?, s.surface.gauss_map(u, v).map_err(check)?);
        Ok(())
    })
}

/// Closed-form `Delta G`.
///
/// # Safety
/// `s` must be a live handle and `out` must hold 6 doubles.
#[no_mangle]
pub unsafe extern "C" fn ml_surface_laplacian_closed(s: *const MlSurface, u: f64, v: f64, out: *mut f64) -> MlStatus {
    guard(|| {
        let s = surface_ref(s)?;
        write_bivector(out_slice::<6>(out)?, s.surface.laplacian_closed(u, v).map_err(check)?);
        Ok(())
    })
}

/// Finite-difference `Delta G` with arc-length step `h`.
///
/// # Safety
/// `s` must be a live handle and `out` must hold 6 doubles.
#[no_mangle]
pub unsafe extern "C" fn ml_surface_laplacian_fd(s: *const MlSurface, u: f64, v: f64, h: f64, out: *mut f64) -> MlStatus {
    guard(|| {
        let s = surface_ref(s)?;
        write_bivector(out_slice::<6>(out)?, laplacian_fd(&s.surface, u, v, h).map_err(check)?);
        Ok(())
    })
}

/// Classifies on the config grid. `tolerances_json` may be null for the
/// defaults. The verdict JSON goes to `*out`; free it with [`ml_string_free`].
///
/// # Safety
/// `s` must be a live handle, `tolerances_json` null or NUL-terminated,
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ml_surface_classify_json(s: *const MlSurface, tolerances_json: *const c_char, out: *mut *mut c_char) -> MlStatus {
    guard(|| {
        let s = surface_ref(s)?;
        if out.is_null() {
            set_error("null output string");
            return Err(MlStatus::NullPointer);
        }
        *out = ptr::null_mut();
        let tol = if tolerances_json.is_null() {
            Tolerances::default()
        } else {
            let text = read_str(tolerances_json, "tolerances")?;
            let tol: Tolerances = meridian_lab::config::parse_json(text).map_err(check)?;
            tol.validate().map_err(check)?;
            tol
        };
        let verdict = classify_surface(&s.surface, &s.grid, &tol).map_err(check)?;
        let json = serde_json::to_string(&verdict).expect("verdict serializes");
        *out = CString::new(json).expect("JSON has no NUL").into_raw();
        Ok(())
    })
}

/// The config the handle was built from, re-serialized.
///
/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ml_surface_config_json(s: *const MlSurface, out: *mut *mut c_char) -> MlStatus {
    guard(|| {
        let s = surface_ref(s)?;
        if out.is_null() {
            set_error("null output string");
            return Err(MlStatus::NullPointer);
        }
        let json = serde_json::to_string(&s.config).expect("config serializes");
        *out = CString::new(json).expect("JSON has no NUL").into_raw();
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ml_string_free(p: *mut c_char) {
    if !p.is_null() {
        drop(CString::from_raw(p));
    }
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ml_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

/// NUL-terminated library version.
#[no_mangle]
pub extern "C" fn ml_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
