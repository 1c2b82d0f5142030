//! C ABI over `helix_sturm`.
//!
//! Problems and spectra are opaque heap handles owned by the caller and
//! released with `hs_problem_free` / `hs_spectrum_free`. Every entry point
//! returns an `HsStatus`. On failure the message is available from
//! `hs_last_error` on the same thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use helix_sturm::{
    solve_bound_states, EffectivePotential, Error, Parameter, Potential, PotentialModel,
    ProblemSpec, RadialGrid, SolverTolerances, Spectrum,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidDomain = 3,
    NonFinitePotential = 4,
    ConvergenceFailure = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsModel {
    Free = 0,
    Cornell = 1,
    Kratzer = 2,
    MorseSmall = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsParam {
    Omega = 0,
    B0 = 1,
    PhiB = 2,
    CornellA = 3,
    CornellB = 4,
    KratzerA = 5,
    KratzerD = 6,
    MorseD = 7,
    MorseA = 8,
    MorseR0 = 9,
}

impl From<HsParam> for Parameter {
    fn from(p: HsParam) -> Self {
        match p {
            HsParam::Omega => Parameter::Omega,
            HsParam::B0 => Parameter::B0,
            HsParam::PhiB => Parameter::PhiB,
            HsParam::CornellA => Parameter::CornellA,
            HsParam::CornellB => Parameter::CornellB,
            HsParam::KratzerA => Parameter::KratzerA,
            HsParam::KratzerD => Parameter::KratzerD,
            HsParam::MorseD => Parameter::MorseD,
            HsParam::MorseA => Parameter::MorseA,
            HsParam::MorseR0 => Parameter::MorseR0,
        }
    }
}

/// Background constants, mirrored field for field.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HsPhysics {
    pub hbar: f64,
    pub mu: f64,
    pub e: f64,
    pub k: f64,
    pub omega: f64,
    pub b0: f64,
    pub phi_b: f64,
}

/// Opaque problem definition.
pub struct HsProblem {
    spec: ProblemSpec,
}

/// Opaque solver result.
pub struct HsSpectrum {
    spectrum: Spectrum,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: HsStatus, msg: impl Into<String>) -> HsStatus {
    set_error(msg.into());
    status
}

fn from_error(err: &Error) -> HsStatus {
    let status = match err {
        Error::InvalidDomain(_) => HsStatus::InvalidDomain,
        Error::NonFinitePotential { .. } => HsStatus::NonFinitePotential,
        Error::ConvergenceFailure { .. } => HsStatus::ConvergenceFailure,
        Error::InvalidParameter { .. } | Error::ZeroFunction | Error::InvalidRequest(_) => {
            HsStatus::InvalidArgument
        }
    };
    fail(status, err.to_string())
}

fn guard(f: impl FnOnce() -> HsStatus) -> HsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(HsStatus::Panic, format!("internal panic: {msg}"))
        }
    }
}

/// Message of the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

fn default_model(kind: HsModel) -> PotentialModel {
    match kind {
        HsModel::Free => PotentialModel::Free,
        HsModel::Cornell => PotentialModel::Cornell {
            coulomb: 1.0,
            linear: 0.02,
        },
        HsModel::Kratzer => PotentialModel::Kratzer {
            range: 1.0,
            depth: 1.0,
        },
        HsModel::MorseSmall => PotentialModel::MorseSmall {
            depth: 1.0,
            stiffness: 0.3,
            r0: 5.0,
        },
    }
}

/// New problem with default physics and grid. Model parameters start at
/// Cornell (1, 0.02), Kratzer (1, 1), Morse (1, 0.3, 5).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn hs_problem_new(
    kind: HsModel,
    m: i32,
    levels: usize,
    out: *mut *mut HsProblem,
) -> HsStatus {
    guard(|| {
        if out.is_null() {
            return fail(HsStatus::NullPointer, "out is NULL");
        }
        let grid = RadialGrid::new(
            RadialGrid::DEFAULT_R_MIN,
            RadialGrid::DEFAULT_R_MAX,
            RadialGrid::DEFAULT_INTERVALS,
        )
        .expect("default grid is valid");
        let spec = ProblemSpec::new(Default::default(), m, default_model(kind), grid, levels);
        if let Err(e) = spec.validate() {
            return from_error(&e);
        }
        *out = Box::into_raw(Box::new(HsProblem { spec }));
        HsStatus::Ok
    })
}

/// # Safety
/// `p` must be NULL or a handle from `hs_problem_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hs_problem_free(p: *mut HsProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

unsafe fn with_problem(p: *mut HsProblem, f: impl FnOnce(&mut ProblemSpec) -> HsStatus) -> HsStatus {
    guard(|| match p.as_mut() {
        Some(h) => f(&mut h.spec),
        None => fail(HsStatus::NullPointer, "problem handle is NULL"),
    })
}

/// Applies `edit` to a copy and keeps it only if the result validates.
fn edit_spec(spec: &mut ProblemSpec, edit: impl FnOnce(&mut ProblemSpec) -> Result<(), Error>) -> HsStatus {
    let mut next = spec.clone();
    if let Err(e) = edit(&mut next).and_then(|()| next.validate()) {
        return from_error(&e);
    }
    *spec = next;
    HsStatus::Ok
}

/// # Safety
/// `p` must be a live problem handle.
#[no_mangle]
pub unsafe extern "C" fn hs_problem_set_grid(
    p: *mut HsProblem,
    r_min: f64,
    r_max: f64,
    n_intervals: usize,
) -> HsStatus {
    with_problem(p, |spec| {
        edit_spec(spec, |s| {
            s.grid = RadialGrid::new(r_min, r_max, n_intervals)?;
            Ok(())
        })
    })
}

/// # Safety
/// `p` must be a live problem handle and `physics` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hs_problem_set_physics(p: *mut HsProblem, physics: *const HsPhysics) -> HsStatus {
    with_problem(p, |spec| {
        let Some(ph) = physics.as_ref() else {
            return fail(HsStatus::NullPointer, "physics is NULL");
        };
        edit_spec(spec, |s| {
            s.params.hbar = ph.hbar;
            s.params.mu = ph.mu;
            s.params.e = ph.e;
            s.params.k = ph.k;
            s.params.omega = ph.omega;
            s.params.b0 = ph.b0;
            s.params.phi_b = ph.phi_b;
            Ok(())
        })
    })
}

/// # Safety
/// `p` must be a live problem handle.
#[no_mangle]
pub unsafe extern "C" fn hs_problem_set_param(p: *mut HsProblem, param: HsParam, value: f64) -> HsStatus {
    with_problem(p, |spec| {
        edit_spec(spec, |s| {
            let Potential::Model(model) = &mut s.potential else {
                unreachable!("handles always carry a model potential")
            };
            Parameter::from(param).set(value, &mut s.params, &mut s.m, model)
        })
    })
}

/// # Safety
/// `p` must be a live problem handle.
#[no_mangle]
pub unsafe extern "C" fn hs_problem_set_m(p: *mut HsProblem, m: i32) -> HsStatus {
    with_problem(p, |spec| {
        spec.m = m;
        HsStatus::Ok
    })
}

/// # Safety
/// `p` must be a live problem handle.
#[no_mangle]
pub unsafe extern "C" fn hs_problem_set_tolerances(
    p: *mut HsProblem,
    tol_lambda: f64,
    tol_residual: f64,
    max_iterations: usize,
) -> HsStatus {
    with_problem(p, |spec| {
        edit_spec(spec, |s| {
            s.tolerances = SolverTolerances {
                tol_lambda,
                tol_residual,
                max_iterations,
            };
            Ok(())
        })
    })
}

/// Effective potential `V_eff(r)` of the problem.
///
/// # Safety
/// `p` must be a live problem handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hs_v_eff(p: *const HsProblem, r: f64, out: *mut f64) -> HsStatus {
    guard(|| {
        let (Some(h), false) = (p.as_ref(), out.is_null()) else {
            return fail(HsStatus::NullPointer, "NULL argument");
        };
        if !(r.is_finite() && r > 0.0) {
            return fail(HsStatus::InvalidArgument, format!("r must be positive, got {r}"));
        }
        let Potential::Model(model) = h.spec.potential else {
            unreachable!("handles always carry a model potential")
        };
        let v = EffectivePotential::new(h.spec.params, h.spec.m, model).v_eff(r);
        if !v.is_finite() {
            return fail(HsStatus::NonFinitePotential, format!("V_eff({r}) is not finite"));
        }
        *out = v;
        HsStatus::Ok
    })
}

/// Solves for the requested levels.
///
/// # Safety
/// `p` must be a live problem handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hs_solve(p: *const HsProblem, out: *mut *mut HsSpectrum) -> HsStatus {
    guard(|| {
        let (Some(h), false) = (p.as_ref(), out.is_null()) else {
            return fail(HsStatus::NullPointer, "NULL argument");
        };
        match solve_bound_states(&h.spec) {
            Ok(spectrum) => {
                *out = Box::into_raw(Box::new(HsSpectrum { spectrum }));
                HsStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

/// # Safety
/// `s` must be NULL or a handle from `hs_solve` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hs_spectrum_free(s: *mut HsSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of levels held. Returns 0 for NULL.
///
/// # Safety
/// `s` must be NULL or a live spectrum handle.
#[no_mangle]
pub unsafe extern "C" fn hs_spectrum_levels(s: *const HsSpectrum) -> usize {
    s.as_ref().map_or(0, |h| h.spectrum.lambdas.len())
}

/// Number of grid nodes, boundaries included. Returns 0 for NULL.
///
/// # Safety
/// `s` must be NULL or a live spectrum handle.
#[no_mangle]
pub unsafe extern "C" fn hs_spectrum_nodes(s: *const HsSpectrum) -> usize {
    s.as_ref().map_or(0, |h| h.spectrum.grid().n_intervals() + 1)
}

unsafe fn with_spectrum(s: *const HsSpectrum, f: impl FnOnce(&Spectrum) -> HsStatus) -> HsStatus {
    guard(|| match s.as_ref() {
        Some(h) => f(&h.spectrum),
        None => fail(HsStatus::NullPointer, "spectrum handle is NULL"),
    })
}

fn level_check(s: &Spectrum, n: usize) -> Result<(), HsStatus> {
    if n < s.lambdas.len() {
        Ok(())
    } else {
        Err(fail(
            HsStatus::InvalidArgument,
            format!("level {n} out of range 0..{}", s.lambdas.len()),
        ))
    }
}

unsafe fn copy_out(src: &[f64], buf: *mut f64, len: usize) -> HsStatus {
    if buf.is_null() {
        return fail(HsStatus::NullPointer, "buffer is NULL");
    }
    if len < src.len() {
        return fail(
            HsStatus::BufferTooSmall,
            format!("need {} values, buffer holds {len}", src.len()),
        );
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    HsStatus::Ok
}

/// `λ_n` and `E_n` of level `n`. Either output may be NULL.
///
/// # Safety
/// `s` must be a live spectrum handle; non-NULL outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn hs_spectrum_level(
    s: *const HsSpectrum,
    n: usize,
    lambda: *mut f64,
    energy: *mut f64,
) -> HsStatus {
    with_spectrum(s, |sp| {
        if let Err(st) = level_check(sp, n) {
            return st;
        }
        if let Some(l) = lambda.as_mut() {
            *l = sp.lambdas[n];
        }
        if let Some(e) = energy.as_mut() {
            *e = sp.energies[n];
        }
        HsStatus::Ok
    })
}

/// Copies the grid nodes (`hs_spectrum_nodes` values) into `buf`.
///
/// # Safety
/// `s` must be a live spectrum handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn hs_spectrum_copy_grid(s: *const HsSpectrum, buf: *mut f64, len: usize) -> HsStatus {
    with_spectrum(s, |sp| copy_out(&sp.grid().nodes(), buf, len))
}

/// Copies the normalized `f_n` on all nodes (zero at both ends) into `buf`.
///
/// # Safety
/// `s` must be a live spectrum handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn hs_spectrum_copy_function(
    s: *const HsSpectrum,
    n: usize,
    buf: *mut f64,
    len: usize,
) -> HsStatus {
    with_spectrum(s, |sp| match level_check(sp, n) {
        Ok(()) => copy_out(&sp.full_function(n), buf, len),
        Err(st) => st,
    })
}

/// Node count of `f_n`.
///
/// # Safety
/// `s` must be a live spectrum handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hs_spectrum_node_count(s: *const HsSpectrum, n: usize, out: *mut usize) -> HsStatus {
    with_spectrum(s, |sp| {
        if let Err(st) = level_check(sp, n) {
            return st;
        }
        match out.as_mut() {
            Some(o) => {
                *o = sp.node_counts[n];
                HsStatus::Ok
            }
            None => fail(HsStatus::NullPointer, "out is NULL"),
        }
    })
}

/// `∂λ_n/∂p` from the eigenvector.
///
/// # Safety
/// `s` must be a live spectrum handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hs_spectrum_dlambda(
    s: *const HsSpectrum,
    n: usize,
    param: HsParam,
    out: *mut f64,
) -> HsStatus {
    with_spectrum(s, |sp| {
        if let Err(st) = level_check(sp, n) {
            return st;
        }
        let Some(o) = out.as_mut() else {
            return fail(HsStatus::NullPointer, "out is NULL");
        };
        match sp.dlambda_dparam(n, param.into()) {
            Some(d) => {
                *o = d;
                HsStatus::Ok
            }
            None => fail(
                HsStatus::InvalidArgument,
                format!("{} does not apply to this model", Parameter::from(param)),
            ),
        }
    })
}
