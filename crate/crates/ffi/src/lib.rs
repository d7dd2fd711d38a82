//! C ABI over the rotoseen core.
//!
//! Every fallible call returns an `RrStatus`; results go through out
//! pointers. Objects are opaque handles released with the matching
//! `rr_*_free`. The text of the last error on the calling thread is
//! available from `rr_last_error_message`.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use rotoseen::counterexample::{blowup_ratio, build_item, CounterexampleItem, SigmaWindow};
use rotoseen::numerics::quad::QuadOptions;
use rotoseen::resonance::{dist_to_lattice, min_positive_element, Lattice, Ratio};
use rotoseen::solver::{eval_symbol, solve_resolvent_rotating, Symbol};
use rotoseen::spectral::{Profile, SpectralField, SpectralGrid};
use rotoseen::{Error, Params};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RrStatus {
    Ok = 0,
    InvalidArgument = 1,
    NumericalPrecondition = 2,
    NotFound = 3,
    NullPointer = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RrComplex {
    pub re: f64,
    pub im: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RrParams {
    pub lambda: f64,
    pub omega: f64,
    pub s: f64,
    pub period: f64,
    pub q: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RrRatioKind {
    Rational = 0,
    Sqrt2 = 1,
    Golden = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RrWindow {
    Resonant = 0,
    Literal = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RrSymbol {
    M = 0,
    M0 = 1,
    M1 = 2,
    M2 = 3,
    /// Uses the `j`, `l` arguments (0-based).
    Mjl = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RrRhsKind {
    Axial = 0,
    Swirl = 1,
    Gradient = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RrItemInfo {
    pub n: u64,
    pub k_n: i64,
    pub ell_n: i64,
    pub sigma_n: f64,
    pub s_n: f64,
    pub alpha: f64,
    pub omega: f64,
    pub lambda: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RrBlowup {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// `C√n`, or 0 when `has_certified` is false.
    pub certified_lower: f64,
    pub has_certified: bool,
}

/// A counterexample item.
pub struct RrItem(CounterexampleItem);

/// A closed-form right-hand side.
pub struct RrField(SpectralField);

/// A rotating-frame resolvent solution.
pub struct RrSolution {
    velocity: SpectralField,
    residual_interior: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: Error) -> RrStatus {
    let status = match &e {
        Error::NotFound { .. } => RrStatus::NotFound,
        e if e.is_numerical_precondition() => RrStatus::NumericalPrecondition,
        _ => RrStatus::InvalidArgument,
    };
    set_error(e.to_string());
    status
}

fn null_pointer(what: &str) -> RrStatus {
    set_error(format!("null pointer: {what}"));
    RrStatus::NullPointer
}

fn bad_enum(what: &str, x: i32) -> RrStatus {
    set_error(format!("invalid value {x} for `{what}`"));
    RrStatus::InvalidArgument
}

fn guard<F: FnOnce() -> Result<(), RrStatus>>(f: F) -> RrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RrStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            RrStatus::Panic
        }
    }
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, RrStatus> {
    p.as_mut().ok_or_else(|| null_pointer(what))
}

unsafe fn in_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, RrStatus> {
    p.as_ref().ok_or_else(|| null_pointer(what))
}

fn params_of(p: &RrParams) -> Result<Params, RrStatus> {
    Params::new(p.lambda, p.omega, p.s, p.period, p.q).map_err(status_of)
}

/// Copy the last error message on this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full length including the NUL.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn rr_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let bytes = e.borrow();
        let bytes = bytes.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        bytes.len() + 1
    })
}

/// `min_k |s − ωk|`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rr_dist_to_lattice(s: f64, omega: f64, out: *mut f64) -> RrStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if !(omega.is_finite() && omega > 0.0 && s.is_finite()) {
            set_error("omega must be finite and > 0 and s finite".into());
            return Err(RrStatus::InvalidArgument);
        }
        *out = dist_to_lattice(s, omega);
        Ok(())
    })
}

/// Smallest positive element of `αℤ + ωℤ` for `α/ω = c/d`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rr_min_positive(c: u64, d: u64, omega: f64, out: *mut f64) -> RrStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let ratio = Ratio::rational(c, d).map_err(status_of)?;
        let lattice = Lattice::new(omega, ratio).map_err(status_of)?;
        *out = min_positive_element(&lattice.classify(), omega).map_err(status_of)?;
        Ok(())
    })
}

/// Evaluate one resolvent multiplier at `(k, ξ)`; `which` is an `rr_symbol`.
///
/// # Safety
/// `params` and `out` must be null or valid; `xi` must be null or point to
/// three doubles.
#[no_mangle]
pub unsafe extern "C" fn rr_eval_symbol(
    params: *const RrParams,
    k: f64,
    xi: *const f64,
    which: i32,
    j: u32,
    l: u32,
    out: *mut RrComplex,
) -> RrStatus {
    guard(|| {
        let p = params_of(in_ref(params, "params")?)?;
        let xi = *in_ref(xi as *const [f64; 3], "xi")?;
        let out = out_ref(out, "out")?;
        let sym = match which {
            x if x == RrSymbol::M as i32 => Symbol::M,
            x if x == RrSymbol::M0 as i32 => Symbol::M0,
            x if x == RrSymbol::M1 as i32 => Symbol::M1,
            x if x == RrSymbol::M2 as i32 => Symbol::M2,
            x if x == RrSymbol::Mjl as i32 => Symbol::Mjl(j as usize, l as usize),
            x => return Err(bad_enum("which", x)),
        };
        let v = eval_symbol(&p, k, xi, sym).map_err(status_of)?;
        *out = RrComplex { re: v.re, im: v.im };
        Ok(())
    })
}

/// Build counterexample item `n` for `α/ω` given by `kind` (an
/// `rr_ratio_kind`; `c`, `d` are read only for `Rational`, which is always
/// refused). `window` is an `rr_window`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rr_item_build(
    n: u64,
    kind: i32,
    c: u64,
    d: u64,
    omega: f64,
    lambda: f64,
    window: i32,
    out: *mut *mut RrItem,
) -> RrStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let ratio = match kind {
            x if x == RrRatioKind::Rational as i32 => Ratio::rational(c, d).map_err(status_of)?,
            x if x == RrRatioKind::Sqrt2 as i32 => Ratio::Sqrt2,
            x if x == RrRatioKind::Golden as i32 => Ratio::Golden,
            x => return Err(bad_enum("kind", x)),
        };
        let window = match window {
            x if x == RrWindow::Resonant as i32 => SigmaWindow::Resonant,
            x if x == RrWindow::Literal as i32 => SigmaWindow::Literal,
            x => return Err(bad_enum("window", x)),
        };
        let lattice = Lattice::new(omega, ratio).map_err(status_of)?;
        let item = build_item(n, &lattice, lambda, window).map_err(status_of)?;
        *out = Box::into_raw(Box::new(RrItem(item)));
        Ok(())
    })
}

/// # Safety
/// `item` must be null or a handle from `rr_item_build`, freed once.
#[no_mangle]
pub unsafe extern "C" fn rr_item_free(item: *mut RrItem) {
    if !item.is_null() {
        drop(Box::from_raw(item));
    }
}

/// # Safety
/// `item` must be null or a live handle; `out` null or valid.
#[no_mangle]
pub unsafe extern "C" fn rr_item_get(item: *const RrItem, out: *mut RrItemInfo) -> RrStatus {
    guard(|| {
        let it = &in_ref(item, "item")?.0;
        *out_ref(out, "out")? = RrItemInfo {
            n: it.n,
            k_n: it.k_n,
            ell_n: it.ell_n,
            sigma_n: it.sigma_n,
            s_n: it.s_n,
            alpha: it.alpha,
            omega: it.omega,
            lambda: it.lambda,
        };
        Ok(())
    })
}

/// # Safety
/// `item` must be null or a live handle; `out` null or valid.
#[no_mangle]
pub unsafe extern "C" fn rr_item_blowup(item: *const RrItem, out: *mut RrBlowup) -> RrStatus {
    guard(|| {
        let it = &in_ref(item, "item")?.0;
        let out = out_ref(out, "out")?;
        let r = blowup_ratio(it, QuadOptions::rel(1e-10));
        *out = RrBlowup {
            lhs: r.lhs_norm,
            rhs: r.rhs_norm,
            ratio: r.ratio,
            certified_lower: r.certified_lower.unwrap_or(0.0),
            has_certified: r.certified_lower.is_some(),
        };
        Ok(())
    })
}

/// Closed-form Gaussian right-hand side of width `width`; `kind` is an
/// `rr_rhs_kind`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rr_rhs_new(kind: i32, width: f64, out: *mut *mut RrField) -> RrStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if !(width.is_finite() && width > 0.0) {
            set_error("width must be finite and > 0".into());
            return Err(RrStatus::InvalidArgument);
        }
        let p = match kind {
            x if x == RrRhsKind::Axial as i32 => Profile::axial_gaussian(width),
            x if x == RrRhsKind::Swirl as i32 => Profile::swirl_gaussian(width),
            x if x == RrRhsKind::Gradient as i32 => Profile::gradient_gaussian(width),
            x => return Err(bad_enum("kind", x)),
        };
        *out = Box::into_raw(Box::new(RrField(p.into())));
        Ok(())
    })
}

/// # Safety
/// `field` must be null or a handle from `rr_rhs_new`, freed once.
#[no_mangle]
pub unsafe extern "C" fn rr_field_free(field: *mut RrField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Rotating-frame resolvent solve; the residual is checked on a grid of
/// `grid_points` per axis over `[−grid_half_width, grid_half_width]³`.
///
/// # Safety
/// Pointers must be null or valid; `rhs` a live handle.
#[no_mangle]
pub unsafe extern "C" fn rr_solve(
    rhs: *const RrField,
    params: *const RrParams,
    n_time_nodes: usize,
    grid_half_width: f64,
    grid_points: usize,
    out: *mut *mut RrSolution,
) -> RrStatus {
    guard(|| {
        let g = &in_ref(rhs, "rhs")?.0;
        let p = params_of(in_ref(params, "params")?)?;
        let out = out_ref(out, "out")?;
        let grid = SpectralGrid::new(grid_half_width, grid_points).map_err(status_of)?;
        let rep = solve_resolvent_rotating(g, &p, n_time_nodes, &grid).map_err(status_of)?;
        *out = Box::into_raw(Box::new(RrSolution {
            velocity: rep.velocity,
            residual_interior: rep.residual_interior,
        }));
        Ok(())
    })
}

/// # Safety
/// `sol` must be null or a handle from `rr_solve`, freed once.
#[no_mangle]
pub unsafe extern "C" fn rr_solution_free(sol: *mut RrSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// `v̂(ξ)` into `out[0..3]`.
///
/// # Safety
/// `sol` a live handle; `xi` three doubles; `out` three `RrComplex`.
#[no_mangle]
pub unsafe extern "C" fn rr_solution_velocity(
    sol: *const RrSolution,
    xi: *const f64,
    out: *mut RrComplex,
) -> RrStatus {
    guard(|| {
        let sol = in_ref(sol, "solution")?;
        let xi = *in_ref(xi as *const [f64; 3], "xi")?;
        let out = out_ref(out as *mut [RrComplex; 3], "out")?;
        let v = sol.velocity.eval(xi);
        for (o, c) in out.iter_mut().zip(v) {
            *o = RrComplex { re: c.re, im: c.im };
        }
        Ok(())
    })
}

/// # Safety
/// `sol` a live handle; `out` null or valid.
#[no_mangle]
pub unsafe extern "C" fn rr_solution_residual(sol: *const RrSolution, out: *mut f64) -> RrStatus {
    guard(|| {
        *out_ref(out, "out")? = in_ref(sol, "solution")?.residual_interior;
        Ok(())
    })
}
