//! C interface to the bifloc engine.
//!
//! Models are opaque heap handles created by the `bifloc_*_new` constructors
//! and released with `bifloc_model_free`. Every other call borrows a handle,
//! writes results through caller-supplied pointers, and returns a
//! `BiflocStatus`. On any non-`Ok` status, `bifloc_last_error_message`
//! returns a thread-local description of the failure.
//!
//! Variable-length queries (`bifloc_critical_points`, `bifloc_equilibria`)
//! use a two-phase buffer protocol: the full count is always written to
//! `total`, and at most `cap` leading entries are copied into `out`. Calling
//! with `cap == 0` is the size query.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use bifloc::equilibrium::find_coexistence_equilibria;
use bifloc::model::{
    BazykinParams, CrowleyMartinParams, Holling4Params, ModelInstance, PlanarState,
};
use bifloc::nullcline::{critical_points, Branch, CritKind, NullclineProfile};
use bifloc::spectral::spectral_summary;
use bifloc::Error;

/// Result of every FFI call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BiflocStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Parameter values or shapes were rejected by the model constructors.
    InvalidParameter = 2,
    /// The query point lies outside the admissible prey interval.
    OutOfDomain = 3,
    /// A numerical routine failed (degenerate crossing, non-finite state, ...).
    Numerics = 4,
    /// A panic was caught at the FFI boundary; the handle is still valid.
    Panic = 5,
}

/// Opaque model handle.
pub struct BiflocModel {
    inner: ModelInstance,
}

/// Which side of a nullcline critical point an abscissa sits on.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BiflocBranch {
    Ascending = 0,
    Descending = 1,
    Critical = 2,
}

/// Interior critical point of the prey nullcline height.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct BiflocCriticalPoint {
    pub x: f64,
    pub g_value: f64,
    pub is_max: bool,
}

/// Trace, determinant, discriminant, and eigenvalue pair of a Jacobian.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct BiflocSpectralSummary {
    pub trace: f64,
    pub det: f64,
    pub discriminant: f64,
    pub eigenvalue_re: [f64; 2],
    pub eigenvalue_im: [f64; 2],
    pub near_double: bool,
}

/// Coexistence equilibrium with its nullcline branch label.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct BiflocEquilibrium {
    pub x: f64,
    pub y: f64,
    pub residual: f64,
    pub branch: BiflocBranch,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    // Interior NULs cannot come from our own messages; replace defensively.
    let owned = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = owned);
}

fn fail(e: &Error) -> BiflocStatus {
    set_last_error(&e.to_string());
    match e {
        Error::OutOfDomain { .. } | Error::NullclineNonpositive { .. } => BiflocStatus::OutOfDomain,
        Error::MissingSymbol(_)
        | Error::UnknownSymbol(_)
        | Error::NonPositiveValue { .. }
        | Error::ConstraintViolation(_)
        | Error::Config(_)
        | Error::Json(_) => BiflocStatus::InvalidParameter,
        _ => BiflocStatus::Numerics,
    }
}

fn null_pointer(what: &str) -> BiflocStatus {
    set_last_error(&format!("{what} is null"));
    BiflocStatus::NullPointer
}

// Catches panics so they never unwind across the C boundary.
fn guarded(f: impl FnOnce() -> BiflocStatus) -> BiflocStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("internal panic caught at the FFI boundary");
            BiflocStatus::Panic
        }
    }
}

fn boxed(m: ModelInstance, out: *mut *mut BiflocModel) -> BiflocStatus {
    // Safety: `out` was checked non-null by the caller.
    unsafe { *out = Box::into_raw(Box::new(BiflocModel { inner: m })) };
    BiflocStatus::Ok
}

fn branch_code(b: Branch) -> BiflocBranch {
    match b {
        Branch::Ascending => BiflocBranch::Ascending,
        Branch::Descending => BiflocBranch::Descending,
        Branch::Critical => BiflocBranch::Critical,
    }
}

/// Creates a Bazykin model handle.
///
/// On success writes the new handle to `out` and returns `Ok`. The handle
/// must be released with `bifloc_model_free`.
#[no_mangle]
pub extern "C" fn bifloc_bazykin_new(
    r: f64,
    k: f64,
    a: f64,
    b: f64,
    e: f64,
    d: f64,
    sigma: f64,
    out: *mut *mut BiflocModel,
) -> BiflocStatus {
    guarded(|| {
        if out.is_null() {
            return null_pointer("out");
        }
        match BazykinParams::new(r, k, a, b, e, d, sigma) {
            Ok(p) => boxed(ModelInstance::Bazykin(p), out),
            Err(e) => fail(&e),
        }
    })
}

/// Creates a Holling type IV model handle from the raw parameters.
#[no_mangle]
pub extern "C" fn bifloc_holling4_new(
    a: f64,
    h1: f64,
    h2: f64,
    delta: f64,
    beta: f64,
    out: *mut *mut BiflocModel,
) -> BiflocStatus {
    guarded(|| {
        if out.is_null() {
            return null_pointer("out");
        }
        match Holling4Params::raw(a, h1, h2, delta, beta) {
            Ok(p) => boxed(ModelInstance::HollingIv(p), out),
            Err(e) => fail(&e),
        }
    })
}

/// Creates a Holling type IV model handle on the coupled slice, where the
/// single load `h10` fixes the response scale and both harvesting rates.
#[no_mangle]
pub extern "C" fn bifloc_holling4_coupled_new(
    h10: f64,
    h2: f64,
    delta: f64,
    beta: f64,
    out: *mut *mut BiflocModel,
) -> BiflocStatus {
    guarded(|| {
        if out.is_null() {
            return null_pointer("out");
        }
        match Holling4Params::coupled(h10, h2, delta, beta) {
            Ok(p) => boxed(ModelInstance::HollingIv(p), out),
            Err(e) => fail(&e),
        }
    })
}

/// Creates a Crowley-Martin flow model handle.
#[no_mangle]
pub extern "C" fn bifloc_crowley_martin_new(
    rho: f64,
    k: f64,
    a: f64,
    b: f64,
    c: f64,
    gamma: f64,
    d: f64,
    out: *mut *mut BiflocModel,
) -> BiflocStatus {
    guarded(|| {
        if out.is_null() {
            return null_pointer("out");
        }
        match CrowleyMartinParams::new(rho, k, a, b, c, gamma, d) {
            Ok(p) => boxed(ModelInstance::CrowleyMartin(p), out),
            Err(e) => fail(&e),
        }
    })
}

/// Creates the forward-Euler discretization of the Crowley-Martin flow.
#[no_mangle]
pub extern "C" fn bifloc_discrete_crowley_martin_new(
    rho: f64,
    k: f64,
    a: f64,
    b: f64,
    c: f64,
    gamma: f64,
    d: f64,
    out: *mut *mut BiflocModel,
) -> BiflocStatus {
    guarded(|| {
        if out.is_null() {
            return null_pointer("out");
        }
        match CrowleyMartinParams::new(rho, k, a, b, c, gamma, d) {
            Ok(p) => boxed(ModelInstance::DiscreteCrowleyMartin(p), out),
            Err(e) => fail(&e),
        }
    })
}

/// Releases a model handle. Passing null is a no-op.
#[no_mangle]
pub extern "C" fn bifloc_model_free(m: *mut BiflocModel) {
    if !m.is_null() {
        // Safety: the pointer came from Box::into_raw in a constructor and
        // ownership returns here exactly once.
        drop(unsafe { Box::from_raw(m) });
    }
}

// Borrows a handle, rejecting null. Lifetime is scoped to the current call.
unsafe fn borrow<'a>(m: *const BiflocModel) -> Option<&'a ModelInstance> {
    m.as_ref().map(|h| &h.inner)
}

/// Writes true if the model advances in discrete time.
#[no_mangle]
pub extern "C" fn bifloc_model_is_map(m: *const BiflocModel, out: *mut bool) -> BiflocStatus {
    guarded(|| {
        let Some(inner) = (unsafe { borrow(m) }) else {
            return null_pointer("model");
        };
        if out.is_null() {
            return null_pointer("out");
        }
        unsafe { *out = inner.is_map() };
        BiflocStatus::Ok
    })
}

/// Evaluates the vector field (or one-step displacement map) at (x, y).
///
/// `out` must point to at least two doubles; they receive (dx, dy).
#[no_mangle]
pub extern "C" fn bifloc_vector_field(
    m: *const BiflocModel,
    x: f64,
    y: f64,
    out: *mut f64,
) -> BiflocStatus {
    guarded(|| {
        let Some(inner) = (unsafe { borrow(m) }) else {
            return null_pointer("model");
        };
        if out.is_null() {
            return null_pointer("out");
        }
        let f = inner.vector_field(PlanarState::new(x, y));
        unsafe {
            *out = f[0];
            *out.add(1) = f[1];
        }
        BiflocStatus::Ok
    })
}

/// Evaluates the Jacobian at (x, y).
///
/// `out` must point to at least four doubles; they receive the matrix in
/// row-major order.
#[no_mangle]
pub extern "C" fn bifloc_jacobian(
    m: *const BiflocModel,
    x: f64,
    y: f64,
    out: *mut f64,
) -> BiflocStatus {
    guarded(|| {
        let Some(inner) = (unsafe { borrow(m) }) else {
            return null_pointer("model");
        };
        if out.is_null() {
            return null_pointer("out");
        }
        let j = inner.jacobian(PlanarState::new(x, y));
        unsafe {
            *out = j[0][0];
            *out.add(1) = j[0][1];
            *out.add(2) = j[1][0];
            *out.add(3) = j[1][1];
        }
        BiflocStatus::Ok
    })
}

/// Writes the open prey interval (lo, hi) on which the nullcline height is
/// defined and positive-capable.
#[no_mangle]
pub extern "C" fn bifloc_domain(
    m: *const BiflocModel,
    out_lo: *mut f64,
    out_hi: *mut f64,
) -> BiflocStatus {
    guarded(|| {
        let Some(inner) = (unsafe { borrow(m) }) else {
            return null_pointer("model");
        };
        if out_lo.is_null() {
            return null_pointer("out_lo");
        }
        if out_hi.is_null() {
            return null_pointer("out_hi");
        }
        let profile = NullclineProfile::new(inner);
        unsafe {
            *out_lo = profile.x_lo();
            *out_hi = profile.x_hi();
        }
        BiflocStatus::Ok
    })
}

/// Evaluates the prey-nullcline predator height g(x).
#[no_mangle]
pub extern "C" fn bifloc_nullcline_value(
    m: *const BiflocModel,
    x: f64,
    out: *mut f64,
) -> BiflocStatus {
    guarded(|| {
        let Some(inner) = (unsafe { borrow(m) }) else {
            return null_pointer("model");
        };
        if out.is_null() {
            return null_pointer("out");
        }
        match NullclineProfile::new(inner).value(x) {
            Ok(g) => {
                unsafe { *out = g };
                BiflocStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Evaluates the prey-nullcline slope g'(x).
#[no_mangle]
pub extern "C" fn bifloc_nullcline_derivative(
    m: *const BiflocModel,
    x: f64,
    out: *mut f64,
) -> BiflocStatus {
    guarded(|| {
        let Some(inner) = (unsafe { borrow(m) }) else {
            return null_pointer("model");
        };
        if out.is_null() {
            return null_pointer("out");
        }
        match NullclineProfile::new(inner).derivative(x) {
            Ok(gp) => {
                unsafe { *out = gp };
                BiflocStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Lists the interior critical points of the nullcline height.
///
/// The full count is written to `total`; at most `cap` leading entries are
/// copied to `out`. `out` may be null only when `cap` is zero.
#[no_mangle]
pub extern "C" fn bifloc_critical_points(
    m: *const BiflocModel,
    out: *mut BiflocCriticalPoint,
    cap: usize,
    total: *mut usize,
) -> BiflocStatus {
    guarded(|| {
        let Some(inner) = (unsafe { borrow(m) }) else {
            return null_pointer("model");
        };
        if total.is_null() {
            return null_pointer("total");
        }
        if out.is_null() && cap > 0 {
            return null_pointer("out");
        }
        let points = critical_points(inner);
        unsafe { *total = points.len() };
        for (i, p) in points.iter().take(cap).enumerate() {
            unsafe {
                *out.add(i) = BiflocCriticalPoint {
                    x: p.x,
                    g_value: p.g_value,
                    is_max: p.kind == CritKind::LocalMax,
                };
            }
        }
        BiflocStatus::Ok
    })
}

/// Lists the coexistence equilibria, one per nullcline branch cell at most.
///
/// Same buffer protocol as `bifloc_critical_points`.
#[no_mangle]
pub extern "C" fn bifloc_equilibria(
    m: *const BiflocModel,
    out: *mut BiflocEquilibrium,
    cap: usize,
    total: *mut usize,
) -> BiflocStatus {
    guarded(|| {
        let Some(inner) = (unsafe { borrow(m) }) else {
            return null_pointer("model");
        };
        if total.is_null() {
            return null_pointer("total");
        }
        if out.is_null() && cap > 0 {
            return null_pointer("out");
        }
        let eqs = find_coexistence_equilibria(inner);
        unsafe { *total = eqs.len() };
        for (i, eq) in eqs.iter().take(cap).enumerate() {
            unsafe {
                *out.add(i) = BiflocEquilibrium {
                    x: eq.state.x,
                    y: eq.state.y,
                    residual: eq.residual,
                    branch: branch_code(eq.branch),
                };
            }
        }
        BiflocStatus::Ok
    })
}

/// Computes trace, determinant, discriminant, and eigenvalues of the
/// Jacobian at (x, y).
#[no_mangle]
pub extern "C" fn bifloc_spectral_summary(
    m: *const BiflocModel,
    x: f64,
    y: f64,
    out: *mut BiflocSpectralSummary,
) -> BiflocStatus {
    guarded(|| {
        let Some(inner) = (unsafe { borrow(m) }) else {
            return null_pointer("model");
        };
        if out.is_null() {
            return null_pointer("out");
        }
        let s = spectral_summary(inner, PlanarState::new(x, y));
        unsafe {
            *out = BiflocSpectralSummary {
                trace: s.trace,
                det: s.det,
                discriminant: s.discriminant,
                eigenvalue_re: [s.eigenvalues[0].re, s.eigenvalues[1].re],
                eigenvalue_im: [s.eigenvalues[0].im, s.eigenvalues[1].im],
                near_double: s.near_double,
            };
        }
        BiflocStatus::Ok
    })
}

/// Returns the message for the most recent failure on this thread.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bifloc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}
