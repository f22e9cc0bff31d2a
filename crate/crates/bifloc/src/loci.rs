//! Bifurcation loci: Hopf constructors per family, the Bogdanov-Takens
//! search and tangency construction for the Holling IV system, and the
//! Neimark-Sacker locus of the discrete Crowley-Martin map.
//!
//! Constructors tune the parameters that the coexistence condition leaves
//! free, so each returned instance carries its bifurcation point exactly
//! (trace or unit-determinant residuals at rounding level), ready for
//! spectral or dynamical verification downstream.

use serde::{Deserialize, Serialize};

use crate::equilibrium::nearest_equilibrium;
use crate::error::{Error, Result};
use crate::model::{
    BazykinParams, CrowleyMartinParams, Holling4Params, ModelInstance, PlanarState,
};
use crate::nullcline::{g_value_raw, Branch, NullclineProfile};
use crate::roots;
use crate::spectral::spectral_summary;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BifurcationKind {
    Hopf,
    BogdanovTakens,
    NeimarkSacker,
}

/// How the Bazykin Hopf constructor chose the mortality d.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BazykinDSelection {
    /// d solves det = e K exactly, where K is the product-form candidate
    /// for the determinant; only admissible when that equation has a
    /// positive solution
    ProductForm,
    /// d = sigma y (1 + sigma (x+b)^2 / (a0 b)), which always yields a
    /// strictly positive determinant 2 sigma a0 b y^2/(x+b)^2
    PositiveFallback,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BazykinHopf {
    pub params: BazykinParams,
    pub state: PlanarState,
    pub d_mode: BazykinDSelection,
    /// determinant of the Jacobian at the equilibrium
    pub det: f64,
    /// e K, the product-form candidate value for the determinant
    pub product_form_det: f64,
    pub trace_residual: f64,
    pub branch: Branch,
}

/// Builds a Bazykin instance with a zero-trace coexistence equilibrium at
/// x = k0/2 by choosing k = k0 + b + x0, the attack rate a0 that cancels
/// the trace, and then d and e from the predator balance.
pub fn bazykin_hopf(k0: f64, b: f64, x0: f64, r: f64, sigma: f64) -> Result<BazykinHopf> {
    for (name, v) in [("k0", k0), ("b", b), ("x0", x0), ("r", r), ("sigma", sigma)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::NonPositiveValue { name: name.into(), value: v });
        }
    }
    let k = k0 + b + x0;
    let x = 0.5 * k0;
    let y = k0 * r * x0 / ((k0 + 2.0 * b) * k * sigma);
    let a0 = (k0 + 2.0 * b).powi(2) * (k0 + 2.0 * b + 2.0 * x0) * sigma / (4.0 * k0 * x0);
    let xb = x + b;

    // det as a function of w = d + sigma y:
    //   det(w) = -sigma^2 y^2 + a0 b y w / (x+b)^2
    // the product-form candidate e K, with e = w (x+b)/(a0 x), matches it at
    //   w* = sigma^2 y^2 / (a0 b y/(x+b)^2 - K (x+b)/(a0 x))
    let k_factor = r * x0 * (k0 + 2.0 * b + 2.0 * x0) * sigma / k;
    let denom = a0 * b * y / (xb * xb) - k_factor * xb / (a0 * x);
    let d_star = if denom > 0.0 {
        let w_star = sigma * sigma * y * y / denom;
        w_star - sigma * y
    } else {
        -1.0
    };
    let (d, d_mode) = if d_star > 0.0 {
        (d_star, BazykinDSelection::ProductForm)
    } else {
        (
            sigma * y * (1.0 + sigma * xb * xb / (a0 * b)),
            BazykinDSelection::PositiveFallback,
        )
    };
    let e = (d + sigma * y) * xb / (a0 * x);

    let params = BazykinParams::new(r, k, a0, b, e, d, sigma)?;
    let instance = ModelInstance::Bazykin(params);
    let state = PlanarState::new(x, y);
    let summary = spectral_summary(&instance, state);
    let profile = NullclineProfile::new(&instance);
    Ok(BazykinHopf {
        params,
        state,
        d_mode,
        det: summary.det,
        product_form_det: e * k_factor,
        trace_residual: summary.trace,
        branch: profile.branch_of(x)?,
    })
}

/// Interference level c making the conditioned flow trace vanish at x for
/// the Crowley-Martin family; positive exactly when x lies left of the
/// nullcline vertex.
pub fn cm_trace_zero_interference(a: f64, b: f64, k: f64, d: f64, x: f64) -> f64 {
    let k0 = b * k - 1.0;
    let one_bx = 1.0 + b * x;
    a * b * x * (k0 - 2.0 * b * x) / (d * one_bx * one_bx * (1.0 + k0 - b * x))
}

/// Base Crowley-Martin parameters with the interference c and conversion
/// gamma left free for Hopf tuning.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CmHopfBase {
    pub rho: f64,
    pub k: f64,
    pub a: f64,
    pub b: f64,
    pub d: f64,
}

impl CmHopfBase {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rho", self.rho),
            ("k", self.k),
            ("a", self.a),
            ("b", self.b),
            ("d", self.d),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::NonPositiveValue { name: name.into(), value: v });
            }
        }
        if self.b * self.k <= 1.0 {
            return Err(Error::ConstraintViolation(format!(
                "b*k > 1 required, got b*k = {}",
                self.b * self.k
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CmHopf {
    pub params: CrowleyMartinParams,
    pub state: PlanarState,
    pub c0: f64,
    pub gamma: f64,
    pub det: f64,
    pub trace_residual: f64,
    pub branch: Branch,
}

/// Tunes c and gamma so the Crowley-Martin flow has a zero-trace
/// coexistence equilibrium at x. None when no admissible interference
/// exists there: right of the vertex c0 turns nonpositive, and where
/// d <= J11(x) the tuned nullcline height or the global positivity
/// constraint a > c rho fails.
pub fn crowley_martin_hopf(base: &CmHopfBase, x: f64) -> Result<Option<CmHopf>> {
    base.validate()?;
    let (rho, k, a, b, d) = (base.rho, base.k, base.a, base.b, base.d);
    if x <= 0.0 || x >= k {
        return Ok(None);
    }
    let c0 = cm_trace_zero_interference(a, b, k, d, x);
    if !(c0.is_finite() && c0 > 0.0) || a <= c0 * rho {
        return Ok(None);
    }
    let h = rho * (1.0 - x / k) * (1.0 + b * x);
    if a <= c0 * h {
        return Ok(None);
    }
    let y = h / (a - c0 * h);
    let gamma = d * (1.0 + b * x) * (1.0 + c0 * y) / (a * x);
    let params = CrowleyMartinParams::new(rho, k, a, b, c0, gamma, d)?;
    let instance = ModelInstance::CrowleyMartin(params);
    let state = PlanarState::new(x, y);
    let summary = spectral_summary(&instance, state);
    if summary.det <= 0.0 {
        // zero trace with nonpositive determinant is a saddle transition,
        // not a spiral crossing
        return Ok(None);
    }
    let profile = NullclineProfile::new(&instance);
    Ok(Some(CmHopf {
        params,
        state,
        c0,
        gamma,
        det: summary.det,
        trace_residual: summary.trace,
        branch: profile.branch_of(x)?,
    }))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Holling4Hopf {
    pub params: Holling4Params,
    pub state: PlanarState,
    pub beta0: f64,
    pub delta_eff0: f64,
    pub det: f64,
    pub trace_residual: f64,
    pub branch: Branch,
}

/// Tunes beta and delta so the Holling IV flow has a zero-trace coexistence
/// equilibrium at x (with the harvesting offsets fixed). None when the
/// tuned values are not a valid spiral equilibrium: beta0 <= 0 off the
/// ascending window, det <= 0, or no positive nullcline height.
pub fn holling4_hopf_branch(a: f64, h1: f64, h2: f64, x: f64) -> Result<Option<Holling4Hopf>> {
    // validate shape parameters through the raw constructor with
    // placeholder predator parameters
    Holling4Params::raw(a, h1, h2, h2 + 1.0, 1.0)?;
    let u = 1.0 - h1;
    if x <= 0.0 || x >= u {
        return Ok(None);
    }
    let ax2 = a + x * x;
    let y = (u - x) * ax2;
    let gp = -3.0 * x * x + 2.0 * u * x - a;
    let beta0 = x * x * gp / (ax2 * ax2 * (u - x));
    let delta_eff0 = x * gp / ax2;
    if !(y > 0.0 && beta0 > 0.0 && delta_eff0 > 0.0) {
        return Ok(None);
    }
    let params = Holling4Params::raw(a, h1, h2, delta_eff0 + h2, beta0)?;
    let instance = ModelInstance::HollingIv(params);
    let state = PlanarState::new(x, y);
    let summary = spectral_summary(&instance, state);
    if summary.det <= 0.0 {
        return Ok(None);
    }
    let profile = NullclineProfile::new(&instance);
    Ok(Some(Holling4Hopf {
        params,
        state,
        beta0,
        delta_eff0,
        det: summary.det,
        trace_residual: summary.trace,
        branch: profile.branch_of(x)?,
    }))
}

/// The open interval of prey values between the two critical points of the
/// Holling IV nullcline, where the Hopf tuning is admissible; None when the
/// cubic is monotone (u^2 <= 3a).
pub fn holling4_hopf_window(a: f64, h1: f64) -> Option<(f64, f64)> {
    let u = 1.0 - h1;
    let disc = u * u - 3.0 * a;
    if disc <= 0.0 {
        return None;
    }
    let root = disc.sqrt();
    Some(((u - root) / 3.0, (u + root) / 3.0))
}

/// One damped-Newton run of the four-equation zero-trace zero-determinant
/// equilibrium system in (x, y, beta, delta_eff).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BtSearchOutcome {
    pub start: [f64; 4],
    pub end: [f64; 4],
    pub residual: f64,
    pub converged: bool,
    /// converged but with some unknown at or below the positivity floor;
    /// such solutions sit on the degenerate boundary of the system, not in
    /// the coexistence region
    pub boundary: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BtSearchReport {
    pub outcomes: Vec<BtSearchOutcome>,
    /// a converged solution strictly inside the positive orthant, if any
    /// run produced one
    pub interior_solution: Option<[f64; 4]>,
}

const BT_POSITIVITY_FLOOR: f64 = 1e-8;

fn holling4_bt_system(a: f64, h1: f64, z: &[f64; 4]) -> [f64; 4] {
    let [x, y, beta, delta_eff] = *z;
    let ax2 = a + x * x;
    let f1 = x * (1.0 - x) - x * y / ax2 - h1 * x;
    let f2 = y * (delta_eff - beta * y / x);
    let j11 = 1.0 - 2.0 * x - h1 - y * (a - x * x) / (ax2 * ax2);
    let j12 = -x / ax2;
    let j21 = beta * y * y / (x * x);
    let j22 = delta_eff - 2.0 * beta * y / x;
    [f1, f2, j11 + j22, j11 * j22 - j12 * j21]
}

fn holling4_bt_scale(a: f64, h1: f64, z: &[f64; 4]) -> f64 {
    let [x, y, beta, delta_eff] = *z;
    let ax2 = a + x * x;
    let j11 = 1.0 - 2.0 * x - h1 - y * (a - x * x) / (ax2 * ax2);
    let j12 = x / ax2;
    let j21 = beta * y * y / (x * x);
    let j22 = (delta_eff - 2.0 * beta * y / x).abs();
    [
        x * (1.0 - x).abs(),
        x * y / ax2,
        h1 * x,
        y * delta_eff,
        beta * y * y / x,
        j11.abs(),
        j22,
        j11.abs() * j22,
        j12 * j21,
    ]
    .into_iter()
    .fold(f64::MIN_POSITIVE, f64::max)
}

/// Searches for an interior zero-trace zero-determinant equilibrium of the
/// Holling IV flow from eight deterministic starts around each grid point.
/// Converged runs that drift to the positivity floor are reported as
/// boundary outcomes rather than solutions.
pub fn holling4_bt_search(a: f64, h1: f64, x_grid: &[f64]) -> Result<BtSearchReport> {
    Holling4Params::raw(a, h1, 0.0, 1.0, 1.0)?;
    let u = 1.0 - h1;
    let mut outcomes = Vec::new();
    let mut interior_solution = None;
    // multiplier tuples exercise both over- and under-shoot starts
    let jitter: [[f64; 4]; 8] = [
        [1.0, 1.0, 1.0, 1.0],
        [0.5, 1.0, 1.0, 1.0],
        [2.0, 1.0, 1.0, 1.0],
        [1.0, 0.5, 2.0, 1.0],
        [1.0, 2.0, 0.5, 1.0],
        [1.0, 1.0, 2.0, 2.0],
        [1.0, 1.0, 0.5, 0.5],
        [0.7, 1.3, 1.5, 0.8],
    ];
    for &x0 in x_grid {
        if !(x0 > 0.0 && x0 < u) {
            continue;
        }
        let y0 = g_value_raw(
            &ModelInstance::HollingIv(Holling4Params::raw(a, h1, 0.0, 1.0, 1.0)?),
            x0,
        )
        .max(1e-3);
        // conditioned predator parameters as the natural starting scale
        let beta0 = (x0 / (a + x0 * x0)).abs().max(1e-3);
        let delta0 = (beta0 * y0 / x0).max(1e-3);
        for mult in jitter {
            let start = [x0 * mult[0], y0 * mult[1], beta0 * mult[2], delta0 * mult[3]];
            let (end, residual) =
                roots::damped_newton(|z| holling4_bt_system(a, h1, z), start, true, 80);
            let scale = holling4_bt_scale(a, h1, &end);
            let converged = residual <= 1e-12 * scale;
            let boundary = end.iter().any(|&v| v <= BT_POSITIVITY_FLOOR);
            if converged && !boundary && interior_solution.is_none() {
                interior_solution = Some(end);
            }
            outcomes.push(BtSearchOutcome { start, end, residual, converged, boundary });
        }
    }
    Ok(BtSearchReport { outcomes, interior_solution })
}

/// Searches for a zero-trace zero-determinant equilibrium at the fixed prey
/// coordinate x0, with the slice parameter h10 among the unknowns
/// (h10, y, beta, delta_eff); the slice couples a = 9/(4(3+h10)^2) and
/// h1 = h10/(3+h10). Start points cover four slice seeds with two
/// perturbation rows each.
pub fn holling4_bt_slice_search(x0: f64) -> Result<BtSearchReport> {
    if !(x0 > 0.0 && x0.is_finite()) {
        return Err(Error::NonPositiveValue { name: "x0".into(), value: x0 });
    }
    let system = |z: &[f64; 4]| {
        let [h10, y, beta, delta_eff] = *z;
        let s = 3.0 + h10;
        let a = 9.0 / (4.0 * s * s);
        let h1 = h10 / s;
        holling4_bt_system(a, h1, &[x0, y, beta, delta_eff])
    };
    let jitter: [[f64; 4]; 2] = [[1.0, 1.0, 1.0, 1.0], [1.0, 1.4, 0.6, 1.2]];
    let mut outcomes = Vec::new();
    let mut interior_solution = None;
    for h10_seed in [0.5, 1.5, 4.0, 8.0] {
        let s = 3.0 + h10_seed;
        let a = 9.0 / (4.0 * s * s);
        let h1 = h10_seed / s;
        let u = 1.0 - h1;
        if !(x0 < u) {
            continue;
        }
        let y0 = ((u - x0) * (a + x0 * x0)).max(1e-3);
        let beta0 = (x0 / (a + x0 * x0)).max(1e-3);
        let delta0 = (beta0 * y0 / x0).max(1e-3);
        for mult in jitter {
            let start = [h10_seed * mult[0], y0 * mult[1], beta0 * mult[2], delta0 * mult[3]];
            let (end, residual) = roots::damped_newton(system, start, true, 80);
            let s_end = 3.0 + end[0];
            let scale = holling4_bt_scale(
                9.0 / (4.0 * s_end * s_end),
                end[0] / s_end,
                &[x0, end[1], end[2], end[3]],
            );
            let converged = residual <= 1e-12 * scale;
            let boundary = end.iter().any(|&v| v <= BT_POSITIVITY_FLOOR);
            if converged && !boundary && interior_solution.is_none() {
                interior_solution = Some(end);
            }
            outcomes.push(BtSearchOutcome { start, end, residual, converged, boundary });
        }
    }
    Ok(BtSearchReport { outcomes, interior_solution })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Holling4Bt {
    pub params: Holling4Params,
    pub state: PlanarState,
    /// the second, transversal intersection of the predator ray with the
    /// nullcline
    pub third_root: f64,
    pub trace: f64,
    pub det: f64,
    pub branch: Branch,
}

/// Constructs a Holling IV instance whose predator nullcline ray is tangent
/// to the prey nullcline at x_star, which forces trace = det = 0 there.
/// Requires 0 < x_star < u/2 (so the curvature parameter a stays positive)
/// and x_star != u/3 (so the tangency does not collide with the transversal
/// root at u - 2 x_star).
pub fn holling4_bt_tangency(x_star: f64, u: f64) -> Result<Holling4Bt> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::ConstraintViolation(format!(
            "u in (0, 1) required, got {u}"
        )));
    }
    if !(x_star > 0.0 && x_star < 0.5 * u) {
        return Err(Error::ConstraintViolation(format!(
            "x_star in (0, u/2) required for positive curvature, got {x_star}"
        )));
    }
    if (3.0 * x_star - u).abs() <= 1e-12 * u {
        return Err(Error::ConstraintViolation(
            "x_star = u/3 merges the tangency with the transversal root".into(),
        ));
    }
    let a = x_star * x_star * (u - 2.0 * x_star) / u;
    let gp = 2.0 * x_star * (u - x_star) * (u - x_star) / u;
    let y = x_star * gp;
    let beta = x_star / (a + x_star * x_star);
    let delta_eff = beta * gp;
    let params = Holling4Params::raw(a, 1.0 - u, 0.0, delta_eff, beta)?;
    let instance = ModelInstance::HollingIv(params);
    let state = PlanarState::new(x_star, y);
    let summary = spectral_summary(&instance, state);
    let profile = NullclineProfile::new(&instance);
    Ok(Holling4Bt {
        params,
        state,
        third_root: u - 2.0 * x_star,
        trace: summary.trace,
        det: summary.det,
        branch: profile.branch_of(x_star)?,
    })
}

/// Which Crowley-Martin parameter the Neimark-Sacker scan adjusts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CmFreeParam {
    Interference,
    GrowthRate,
    Mortality,
}

impl CmFreeParam {
    pub fn name(self) -> &'static str {
        match self {
            CmFreeParam::Interference => "c",
            CmFreeParam::GrowthRate => "rho",
            CmFreeParam::Mortality => "d",
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct NsPoint {
    pub x: f64,
    pub free_value: f64,
    pub state: PlanarState,
    pub gamma: f64,
    pub map_trace: f64,
    pub map_det: f64,
    pub phi_residual: f64,
    pub branch: Branch,
    pub on_descending: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NsLocus {
    pub points: Vec<NsPoint>,
    pub scanned_x: usize,
}

/// Parameter tuple (rho, a, c, d, b) with the free slot replaced by v.
fn cm_with_free(base: &CrowleyMartinParams, free: CmFreeParam, v: f64) -> (f64, f64, f64, f64, f64) {
    match free {
        CmFreeParam::Interference => (base.rho, base.a, v, base.d, base.b),
        CmFreeParam::GrowthRate => (v, base.a, base.c, base.d, base.b),
        CmFreeParam::Mortality => (base.rho, base.a, base.c, v, base.b),
    }
}

/// Conditioned flow trace + det at (x, g(x)) for the parameter tuple; the
/// zero set of this function is the unit-determinant locus of the map.
fn cm_phi(base: &CrowleyMartinParams, free: CmFreeParam, x: f64, v: f64) -> f64 {
    let (rho, a, c, d, b) = cm_with_free(base, free, v);
    let k = base.k;
    let h = rho * (1.0 - x / k) * (1.0 + b * x);
    let denom = a - c * h;
    if denom <= 0.0 {
        return f64::NAN;
    }
    let y = h / denom;
    let hp = rho * (b - 1.0 / k - 2.0 * b * x / k);
    let one_bx = 1.0 + b * x;
    let j11 = x * hp / one_bx;
    let j12 = -x * denom * denom / (a * one_bx);
    let j21 = d * y / (x * one_bx);
    let j22 = -d * c * h / a;
    let tr = j11 + j22;
    let det = j11 * j22 - j12 * j21;
    tr + det
}

/// Upper end of the free-parameter range keeping both the global model
/// constraints and a positive nullcline height at x satisfiable.
fn cm_free_cap(base: &CrowleyMartinParams, free: CmFreeParam, x: f64) -> f64 {
    let shape = (1.0 - x / base.k) * (1.0 + base.b * x);
    match free {
        CmFreeParam::Interference => {
            let h = base.rho * shape;
            (base.a / base.rho).min(base.a / h)
        }
        CmFreeParam::GrowthRate => base.a / (base.c * shape.max(1.0)),
        CmFreeParam::Mortality => f64::INFINITY,
    }
}

/// All unit-determinant points of the map at prey value x reachable by the
/// free parameter, with gamma conditioned to pin the fixed point there.
/// Real eigenvalue crossings (|map trace| >= 2) are excluded.
pub fn ns_points_at(
    base: &CrowleyMartinParams,
    free: CmFreeParam,
    x: f64,
) -> Result<Vec<NsPoint>> {
    if !(x > 0.0 && x < base.k) {
        return Err(Error::OutOfDomain { x, lo: 0.0, hi: base.k });
    }
    let cap = cm_free_cap(base, free, x);
    let f = |v: f64| cm_phi(base, free, x, v);
    let (lo, hi) = if cap.is_finite() {
        let hi = cap * (1.0 - 1e-9);
        (hi * 1e-12, hi)
    } else {
        // unbounded parameter: expand the top until the sign differs from
        // the bottom or growth is clearly futile
        let lo = 1e-12;
        let f_lo = f(lo);
        let mut hi = 1.0;
        for _ in 0..40 {
            let f_hi = f(hi);
            if f_lo * f_hi < 0.0 || !f_hi.is_finite() {
                break;
            }
            hi *= 2.0;
        }
        (lo, hi)
    };

    let mut candidates = Vec::new();
    for bracket in roots::scan_sign_changes(f, lo, hi, 128) {
        candidates.push(roots::refine_root(f, bracket, 1e-12 * (1.0 + hi)));
    }
    candidates.sort_by(|p, q| p.total_cmp(q));
    candidates.dedup_by(|p, q| (*p - *q).abs() <= 1e-9 * (1.0 + q.abs()));

    let mut points = Vec::new();
    for v in candidates {
        let (rho, a, c, d, b) = cm_with_free(base, free, v);
        let h = rho * (1.0 - x / base.k) * (1.0 + b * x);
        let denom = a - c * h;
        if denom <= 0.0 {
            continue;
        }
        let y = h / denom;
        if y <= 0.0 {
            continue;
        }
        let gamma = d * (1.0 + b * x) * (1.0 + c * y) / (a * x);
        let Ok(params) = CrowleyMartinParams::new(rho, base.k, a, b, c, gamma, d) else {
            continue;
        };
        let instance = ModelInstance::DiscreteCrowleyMartin(params);
        let state = PlanarState::new(x, y);
        let summary = spectral_summary(&instance, state);
        if summary.trace.abs() >= 2.0 {
            continue;
        }
        let profile = NullclineProfile::new(&instance);
        let branch = profile.branch_of(x)?;
        points.push(NsPoint {
            x,
            free_value: v,
            state,
            gamma,
            map_trace: summary.trace,
            map_det: summary.det,
            phi_residual: cm_phi(base, free, x, v).abs(),
            branch,
            on_descending: branch == Branch::Descending,
        });
    }
    Ok(points)
}

/// Scans prey-panel midpoints across (x_lo, x_hi), default the base
/// instance's admissible interval, collecting every reachable
/// unit-determinant point of the map.
pub fn ns_locus(
    base: &CrowleyMartinParams,
    free: CmFreeParam,
    x_lo: Option<f64>,
    x_hi: Option<f64>,
) -> Result<NsLocus> {
    let profile = NullclineProfile::new(&ModelInstance::DiscreteCrowleyMartin(*base));
    let lo = x_lo.unwrap_or(profile.x_lo()).max(profile.x_lo());
    let hi = x_hi.unwrap_or(profile.x_hi()).min(profile.x_hi());
    if !(hi > lo) {
        return Err(Error::ConstraintViolation(format!(
            "empty prey range: [{lo}, {hi}]"
        )));
    }
    let n = 256;
    let mut points = Vec::new();
    for i in 0..n {
        let x = lo + (hi - lo) * (i as f64 + 0.5) / n as f64;
        points.extend(ns_points_at(base, free, x)?);
    }
    Ok(NsLocus { points, scanned_x: n })
}

/// Central-difference derivative of the leading eigenvalue measure (largest
/// real part for flows, largest modulus for maps) with respect to a model
/// parameter, re-solving the equilibrium nearest x_eq on each side. Errors
/// with a degenerate-crossing diagnosis when the derivative is below 1e-8.
pub fn hopf_transversality(m: &ModelInstance, x_eq: f64, param: &str) -> Result<f64> {
    let v0 = m
        .param(param)
        .ok_or_else(|| Error::UnknownSymbol(param.to_string()))?;
    let h = 1e-5 * (1.0 + v0.abs());
    let mut measures = [0.0_f64; 2];
    for (slot, v) in [v0 - h, v0 + h].into_iter().enumerate() {
        let shifted = m.with_param_unchecked(param, v)?;
        let eq = nearest_equilibrium(&shifted, x_eq).ok_or_else(|| {
            Error::ConstraintViolation(format!(
                "equilibrium near x = {x_eq} lost when {param} moves to {v}"
            ))
        })?;
        let s = spectral_summary(&shifted, eq.state);
        measures[slot] = if m.is_map() {
            s.eigenvalues.iter().map(|l| l.norm()).fold(f64::MIN, f64::max)
        } else {
            s.eigenvalues.iter().map(|l| l.re).fold(f64::MIN, f64::max)
        };
    }
    let derivative = (measures[1] - measures[0]) / (2.0 * h);
    if !derivative.is_finite() || derivative.abs() < 1e-8 {
        return Err(Error::DegenerateCrossing(derivative));
    }
    Ok(derivative)
}
