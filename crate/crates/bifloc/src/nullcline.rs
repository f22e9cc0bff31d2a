//! Prey-nullcline geometry: the curve y = g(x), its derivative, its critical
//! points, and the ascending/descending branch partition.
//!
//! Per family:
//! - Bazykin: g = r (k - x)(b + x)/(a k), a downward parabola on (0, k) with
//!   one maximum at x_v = (k - b)/2.
//! - Holling IV: g = (u - x)(a + x^2) with u = 1 - h1, a cubic positive on
//!   (0, u); when u^2 > 3a it has a local minimum then a local maximum at
//!   the roots of g' = -3x^2 + 2ux - a. On the coupled slice these are
//!   1/(2(3+h10)) and 3/(2(3+h10)).
//! - Crowley-Martin (flow and map share the curve): g = h/(a - c h) with
//!   h = rho (1 - x/k)(1 + bx). Since g' = a h'/(a - c h)^2, critical points
//!   of g coincide with those of h, so the maximum x_v = (bk - 1)/(2b) does
//!   not depend on c. When c h exceeds a somewhere, the admissible interval
//!   is clipped to the pole-free component touching x = k.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelInstance, PlanarState};
use crate::roots;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CritKind {
    LocalMin,
    LocalMax,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub x: f64,
    pub kind: CritKind,
    pub g_value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Ascending,
    Descending,
    Critical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeClass {
    Quadratic,
    Cubic,
    Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    Ascending,
    Descending,
}

/// One cell of the branch partition: g is monotone on (lo, hi).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BranchCell {
    pub lo: f64,
    pub hi: f64,
    pub monotonicity: Monotonicity,
}

/// Formula-level nullcline height, without domain checks. For
/// Crowley-Martin this evaluates the rational expression, which is negative
/// or blows up where c h(x) >= a.
pub fn g_value_raw(m: &ModelInstance, x: f64) -> f64 {
    match m {
        ModelInstance::Bazykin(p) => p.r * (p.k - x) * (p.b + x) / (p.a * p.k),
        ModelInstance::HollingIv(p) => (p.u() - x) * (p.a + x * x),
        ModelInstance::CrowleyMartin(p) | ModelInstance::DiscreteCrowleyMartin(p) => {
            let h = p.h(x);
            h / (p.a - p.c * h)
        }
    }
}

/// Formula-level derivative g'(x), with the same caveat as `g_value_raw`.
pub fn g_derivative_raw(m: &ModelInstance, x: f64) -> f64 {
    match m {
        ModelInstance::Bazykin(p) => p.r * (p.k - p.b - 2.0 * x) / (p.a * p.k),
        ModelInstance::HollingIv(p) => -3.0 * x * x + 2.0 * p.u() * x - p.a,
        ModelInstance::CrowleyMartin(p) | ModelInstance::DiscreteCrowleyMartin(p) => {
            let denom = p.a - p.c * p.h(x);
            p.a * p.h_prime(x) / (denom * denom)
        }
    }
}

/// Closed-form critical points, polished and cross-checked against a
/// numerical root of g'.
pub fn critical_points(m: &ModelInstance) -> Vec<CriticalPoint> {
    let xs: Vec<(f64, CritKind)> = match m {
        ModelInstance::Bazykin(p) => vec![(p.x_vertex(), CritKind::LocalMax)],
        ModelInstance::HollingIv(p) => {
            let u = p.u();
            let disc = u * u - 3.0 * p.a;
            if disc <= 0.0 {
                Vec::new()
            } else {
                // prefer the exact slice forms when the instance is coupled
                let (x_min, x_max) = if let Some(h10) = p.h10 {
                    let s = 3.0 + h10;
                    (1.0 / (2.0 * s), 3.0 / (2.0 * s))
                } else {
                    let root = disc.sqrt();
                    ((u - root) / 3.0, (u + root) / 3.0)
                };
                vec![(x_min, CritKind::LocalMin), (x_max, CritKind::LocalMax)]
            }
        }
        ModelInstance::CrowleyMartin(p) | ModelInstance::DiscreteCrowleyMartin(p) => {
            vec![(p.x_vertex(), CritKind::LocalMax)]
        }
    };
    let (x_lo, x_hi) = admissible_interval(m);
    xs.into_iter()
        .filter(|(x, _)| *x > x_lo && *x < x_hi)
        .map(|(x, kind)| {
            polish_check(m, x);
            CriticalPoint { x, kind, g_value: g_value_raw(m, x) }
        })
        .collect()
}

/// Consistency check: a bisection+Newton root of g' inside the closed-form
/// bracket must reproduce the closed form. Catches derivative typos early.
fn polish_check(m: &ModelInstance, x_cf: f64) {
    let f = |x: f64| g_derivative_raw(m, x);
    let bracket = roots::Bracket { lo: x_cf - 1e-6, hi: x_cf + 1e-6 };
    if f(bracket.lo) * f(bracket.hi) > 0.0 {
        // nearly-degenerate pair of critical points; no sign change to use
        return;
    }
    let polished = roots::refine_root(f, bracket, 1e-12);
    debug_assert!(
        (polished - x_cf).abs() <= 1e-9 * (1.0 + x_cf.abs()),
        "closed-form critical point {x_cf} disagrees with polished root {polished}"
    );
}

/// The interval on which g is defined and positive (open at a pole or sign
/// change, closed where g reaches 0 at the right endpoint).
fn admissible_interval(m: &ModelInstance) -> (f64, f64) {
    match m {
        ModelInstance::Bazykin(p) => (0.0, p.k),
        ModelInstance::HollingIv(p) => (0.0, p.u()),
        ModelInstance::CrowleyMartin(p) | ModelInstance::DiscreteCrowleyMartin(p) => {
            if p.c == 0.0 {
                return (0.0, p.k);
            }
            // poles where h(x) = a/c; h is a downward parabola with maximum
            // at x_v, so the pole-free component touching k starts at the
            // larger root when the maximum pokes above a/c
            let h_max = p.h(p.x_vertex());
            if p.c * h_max <= p.a {
                (0.0, p.k)
            } else {
                // rho(1 - x/k)(1 + bx) = a/c, rewritten as
                // (rho b/k) x^2 - rho(b - 1/k) x + (a/c - rho) = 0
                let qa = p.rho * p.b / p.k;
                let qb = -p.rho * (p.b - 1.0 / p.k);
                let qc = p.a / p.c - p.rho;
                let disc = (qb * qb - 4.0 * qa * qc).max(0.0);
                let x_pole = (-qb + disc.sqrt()) / (2.0 * qa);
                (x_pole, p.k)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct NullclineProfile {
    instance: ModelInstance,
    x_lo: f64,
    x_hi: f64,
    critical_points: Vec<CriticalPoint>,
    degree: DegreeClass,
    cells: Vec<BranchCell>,
    /// max |g'| sampled over the interval; the relative scale for the
    /// "critical" classification band.
    gp_scale: f64,
}

impl NullclineProfile {
    pub fn new(m: &ModelInstance) -> NullclineProfile {
        let (x_lo, x_hi) = admissible_interval(m);
        let critical_points = critical_points(m);
        let degree = match m {
            ModelInstance::Bazykin(_) => DegreeClass::Quadratic,
            ModelInstance::HollingIv(_) => DegreeClass::Cubic,
            _ => DegreeClass::Rational,
        };

        let mut edges = vec![x_lo];
        edges.extend(critical_points.iter().map(|cp| cp.x));
        edges.push(x_hi);
        let cells = edges
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                let monotonicity = if g_derivative_raw(m, mid) >= 0.0 {
                    Monotonicity::Ascending
                } else {
                    Monotonicity::Descending
                };
                BranchCell { lo: w[0], hi: w[1], monotonicity }
            })
            .collect();

        let mut gp_scale = 0.0_f64;
        let n = 256;
        for i in 0..n {
            // sample cell midpoints of a uniform grid, staying interior
            let x = x_lo + (x_hi - x_lo) * (i as f64 + 0.5) / n as f64;
            let gp = g_derivative_raw(m, x);
            if gp.is_finite() {
                gp_scale = gp_scale.max(gp.abs());
            }
        }

        NullclineProfile {
            instance: *m,
            x_lo,
            x_hi,
            critical_points,
            degree,
            cells,
            gp_scale: gp_scale.max(f64::MIN_POSITIVE),
        }
    }

    pub fn instance(&self) -> &ModelInstance {
        &self.instance
    }

    pub fn x_lo(&self) -> f64 {
        self.x_lo
    }

    pub fn x_hi(&self) -> f64 {
        self.x_hi
    }

    pub fn critical_points(&self) -> &[CriticalPoint] {
        &self.critical_points
    }

    pub fn degree(&self) -> DegreeClass {
        self.degree
    }

    pub fn cells(&self) -> &[BranchCell] {
        &self.cells
    }

    pub fn derivative_scale(&self) -> f64 {
        self.gp_scale
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if x >= self.x_lo && x <= self.x_hi {
            Ok(())
        } else {
            Err(Error::OutOfDomain { x, lo: self.x_lo, hi: self.x_hi })
        }
    }

    /// g(x); errors outside the admissible interval (for Crowley-Martin that
    /// includes the pole region where c h(x) >= a).
    pub fn value(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        Ok(g_value_raw(&self.instance, x))
    }

    /// g'(x) on the admissible interval.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        Ok(g_derivative_raw(&self.instance, x))
    }

    /// Sign classification of g'(x) with a scale-relative band around zero.
    pub fn branch_of(&self, x: f64) -> Result<Branch> {
        let gp = self.derivative(x)?;
        Ok(if gp.abs() <= 1e-10 * self.gp_scale {
            Branch::Critical
        } else if gp > 0.0 {
            Branch::Ascending
        } else {
            Branch::Descending
        })
    }

    /// Index of the branch-partition cell containing x (ties at a shared
    /// edge resolve to the left cell).
    pub fn cell_index_of(&self, x: f64) -> Result<usize> {
        self.check_domain(x)?;
        for (i, cell) in self.cells.iter().enumerate() {
            if x <= cell.hi || i == self.cells.len() - 1 {
                return Ok(i);
            }
        }
        unreachable!("cells tile the admissible interval");
    }

    /// Prey height on the nullcline as a state, for callers conditioning a
    /// coexistence point at x.
    pub fn state_on_nullcline(&self, x: f64) -> Result<PlanarState> {
        Ok(PlanarState::new(x, self.value(x)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BazykinParams, CrowleyMartinParams, Holling4Params};

    fn bazykin(k: f64, b: f64) -> ModelInstance {
        ModelInstance::Bazykin(BazykinParams::new(1.0, k, 1.0, b, 1.0, 0.1, 1.0).unwrap())
    }

    #[test]
    fn bazykin_vertex_and_value() {
        let m = bazykin(3.0, 1.0);
        let cps = critical_points(&m);
        assert_eq!(cps.len(), 1);
        assert_eq!(cps[0].kind, CritKind::LocalMax);
        assert!((cps[0].x - 1.0).abs() < 1e-15);
        // g(3) = 0: the (k - x) factor vanishes
        assert_eq!(g_value_raw(&m, 3.0), 0.0);
    }

    #[test]
    fn holling4_window_endpoints() {
        let m = ModelInstance::HollingIv(Holling4Params::coupled(1.0, 0.0, 1.0, 2.0).unwrap());
        let cps = critical_points(&m);
        assert_eq!(cps.len(), 2);
        assert_eq!(cps[0].kind, CritKind::LocalMin);
        assert!((cps[0].x - 0.125).abs() < 1e-15);
        assert_eq!(cps[1].kind, CritKind::LocalMax);
        assert!((cps[1].x - 0.375).abs() < 1e-15);
        assert!((g_value_raw(&m, 0.375) - 27.0 / 256.0).abs() < 1e-15);
    }

    #[test]
    fn crowley_martin_vertex_ignores_interference() {
        let mut xs = Vec::new();
        for c in [0.0, 0.1, 1.0, 10.0] {
            let p = CrowleyMartinParams::new(1.0, 3.0, 40.0, 2.0, c, 1.0, 1.0).unwrap();
            let m = ModelInstance::CrowleyMartin(p);
            let cps = critical_points(&m);
            assert_eq!(cps.len(), 1);
            xs.push(cps[0].x);
        }
        for x in &xs {
            assert!((x - 1.25).abs() < 1e-12, "{x}");
        }
    }

    #[test]
    fn crowley_martin_holling2_limit_value() {
        // c = 0 collapses g to h/a, so g(0) = rho/a
        let p = CrowleyMartinParams::new(1.0, 2.0, 1.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        let m = ModelInstance::CrowleyMartin(p);
        assert!((g_value_raw(&m, 0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn crowley_martin_pole_clips_domain() {
        // h_max = 9/8 here, and a/c = 1.05 sits between rho = 1 and h_max,
        // so the curve has a pole pair and the vertex is cut off
        let p = CrowleyMartinParams::new(1.0, 2.0, 1.05, 1.0, 1.0, 1.0, 1.0).unwrap();
        let m = ModelInstance::CrowleyMartin(p);
        let profile = NullclineProfile::new(&m);
        assert!(profile.x_lo() > 0.5, "pole edge {}", profile.x_lo());
        assert!(profile.critical_points().is_empty());
        assert!(profile.value(0.5).is_err());
        let x_mid = 0.5 * (profile.x_lo() + profile.x_hi());
        assert!(profile.value(x_mid).unwrap() > 0.0);
        assert_eq!(profile.branch_of(x_mid).unwrap(), Branch::Descending);
    }

    #[test]
    fn branch_classification_around_vertex() {
        let m = bazykin(3.0, 1.0);
        let profile = NullclineProfile::new(&m);
        assert_eq!(profile.branch_of(0.5).unwrap(), Branch::Ascending);
        assert_eq!(profile.branch_of(1.0).unwrap(), Branch::Critical);
        assert_eq!(profile.branch_of(2.0).unwrap(), Branch::Descending);
        assert!(profile.branch_of(3.5).is_err());
    }

    #[test]
    fn branch_cells_alternate() {
        let m = ModelInstance::HollingIv(Holling4Params::coupled(2.0, 0.0, 1.0, 2.0).unwrap());
        let profile = NullclineProfile::new(&m);
        let cells = profile.cells();
        assert_eq!(cells.len(), 3);
        for pair in cells.windows(2) {
            assert_ne!(pair[0].monotonicity, pair[1].monotonicity);
        }
        assert_eq!(profile.cell_index_of(profile.x_lo()).unwrap(), 0);
        assert_eq!(
            profile.cell_index_of(0.5 * (cells[1].lo + cells[1].hi)).unwrap(),
            1
        );
    }
}
