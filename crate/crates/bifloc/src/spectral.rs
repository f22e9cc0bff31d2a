//! Jacobian spectra at states and along the nullcline, plus the rigidity
//! question: can a trace (flow) or unit-determinant (map) condition hold at
//! a critical point of g at all?
//!
//! "Conditioned" quantities treat the nullcline point (x, g(x)) as a
//! coexistence equilibrium: the predator balance eliminates one parameter
//! (e for Bazykin, delta_eff for Holling IV, gamma for Crowley-Martin), so
//! the resulting Jacobian is what any instance pinned to that equilibrium
//! would have. Every family's on-nullcline J11 is proportional to g'(x),
//! which is why it vanishes exactly at critical points.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelInstance, PlanarState};
use crate::nullcline::{critical_points, g_derivative_raw, g_value_raw, CritKind};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub trace: f64,
    pub det: f64,
    /// trace^2 - 4 det
    pub discriminant: f64,
    pub eigenvalues: [Complex64; 2],
    /// discriminant within 1e-14 * trace^2 of zero: the eigenvalue pair is
    /// too close to a double root to classify reliably
    pub near_double: bool,
}

impl SpectralSummary {
    pub fn from_matrix(j: [[f64; 2]; 2]) -> SpectralSummary {
        let trace = j[0][0] + j[1][1];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let discriminant = trace * trace - 4.0 * det;
        let eigenvalues = if discriminant >= 0.0 {
            let root = discriminant.sqrt();
            [
                Complex64::new(0.5 * (trace - root), 0.0),
                Complex64::new(0.5 * (trace + root), 0.0),
            ]
        } else {
            let imag = 0.5 * (-discriminant).sqrt();
            [
                Complex64::new(0.5 * trace, -imag),
                Complex64::new(0.5 * trace, imag),
            ]
        };
        let near_double = discriminant.abs() <= 1e-14 * trace * trace;
        SpectralSummary { trace, det, discriminant, eigenvalues, near_double }
    }
}

/// Spectrum of the instance's own Jacobian at a state (for maps this is the
/// map Jacobian, so moduli compare against 1).
pub fn spectral_summary(m: &ModelInstance, state: PlanarState) -> SpectralSummary {
    SpectralSummary::from_matrix(m.jacobian(state))
}

/// Central-difference Jacobian of the flow (or of the map, identity
/// included), an independent check on the analytic forms.
pub fn fd_jacobian(m: &ModelInstance, state: PlanarState) -> [[f64; 2]; 2] {
    let mut j = [[0.0_f64; 2]; 2];
    let steps = [1e-6 * (1.0 + state.x.abs()), 1e-6 * (1.0 + state.y.abs())];
    for (col, h) in steps.into_iter().enumerate() {
        let mut sp = state;
        let mut sm = state;
        if col == 0 {
            sp.x += h;
            sm.x -= h;
        } else {
            sp.y += h;
            sm.y -= h;
        }
        let fp = m.vector_field(sp);
        let fm = m.vector_field(sm);
        j[0][col] = (fp[0] - fm[0]) / (2.0 * h);
        j[1][col] = (fp[1] - fm[1]) / (2.0 * h);
    }
    if m.is_map() {
        j[0][0] += 1.0;
        j[1][1] += 1.0;
    }
    j
}

/// Flow Jacobian at (x, g(x)) under the coexistence condition. For the
/// discrete family this is the Jacobian of the underlying flow step, not of
/// the map. Errors when g(x) is not a positive finite height.
pub fn conditioned_flow_jacobian(m: &ModelInstance, x: f64) -> Result<[[f64; 2]; 2]> {
    let y = g_value_raw(m, x);
    if !(y.is_finite() && y > 0.0 && x > 0.0) {
        return Err(Error::NullclineNonpositive { x, g: y });
    }
    let gp = g_derivative_raw(m, x);
    Ok(match m {
        ModelInstance::Bazykin(p) => {
            // predator balance fixes e a x/(x+b) = d + sigma y
            let j11 = p.a * x * gp / (x + p.b);
            let j12 = -p.a * x / (x + p.b);
            let j21 = p.b * y * (p.d + p.sigma * y) / (x * (x + p.b));
            let j22 = -p.sigma * y;
            [[j11, j12], [j21, j22]]
        }
        ModelInstance::HollingIv(p) => {
            // predator balance fixes delta_eff = beta y / x
            let denom = p.a + x * x;
            let j11 = x * gp / denom;
            let j12 = -x / denom;
            let j21 = p.beta * y * y / (x * x);
            let j22 = -p.beta * y / x;
            [[j11, j12], [j21, j22]]
        }
        ModelInstance::CrowleyMartin(p) | ModelInstance::DiscreteCrowleyMartin(p) => {
            // predator balance fixes gamma a x = d (1+bx)(1+cy); with
            // y = g(x) that gives 1 + c y = a/(a - c h)
            let h = p.h(x);
            let hp = p.h_prime(x);
            let one_bx = 1.0 + p.b * x;
            let j11 = x * hp / one_bx;
            let j12 = -x * (p.a - p.c * h) * (p.a - p.c * h) / (p.a * one_bx);
            let j21 = p.d * y / (x * one_bx);
            let j22 = -p.d * p.c * h / p.a;
            [[j11, j12], [j21, j22]]
        }
    })
}

/// Flow trace J11 + J22 at (x, g(x)) under the coexistence condition.
pub fn trace_on_nullcline(m: &ModelInstance, x: f64) -> Result<f64> {
    let j = conditioned_flow_jacobian(m, x)?;
    Ok(j[0][0] + j[1][1])
}

/// trace J + det J of the conditioned flow Jacobian. For the forward-Euler
/// map this is det(J_map) - 1, so a zero marks unit determinant.
pub fn phi_on_nullcline(m: &ModelInstance, x: f64) -> Result<f64> {
    let j = conditioned_flow_jacobian(m, x)?;
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    Ok(tr + det)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RigidityEntry {
    pub x: f64,
    pub kind: CritKind,
    pub g_value: f64,
    /// conditioned flow trace; equals the (nonzero) J22 term at a critical
    /// point because J11 vanishes there
    pub trace: f64,
    /// sum of |Jij|, the scale for the sign tolerances below
    pub jacobian_scale: f64,
    /// trace strictly negative at tolerance: no parameter choice consistent
    /// with a coexistence point here can produce a zero-trace spectrum
    pub hopf_blocked: bool,
    /// map instances: trace J + det J at the point
    pub phi: Option<f64>,
    /// map instances: phi bounded away from zero, so the point cannot carry
    /// a unit-determinant map spectrum for this instance
    pub ns_blocked: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RigidityReport {
    pub entries: Vec<RigidityEntry>,
}

/// Evaluates the blocking conditions at every critical point of g. Errors
/// when the nullcline has no critical point to interrogate.
pub fn rigidity_report(m: &ModelInstance) -> Result<RigidityReport> {
    let cps = critical_points(m);
    if cps.is_empty() {
        return Err(Error::NoCepAtCriticalPoint);
    }
    let mut entries = Vec::with_capacity(cps.len());
    for cp in cps {
        let j = conditioned_flow_jacobian(m, cp.x)?;
        let trace = j[0][0] + j[1][1];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let jacobian_scale: f64 = j.iter().flatten().map(|v| v.abs()).sum::<f64>()
            .max(f64::MIN_POSITIVE);
        let (phi, ns_blocked) = if m.is_map() {
            let phi = trace + det;
            let phi_scale = (trace.abs() + det.abs()).max(f64::MIN_POSITIVE);
            (Some(phi), Some(phi.abs() > 1e-10 * phi_scale))
        } else {
            (None, None)
        };
        entries.push(RigidityEntry {
            x: cp.x,
            kind: cp.kind,
            g_value: cp.g_value,
            trace,
            jacobian_scale,
            hopf_blocked: trace < -1e-10 * jacobian_scale,
            phi,
            ns_blocked,
        });
    }
    Ok(RigidityReport { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BazykinParams, CrowleyMartinParams, Holling4Params};

    #[test]
    fn summary_of_rotation_like_matrix() {
        let s = SpectralSummary::from_matrix([[0.0, -1.0], [1.0, -1.0]]);
        assert_eq!(s.trace, -1.0);
        assert_eq!(s.det, 1.0);
        assert_eq!(s.discriminant, -3.0);
        assert!(!s.near_double);
        let sum = s.eigenvalues[0] + s.eigenvalues[1];
        let prod = s.eigenvalues[0] * s.eigenvalues[1];
        assert!((sum.re - s.trace).abs() < 1e-12 && sum.im.abs() < 1e-12);
        assert!((prod.re - s.det).abs() < 1e-12 && prod.im.abs() < 1e-12);
    }

    #[test]
    fn double_root_flagged() {
        let s = SpectralSummary::from_matrix([[1.0, 0.0], [0.0, 1.0]]);
        assert!(s.near_double);
        assert_eq!(s.eigenvalues[0], s.eigenvalues[1]);
    }

    #[test]
    fn bazykin_vertex_trace_value() {
        // with r = a = sigma = 1, b = 1, k = 2 the vertex sits at 1/2 and
        // the conditioned trace is -g(1/2) = -9/8, independent of e and d
        for d in [0.1, 1.0, 7.0] {
            let p = BazykinParams::new(1.0, 2.0, 1.0, 1.0, 1.0, d, 1.0).unwrap();
            let m = ModelInstance::Bazykin(p);
            let tr = trace_on_nullcline(&m, 0.5).unwrap();
            assert!((tr + 1.125).abs() < 1e-15, "{tr}");
        }
    }

    #[test]
    fn conditioned_jacobian_matches_instance_at_true_equilibrium() {
        let p = Holling4Params::coupled(1.0, 0.0, 0.057692307692308, 0.142011834319527).unwrap();
        let m = ModelInstance::HollingIv(p);
        let x = 0.25;
        let state = PlanarState::new(x, g_value_raw(&m, x));
        let cond = conditioned_flow_jacobian(&m, x).unwrap();
        let own = m.jacobian(state);
        for i in 0..2 {
            for jx in 0..2 {
                assert!(
                    (cond[i][jx] - own[i][jx]).abs() <= 1e-12 * (1.0 + own[i][jx].abs()),
                    "{i}{jx}: {} vs {}",
                    cond[i][jx],
                    own[i][jx]
                );
            }
        }
        // also a Hopf-tuned instance: trace ~ 0, det at its known value
        let s = SpectralSummary::from_matrix(cond);
        assert!(s.trace.abs() < 1e-15);
        assert!((s.det - 0.025517751479290).abs() < 1e-12);
    }

    #[test]
    fn fd_jacobian_agrees_with_analytic() {
        let p = CrowleyMartinParams::new(1.2, 2.5, 1.1, 0.9, 0.4, 0.8, 0.3).unwrap();
        for m in [
            ModelInstance::CrowleyMartin(p),
            ModelInstance::DiscreteCrowleyMartin(p),
        ] {
            let state = PlanarState::new(0.7, 1.3);
            let analytic = m.jacobian(state);
            let fd = fd_jacobian(&m, state);
            for i in 0..2 {
                for jx in 0..2 {
                    let tol = 1e-6 * (1.0 + analytic[i][jx].abs());
                    assert!(
                        (analytic[i][jx] - fd[i][jx]).abs() <= tol,
                        "{i}{jx}: {} vs {}",
                        analytic[i][jx],
                        fd[i][jx]
                    );
                }
            }
        }
    }

    #[test]
    fn crowley_martin_vertex_phi_root() {
        // at c = 8/27 (with rho = k0 = b = a-ish canonical values) the
        // vertex carries phi = 0 for every d, so ns_blocked must be false
        let p = CrowleyMartinParams::new(1.0, 2.0, 1.0, 1.0, 8.0 / 27.0, 4.5, 1.0).unwrap();
        let m = ModelInstance::DiscreteCrowleyMartin(p);
        let phi = phi_on_nullcline(&m, 0.5).unwrap();
        assert!(phi.abs() < 1e-15, "{phi}");
        let report = rigidity_report(&m).unwrap();
        assert_eq!(report.entries.len(), 1);
        let e = &report.entries[0];
        assert!(e.hopf_blocked);
        assert_eq!(e.ns_blocked, Some(false));
        assert!((e.trace + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rigidity_needs_a_critical_point() {
        // u^2 <= 3a: g is monotone, nothing to interrogate
        let p = Holling4Params::raw(0.1, 0.5, 0.0, 0.2, 1.0).unwrap();
        let m = ModelInstance::HollingIv(p);
        assert!(matches!(
            rigidity_report(&m),
            Err(Error::NoCepAtCriticalPoint)
        ));
    }

    #[test]
    fn pole_region_is_rejected() {
        let p = CrowleyMartinParams::new(1.0, 2.0, 1.05, 1.0, 1.0, 1.0, 1.0).unwrap();
        let m = ModelInstance::CrowleyMartin(p);
        // x = 0.5 lies left of the pole pair where g < 0
        assert!(matches!(
            conditioned_flow_jacobian(&m, 0.5),
            Err(Error::NullclineNonpositive { .. })
        ));
    }
}
