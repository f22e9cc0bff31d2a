//! Trajectory integration and orbit classification.
//!
//! Flows are integrated with fixed-step RK4; the discrete family is
//! iterated directly. Classification works on the trailing half of a
//! trajectory: a decaying log-radius marks convergence to the reference
//! point, while a stable sequence of returns through the section
//! x = reference.x marks a limit cycle (or invariant circle for maps).

use serde::{Deserialize, Serialize};

use crate::model::{ModelInstance, PlanarState};
use crate::spectral::spectral_summary;

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub states: Vec<PlanarState>,
    /// time between consecutive states; 1 for map iterates
    pub dt: f64,
    /// true when produced by map iteration rather than flow integration
    pub discrete: bool,
    /// the orbit left the open positive quadrant (or blew up) and was
    /// stopped early
    pub clipped: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OscillationVerdict {
    ConvergesToEquilibrium,
    /// sustained returns through the section at a stable radius (flows)
    LimitCycle {
        mean_return_radius: f64,
        returns: usize,
    },
    /// the discrete counterpart of a limit cycle
    InvariantCircle {
        mean_return_radius: f64,
        returns: usize,
    },
    Divergent,
    Indeterminate,
}

impl OscillationVerdict {
    pub fn is_oscillatory(self) -> bool {
        matches!(
            self,
            OscillationVerdict::LimitCycle { .. } | OscillationVerdict::InvariantCircle { .. }
        )
    }
}

/// Step size 1e-3 / max |eigenvalue| at the state, clamped to
/// [1e-4, 1e-2]; 1 for maps, whose step is part of the model.
pub fn default_dt(m: &ModelInstance, state: PlanarState) -> f64 {
    if m.is_map() {
        return 1.0;
    }
    let s = spectral_summary(m, state);
    let rate = s.eigenvalues.iter().map(|l| l.norm()).fold(0.0_f64, f64::max);
    if rate > 0.0 {
        (1e-3 / rate).clamp(1e-4, 1e-2)
    } else {
        1e-2
    }
}

fn admissible(s: PlanarState) -> bool {
    s.x.is_finite() && s.y.is_finite() && s.x > 0.0 && s.y > 0.0
}

fn rk4_step(m: &ModelInstance, s: PlanarState, dt: f64) -> PlanarState {
    let eval = |p: PlanarState| m.vector_field(p);
    let k1 = eval(s);
    let k2 = eval(PlanarState::new(s.x + 0.5 * dt * k1[0], s.y + 0.5 * dt * k1[1]));
    let k3 = eval(PlanarState::new(s.x + 0.5 * dt * k2[0], s.y + 0.5 * dt * k2[1]));
    let k4 = eval(PlanarState::new(s.x + dt * k3[0], s.y + dt * k3[1]));
    PlanarState::new(
        s.x + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        s.y + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    )
}

/// Fixed-step RK4 from `start` for `n_steps` steps, stopping early if the
/// orbit leaves the open positive quadrant.
pub fn integrate_flow(
    m: &ModelInstance,
    start: PlanarState,
    dt: f64,
    n_steps: usize,
) -> Trajectory {
    assert!(!m.is_map(), "integrate_flow expects a continuous-time family");
    let mut states = Vec::with_capacity(n_steps + 1);
    states.push(start);
    let mut s = start;
    let mut clipped = !admissible(start);
    if !clipped {
        for _ in 0..n_steps {
            s = rk4_step(m, s, dt);
            if !admissible(s) {
                clipped = true;
                break;
            }
            states.push(s);
        }
    }
    Trajectory { states, dt, discrete: false, clipped }
}

/// Iterates the map for `n_steps` steps with the same clipping rule.
pub fn iterate_map(m: &ModelInstance, start: PlanarState, n_steps: usize) -> Trajectory {
    assert!(m.is_map(), "iterate_map expects the discrete family");
    let mut states = Vec::with_capacity(n_steps + 1);
    states.push(start);
    let mut s = start;
    let mut clipped = !admissible(start);
    if !clipped {
        for _ in 0..n_steps {
            let f = m.vector_field(s);
            s = PlanarState::new(s.x + f[0], s.y + f[1]);
            if !admissible(s) {
                clipped = true;
                break;
            }
            states.push(s);
        }
    }
    Trajectory { states, dt: 1.0, discrete: true, clipped }
}

/// Classifies the long-run behavior of a trajectory relative to a reference
/// point (normally the nearby equilibrium). The leading half is discarded
/// as transient.
pub fn classify_orbit(traj: &Trajectory, reference: PlanarState) -> OscillationVerdict {
    if traj.clipped {
        return OscillationVerdict::Divergent;
    }
    let tail = &traj.states[traj.states.len() / 2..];
    if tail.len() < 8 {
        return OscillationVerdict::Indeterminate;
    }

    let radii: Vec<f64> = tail
        .iter()
        .map(|s| ((s.x - reference.x).powi(2) + (s.y - reference.y).powi(2)).sqrt())
        .collect();
    // strongly contracting orbits saturate at the rounding floor instead of
    // reaching radius zero, which would flatten the log-radius slope below;
    // a trailing stretch pinned to the reference is convergence
    let settle = &radii[radii.len() - radii.len() / 8 - 1..];
    let settle_max = settle.iter().fold(0.0_f64, |acc, &r| acc.max(r));
    if settle_max <= 1e-9 * (1.0 + reference.x.abs() + reference.y.abs()) {
        return OscillationVerdict::ConvergesToEquilibrium;
    }

    // least-squares slope of ln r against time; decisively negative means
    // the orbit spirals into the reference point
    let n = radii.len() as f64;
    let mean_t = 0.5 * (radii.len() as f64 - 1.0) * traj.dt;
    let mean_lr = radii.iter().map(|r| r.ln()).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (i, r) in radii.iter().enumerate() {
        let dt_i = i as f64 * traj.dt - mean_t;
        cov += dt_i * (r.ln() - mean_lr);
        var += dt_i * dt_i;
    }
    let slope = cov / var;
    if slope < -1e-4 {
        return OscillationVerdict::ConvergesToEquilibrium;
    }

    // returns through the section x = reference.x, crossing with x
    // increasing; one per revolution around the reference point
    let mut returns = Vec::new();
    for w in tail.windows(2) {
        if w[0].x < reference.x && w[1].x >= reference.x {
            let t = (reference.x - w[0].x) / (w[1].x - w[0].x);
            let y_cross = w[0].y + t * (w[1].y - w[0].y);
            returns.push((y_cross - reference.y).abs());
        }
    }
    if returns.len() >= 5 {
        let stable = returns
            .windows(2)
            .all(|p| p[1] > 0.5 * p[0] && p[1] < 1.5 * p[0]);
        let mean = returns.iter().sum::<f64>() / returns.len() as f64;
        if stable && mean > 1e-6 {
            return if traj.discrete {
                OscillationVerdict::InvariantCircle {
                    mean_return_radius: mean,
                    returns: returns.len(),
                }
            } else {
                OscillationVerdict::LimitCycle {
                    mean_return_radius: mean,
                    returns: returns.len(),
                }
            };
        }
    }
    OscillationVerdict::Indeterminate
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CrowleyMartinParams;

    fn cm_flow() -> ModelInstance {
        ModelInstance::CrowleyMartin(
            CrowleyMartinParams::new(1.0, 2.0, 1.0, 1.0, 0.2, 1.0, 0.5).unwrap(),
        )
    }

    #[test]
    fn rk4_error_scales_at_fourth_order() {
        let m = cm_flow();
        let start = PlanarState::new(0.3, 1.0);
        let horizon = 0.5;
        let run = |dt: f64| {
            let n = (horizon / dt).round() as usize;
            *integrate_flow(&m, start, dt, n).states.last().unwrap()
        };
        // steps coarse enough that truncation error dominates rounding
        let truth = run(horizon / 2048.0);
        let coarse = run(horizon / 8.0);
        let fine = run(horizon / 16.0);
        let err = |s: PlanarState| {
            ((s.x - truth.x).powi(2) + (s.y - truth.y).powi(2)).sqrt()
        };
        let ratio = err(coarse) / err(fine);
        assert!(
            (12.0..=20.0).contains(&ratio),
            "halving dt changed the error by {ratio}, expected ~16"
        );
    }

    #[test]
    fn synthetic_circle_classifies_as_cycle() {
        let reference = PlanarState::new(1.0, 1.0);
        let states: Vec<PlanarState> = (0..4000)
            .map(|i| {
                let th = i as f64 * 0.02;
                PlanarState::new(1.0 + 0.3 * th.cos(), 1.0 + 0.3 * th.sin())
            })
            .collect();
        let traj = Trajectory { states, dt: 0.02, discrete: false, clipped: false };
        match classify_orbit(&traj, reference) {
            OscillationVerdict::LimitCycle { mean_return_radius, returns } => {
                assert!((mean_return_radius - 0.3).abs() < 0.01);
                assert!(returns >= 5);
            }
            other => panic!("expected a cycle, got {other:?}"),
        }
    }

    #[test]
    fn synthetic_contraction_classifies_as_convergent() {
        let reference = PlanarState::new(1.0, 1.0);
        let states: Vec<PlanarState> = (0..4000)
            .map(|i| {
                let th = i as f64 * 0.02;
                let r = 0.3 * (-0.001 * i as f64).exp();
                PlanarState::new(1.0 + r * th.cos(), 1.0 + r * th.sin())
            })
            .collect();
        let traj = Trajectory { states, dt: 0.02, discrete: false, clipped: false };
        assert_eq!(
            classify_orbit(&traj, reference),
            OscillationVerdict::ConvergesToEquilibrium
        );
    }

    #[test]
    fn clipped_trajectory_is_divergent() {
        let traj = Trajectory {
            states: vec![PlanarState::new(1.0, 1.0)],
            dt: 0.01,
            discrete: false,
            clipped: true,
        };
        assert_eq!(
            classify_orbit(&traj, PlanarState::new(1.0, 1.0)),
            OscillationVerdict::Divergent
        );
    }

    #[test]
    fn stable_spiral_converges_from_nearby_start() {
        // c = 2 c0 at x = 0.25 pushes the conditioned trace negative, and
        // gamma pins the equilibrium at (0.25, g(0.25))
        let (rho, k, a, b, d) = (1.0, 2.0, 1.0, 1.0, 1.0);
        let c = 64.0 / 700.0;
        let h = rho * (1.0 - 0.25 / k) * (1.0 + b * 0.25);
        let y = h / (a - c * h);
        let gamma = d * (1.0 + b * 0.25) * (1.0 + c * y) / (a * 0.25);
        let m = ModelInstance::CrowleyMartin(
            CrowleyMartinParams::new(rho, k, a, b, c, gamma, d).unwrap(),
        );
        let eqm = PlanarState::new(0.25, y);
        let field = m.vector_field(eqm);
        assert!(field[0].abs().max(field[1].abs()) < 1e-14);
        let traj = integrate_flow(&m, PlanarState::new(0.3, y + 0.1), 5e-3, 60_000);
        assert!(!traj.clipped);
        assert_eq!(classify_orbit(&traj, eqm), OscillationVerdict::ConvergesToEquilibrium);
    }

    #[test]
    fn map_fixed_point_is_stationary() {
        let p = CrowleyMartinParams::new(1.0, 2.0, 1.0, 1.0, 0.0, 1.0, 0.5).unwrap();
        let m = ModelInstance::DiscreteCrowleyMartin(p);
        // (1, 1) is the exact fixed point of the c = 0 member
        let traj = iterate_map(&m, PlanarState::new(1.0, 1.0), 50);
        assert_eq!(traj.states.len(), 51);
        for s in &traj.states {
            assert_eq!((s.x, s.y), (1.0, 1.0));
        }
        assert_eq!(
            classify_orbit(&traj, PlanarState::new(1.0, 1.0)),
            OscillationVerdict::ConvergesToEquilibrium
        );
    }
}
