//! Coexistence equilibria (x > 0, y > 0): intersections of the prey
//! nullcline y = g(x) with the predator nullcline.
//!
//! For every family the predator nullcline solves to a y(x) graph, except
//! the Crowley-Martin flow/map at c = 0, where it degenerates to the
//! vertical line x = d/(gamma a - d b) and the equilibrium height comes
//! from g alone. Fixed points of the discrete map coincide with the flow's
//! equilibria because the map is the identity plus the flow step.

use serde::Serialize;

use crate::model::{ModelInstance, PlanarState};
use crate::nullcline::{g_value_raw, Branch, NullclineProfile};
use crate::roots;

/// y solving the nontrivial predator balance at the given x, or None when
/// the balance does not determine y (Crowley-Martin with c = 0). The value
/// may be negative; callers filter for coexistence.
pub fn predator_nullcline_y(m: &ModelInstance, x: f64) -> Option<f64> {
    match m {
        ModelInstance::Bazykin(p) => Some((p.e * p.a * x / (x + p.b) - p.d) / p.sigma),
        ModelInstance::HollingIv(p) => Some(p.delta_eff() * x / p.beta),
        ModelInstance::CrowleyMartin(p) | ModelInstance::DiscreteCrowleyMartin(p) => {
            if p.c == 0.0 {
                None
            } else {
                Some((p.gamma * p.a * x / (p.d * (1.0 + p.b * x)) - 1.0) / p.c)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Equilibrium {
    pub state: PlanarState,
    /// max-norm of the vector field (or map displacement) at the state
    pub residual: f64,
    pub branch: Branch,
    pub cell_index: usize,
}

/// Locates all coexistence equilibria inside the admissible nullcline
/// interval. Scans the nullcline difference on a coarse grid and again on a
/// refined grid, merges duplicates, and keeps only points whose full field
/// residual is small relative to the largest additive term.
pub fn find_coexistence_equilibria(m: &ModelInstance) -> Vec<Equilibrium> {
    let profile = NullclineProfile::new(m);
    let span = profile.x_hi() - profile.x_lo();
    let lo = profile.x_lo() + 1e-9 * span;
    let hi = profile.x_hi() - 1e-9 * span;

    let mut candidates: Vec<f64> = Vec::new();
    if predator_nullcline_y(m, 0.5 * (lo + hi)).is_some() {
        let f = |x: f64| {
            g_value_raw(m, x) - predator_nullcline_y(m, x).expect("y-form checked above")
        };
        let x_tol = 1e-12 * (1.0 + hi.abs());
        for n_panels in [512_usize, 4096] {
            for bracket in roots::scan_sign_changes(f, lo, hi, n_panels) {
                candidates.push(roots::refine_root(f, bracket, x_tol));
            }
        }
    } else if let ModelInstance::CrowleyMartin(p) | ModelInstance::DiscreteCrowleyMartin(p) = m {
        // c = 0: the predator balance pins x instead of y
        let denom = p.gamma * p.a - p.d * p.b;
        if denom > 0.0 {
            let x_line = p.d / denom;
            if x_line > lo && x_line < hi {
                candidates.push(x_line);
            }
        }
    }

    candidates.sort_by(|a, b| a.total_cmp(b));
    let mut out: Vec<Equilibrium> = Vec::new();
    for x in candidates {
        let y = g_value_raw(m, x);
        if !(x > 0.0 && y > 0.0) {
            continue;
        }
        let state = PlanarState::new(x, y);
        let field = m.vector_field(state);
        let residual = field[0].abs().max(field[1].abs());
        if residual > 1e-10 * m.term_scale(state) {
            continue;
        }
        // duplicates from the two scan resolutions: keep the better residual
        if let Some(last) = out.last() {
            if (x - last.state.x).abs() <= 1e-9 * (1.0 + x.abs()) {
                if residual < last.residual {
                    out.pop();
                } else {
                    continue;
                }
            }
        }
        let branch = profile.branch_of(x).expect("candidate inside admissible interval");
        let cell_index = profile.cell_index_of(x).expect("candidate inside admissible interval");
        out.push(Equilibrium { state, residual, branch, cell_index });
    }
    out
}

/// The equilibrium whose prey coordinate is closest to x_ref, if any exist.
pub fn nearest_equilibrium(m: &ModelInstance, x_ref: f64) -> Option<Equilibrium> {
    find_coexistence_equilibria(m)
        .into_iter()
        .min_by(|a, b| (a.state.x - x_ref).abs().total_cmp(&(b.state.x - x_ref).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BazykinParams, CrowleyMartinParams, Holling4Params};

    #[test]
    fn bazykin_single_interior_equilibrium() {
        // chosen so the equilibrium sits exactly at x = 1, y = 16/21
        let p = BazykinParams::new(
            2.0,
            3.5,
            2.8125,
            0.5,
            0.568888888888889,
            0.685714285714286,
            0.5,
        )
        .unwrap();
        let eq = find_coexistence_equilibria(&ModelInstance::Bazykin(p));
        assert_eq!(eq.len(), 1);
        assert!((eq[0].state.x - 1.0).abs() < 1e-9, "{:?}", eq[0]);
        assert!((eq[0].state.y - 0.761904761904762).abs() < 1e-9);
        assert_eq!(eq[0].branch, Branch::Ascending);
    }

    #[test]
    fn bazykin_weak_predator_has_no_equilibrium() {
        // e a < d keeps the predator nullcline below zero everywhere
        let p = BazykinParams::new(1.0, 3.0, 1.0, 1.0, 0.1, 1.0, 1.0).unwrap();
        assert!(find_coexistence_equilibria(&ModelInstance::Bazykin(p)).is_empty());
    }

    #[test]
    fn holling4_three_transversal_crossings() {
        // g(x) - (delta/beta) x = -(x - 0.05)(x - 0.15)(x - 0.3) by
        // construction: u = 0.5, a = 0.0045, slope 0.063
        let p = Holling4Params::raw(0.0045, 0.5, 0.0, 0.063, 1.0).unwrap();
        let eq = find_coexistence_equilibria(&ModelInstance::HollingIv(p));
        assert_eq!(eq.len(), 3);
        for (e, x_expect) in eq.iter().zip([0.05, 0.15, 0.3]) {
            assert!((e.state.x - x_expect).abs() < 1e-9, "{:?}", e);
            assert!((e.state.y - 0.063 * x_expect).abs() < 1e-12);
        }
    }

    #[test]
    fn holling4_hopf_slice_equilibrium() {
        let p = Holling4Params::coupled(1.0, 0.0, 0.057692307692308, 0.142011834319527).unwrap();
        let eq = find_coexistence_equilibria(&ModelInstance::HollingIv(p));
        assert_eq!(eq.len(), 1);
        assert!((eq[0].state.x - 0.25).abs() < 1e-9);
        assert!((eq[0].state.y - 0.1015625).abs() < 1e-9);
    }

    #[test]
    fn crowley_martin_map_equilibrium_matches_flow() {
        let p = CrowleyMartinParams::new(
            1.0,
            2.0,
            1.0,
            1.0,
            0.395941108709343,
            0.580516588733021,
            0.1,
        )
        .unwrap();
        let flow_eq = find_coexistence_equilibria(&ModelInstance::CrowleyMartin(p));
        let map_eq = find_coexistence_equilibria(&ModelInstance::DiscreteCrowleyMartin(p));
        assert_eq!(flow_eq.len(), 1);
        assert_eq!(map_eq.len(), 1);
        assert!((flow_eq[0].state.x - 0.45).abs() < 1e-9);
        assert!((flow_eq[0].state.y - 2.024551603206413).abs() < 1e-9);
        assert_eq!(flow_eq[0].state.x, map_eq[0].state.x);
        assert_eq!(flow_eq[0].branch, Branch::Ascending);
    }

    #[test]
    fn crowley_martin_vertical_line_case() {
        // c = 0: predator nullcline is the line x = d/(gamma a - d b) = 1
        let p = CrowleyMartinParams::new(1.0, 2.0, 1.0, 1.0, 0.0, 1.0, 0.5).unwrap();
        let m = ModelInstance::CrowleyMartin(p);
        assert!(predator_nullcline_y(&m, 1.0).is_none());
        let eq = find_coexistence_equilibria(&m);
        assert_eq!(eq.len(), 1);
        assert!((eq[0].state.x - 1.0).abs() < 1e-12);
        assert!((eq[0].state.y - 1.0).abs() < 1e-12);
        assert!(eq[0].residual <= 1e-12);
    }

    #[test]
    fn nearest_picks_the_closest_by_prey_coordinate() {
        let p = Holling4Params::raw(0.0045, 0.5, 0.0, 0.063, 1.0).unwrap();
        let m = ModelInstance::HollingIv(p);
        let eq = nearest_equilibrium(&m, 0.16).unwrap();
        assert!((eq.state.x - 0.15).abs() < 1e-9);
    }
}
