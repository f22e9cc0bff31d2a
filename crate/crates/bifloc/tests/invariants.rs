//! Property-based invariants that hold for every admissible instance, not
//! just the tuned points the release gate exercises. Each property checks
//! one structural fact through two routes that share no code path.

use bifloc::model::{
    BazykinParams, CrowleyMartinParams, Holling4Params, ModelInstance, PlanarState,
};
use bifloc::nullcline::{g_derivative_raw, Branch, CritKind, NullclineProfile};
use bifloc::spectral::spectral_summary;
use proptest::prelude::*;

/// Two decades around 1, the regime the randomized sweeps draw from.
fn pos() -> impl Strategy<Value = f64> {
    (-1.0..1.0f64).prop_map(|e| 10f64.powf(e))
}

fn bazykin_instance() -> impl Strategy<Value = ModelInstance> {
    (pos(), pos(), pos(), pos(), pos(), pos(), pos()).prop_map(|(r, k0, a, b, e, d, sigma)| {
        ModelInstance::Bazykin(BazykinParams::new(r, k0 + b, a, b, e, d, sigma).unwrap())
    })
}

fn holling4_instance() -> impl Strategy<Value = ModelInstance> {
    (0.02..0.80f64, 0.05..0.90f64, pos(), pos()).prop_map(|(h1, frac, delta, beta)| {
        let u = 1.0 - h1;
        let a = frac * u * u / 3.0;
        ModelInstance::HollingIv(Holling4Params::raw(a, h1, 0.0, delta, beta).unwrap())
    })
}

fn cm_params() -> impl Strategy<Value = CrowleyMartinParams> {
    (pos(), pos(), pos(), pos(), pos(), pos(), 0.0..1.0f64).prop_map(
        |(rho, b, gamma, d, k0, a0, c)| {
            let k = (1.0 + k0) / b;
            // keep a above the peak interference load so the nullcline has
            // no pole anywhere in (0, k)
            let h_peak = rho * (2.0 + k0) * (2.0 + k0) / (4.0 * (1.0 + k0));
            let a = a0 + c * h_peak * (1.0 + 1e-9);
            CrowleyMartinParams::new(rho, k, a, b, c, gamma, d).unwrap()
        },
    )
}

fn any_instance() -> impl Strategy<Value = ModelInstance> {
    prop_oneof![
        bazykin_instance(),
        holling4_instance(),
        cm_params().prop_map(ModelInstance::CrowleyMartin),
        cm_params().prop_map(ModelInstance::DiscreteCrowleyMartin),
    ]
}

/// State near the prey nullcline, strictly inside the admissible interval.
fn state_near_nullcline(m: &ModelInstance, xf: f64, yf: f64) -> PlanarState {
    let profile = NullclineProfile::new(m);
    let x = profile.x_lo() + (profile.x_hi() - profile.x_lo()) * xf;
    PlanarState::new(x, profile.value(x).unwrap() * yf)
}

proptest! {
    /// The map step is state + flow right-hand side, so its Jacobian must be
    /// the flow Jacobian plus the identity to the last bit.
    #[test]
    fn map_jacobian_is_flow_jacobian_plus_identity(
        p in cm_params(),
        xf in 0.02..0.98f64,
        yf in 0.3..2.0f64,
    ) {
        let map = ModelInstance::DiscreteCrowleyMartin(p);
        let flow = map.continuous();
        let s = state_near_nullcline(&map, xf, yf);
        let jm = map.jacobian(s);
        let jf = flow.jacobian(s);
        prop_assert_eq!(jm[0][0].to_bits(), (1.0 + jf[0][0]).to_bits());
        prop_assert_eq!(jm[1][1].to_bits(), (1.0 + jf[1][1]).to_bits());
        prop_assert_eq!(jm[0][1].to_bits(), jf[0][1].to_bits());
        prop_assert_eq!(jm[1][0].to_bits(), jf[1][0].to_bits());
    }

    /// Without predator interference the Crowley-Martin nullcline height
    /// reduces to prey load over attack rate, the saturated (Holling II)
    /// limit.
    #[test]
    fn interference_free_height_is_load_over_attack(
        (rho, b, gamma, d, k0, a) in (pos(), pos(), pos(), pos(), pos(), pos()),
        xf in 0.01..0.99f64,
    ) {
        let k = (1.0 + k0) / b;
        let p = CrowleyMartinParams::new(rho, k, a, b, 0.0, gamma, d).unwrap();
        let m = ModelInstance::CrowleyMartin(p);
        let profile = NullclineProfile::new(&m);
        let x = xf * k;
        let expected = rho * (1.0 - x / k) * (1.0 + b * x) / a;
        let got = profile.value(x).unwrap();
        prop_assert!(
            (got - expected).abs() <= 1e-12 * (1.0 + expected.abs()),
            "got {got}, expected {expected}"
        );
    }

    /// Closed-form critical points are value-level extrema of the height.
    #[test]
    fn critical_points_are_value_level_extrema(m in any_instance()) {
        let profile = NullclineProfile::new(&m);
        for cp in profile.critical_points() {
            let span = (cp.x - profile.x_lo()).min(profile.x_hi() - cp.x);
            let step = 1e-3 * span;
            let center = profile.value(cp.x).unwrap();
            let left = profile.value(cp.x - step).unwrap();
            let right = profile.value(cp.x + step).unwrap();
            match cp.kind {
                CritKind::LocalMax => {
                    prop_assert!(left < center && right < center, "not a max at {}", cp.x)
                }
                CritKind::LocalMin => {
                    prop_assert!(left > center && right > center, "not a min at {}", cp.x)
                }
            }
        }
    }

    /// At any coexistence state the prey row loses to predation and the
    /// predator row gains from prey, in every family: the group-defense
    /// response only weakens the loss, and the Leslie growth term ties the
    /// predator's ceiling to the prey stock.
    #[test]
    fn predation_signs_are_fixed(
        m in any_instance(),
        xf in 0.02..0.98f64,
        yf in 0.3..2.0f64,
    ) {
        let s = state_near_nullcline(&m, xf, yf);
        let j = m.jacobian(s);
        prop_assert!(j[0][1] < 0.0, "prey-predator coupling {}", j[0][1]);
        prop_assert!(j[1][0] > 0.0, "predator-prey coupling {}", j[1][0]);
    }

    /// The group-defense response x/(a + x^2) peaks at sqrt(a): below the
    /// peak extra predators depress the prey diagonal, above it they raise
    /// it. The diagonal is affine in y, so a two-point difference isolates
    /// the predation term exactly.
    #[test]
    fn holling4_predation_pressure_flips_at_response_peak(
        m in holling4_instance(),
        xf in 0.02..0.98f64,
        yf in 0.3..2.0f64,
    ) {
        let s = state_near_nullcline(&m, xf, yf);
        let ModelInstance::HollingIv(p) = m else { unreachable!() };
        let margin = p.a - s.x * s.x;
        prop_assume!(margin.abs() > 1e-6 * (p.a + s.x * s.x));
        let j_lo = m.jacobian(s)[0][0];
        let j_hi = m.jacobian(PlanarState::new(s.x, 2.0 * s.y))[0][0];
        prop_assert_eq!(j_hi < j_lo, margin > 0.0, "lo {} hi {} margin {}", j_lo, j_hi, margin);
    }

    /// The reported eigenvalues recover the trace and determinant at any
    /// state, for flows and the map alike.
    #[test]
    fn eigenvalues_recover_trace_and_det(
        m in any_instance(),
        xf in 0.02..0.98f64,
        yf in 0.3..2.0f64,
    ) {
        let s = state_near_nullcline(&m, xf, yf);
        let summary = spectral_summary(&m, s);
        let sum = summary.eigenvalues[0] + summary.eigenvalues[1];
        let prod = summary.eigenvalues[0] * summary.eigenvalues[1];
        let scale = 1.0
            + summary.trace.abs()
            + summary.det.abs()
            + summary.trace * summary.trace
            + summary.discriminant.abs().sqrt();
        prop_assert!((sum.re - summary.trace).abs().max(sum.im.abs()) <= 1e-12 * scale);
        prop_assert!((prod.re - summary.det).abs().max(prod.im.abs()) <= 1e-12 * scale);
    }

    /// Branch labels agree with the analytic slope and with a centered
    /// difference of the height itself.
    #[test]
    fn branch_labels_match_the_height_slope(
        m in any_instance(),
        xf in 0.02..0.98f64,
    ) {
        let profile = NullclineProfile::new(&m);
        let span = profile.x_hi() - profile.x_lo();
        let x = profile.x_lo() + span * xf;
        let gp = g_derivative_raw(&m, x);
        prop_assume!(gp.abs() > 1e-3 * profile.derivative_scale());
        let expected = if gp > 0.0 { Branch::Ascending } else { Branch::Descending };
        prop_assert_eq!(profile.branch_of(x).unwrap(), expected);
        let e = 1e-7 * span;
        let fd = (profile.value(x + e).unwrap() - profile.value(x - e).unwrap()) / (2.0 * e);
        prop_assert!(
            (fd - gp).abs() <= 1e-3 * profile.derivative_scale(),
            "fd {fd}, analytic {gp}"
        );
    }
}
