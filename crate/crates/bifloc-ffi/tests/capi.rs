//! Drives the C interface the way an external caller would: through the
//! exported extern "C" functions and raw pointers, checked against the
//! underlying library as the oracle.

use std::ffi::CStr;
use std::path::Path;
use std::ptr;

use bifloc::equilibrium::find_coexistence_equilibria;
use bifloc::loci::bazykin_hopf;
use bifloc::model::{BazykinParams, Holling4Params, ModelInstance, PlanarState};
use bifloc::nullcline::{critical_points, CritKind, NullclineProfile};
use bifloc::spectral::spectral_summary;

use bifloc_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(bifloc_last_error_message()) }
        .to_str()
        .expect("error message is utf-8")
        .to_owned()
}

/// Builds a handle or panics; the returned pointer must be freed.
fn make_bazykin(p: &BazykinParams) -> *mut BiflocModel {
    let mut out: *mut BiflocModel = ptr::null_mut();
    let status = bifloc_bazykin_new(p.r, p.k, p.a, p.b, p.e, p.d, p.sigma, &mut out);
    assert_eq!(status, BiflocStatus::Ok, "{}", last_error());
    assert!(!out.is_null());
    out
}

#[test]
fn null_out_pointer_is_rejected() {
    let status = bifloc_bazykin_new(1.0, 3.0, 1.0, 1.0, 1.0, 0.1, 1.0, ptr::null_mut());
    assert_eq!(status, BiflocStatus::NullPointer);

    let mut flag = false;
    assert_eq!(
        bifloc_model_is_map(ptr::null(), &mut flag),
        BiflocStatus::NullPointer
    );
}

#[test]
fn bad_parameter_value_reports_invalid_with_message() {
    let mut out: *mut BiflocModel = ptr::null_mut();
    let status = bifloc_bazykin_new(1.0, 3.0, 1.0, 1.0, 1.0, 0.1, -1.0, &mut out);
    assert_eq!(status, BiflocStatus::InvalidParameter);
    assert!(out.is_null(), "failed constructor must not write a handle");
    let msg = last_error();
    assert!(msg.contains("sigma"), "message should name the parameter: {msg}");
}

#[test]
fn is_map_distinguishes_flow_from_map() {
    let mut flow: *mut BiflocModel = ptr::null_mut();
    let mut map: *mut BiflocModel = ptr::null_mut();
    assert_eq!(
        bifloc_crowley_martin_new(1.0, 2.0, 1.0, 1.0, 0.0, 1.0, 1.0, &mut flow),
        BiflocStatus::Ok
    );
    assert_eq!(
        bifloc_discrete_crowley_martin_new(1.0, 2.0, 1.0, 1.0, 0.0, 1.0, 1.0, &mut map),
        BiflocStatus::Ok
    );

    let mut flag = true;
    assert_eq!(bifloc_model_is_map(flow, &mut flag), BiflocStatus::Ok);
    assert!(!flag);
    assert_eq!(bifloc_model_is_map(map, &mut flag), BiflocStatus::Ok);
    assert!(flag);

    bifloc_model_free(flow);
    bifloc_model_free(map);
}

#[test]
fn vector_field_and_jacobian_match_the_library() {
    let params = BazykinParams::new(1.0, 3.0, 1.0, 1.0, 1.0, 0.1, 1.0).unwrap();
    let oracle = ModelInstance::Bazykin(params);
    let handle = make_bazykin(&params);

    for &(x, y) in &[(0.4, 0.7), (1.3, 0.25), (2.6, 1.9)] {
        let mut f = [f64::NAN; 2];
        assert_eq!(
            bifloc_vector_field(handle, x, y, f.as_mut_ptr()),
            BiflocStatus::Ok
        );
        let want = oracle.vector_field(PlanarState::new(x, y));
        assert_eq!(f, want, "same code path must give bit-identical fields");

        let mut j = [f64::NAN; 4];
        assert_eq!(bifloc_jacobian(handle, x, y, j.as_mut_ptr()), BiflocStatus::Ok);
        let jw = oracle.jacobian(PlanarState::new(x, y));
        assert_eq!(j, [jw[0][0], jw[0][1], jw[1][0], jw[1][1]]);
    }

    bifloc_model_free(handle);
}

#[test]
fn domain_and_nullcline_queries_match_the_profile() {
    let mut handle: *mut BiflocModel = ptr::null_mut();
    assert_eq!(
        bifloc_crowley_martin_new(1.0, 2.0, 1.0, 1.0, 0.0, 1.0, 1.0, &mut handle),
        BiflocStatus::Ok
    );
    let oracle = bifloc::model::CrowleyMartinParams::new(1.0, 2.0, 1.0, 1.0, 0.0, 1.0, 1.0)
        .map(ModelInstance::CrowleyMartin)
        .unwrap();
    let profile = NullclineProfile::new(&oracle);

    let (mut lo, mut hi) = (f64::NAN, f64::NAN);
    assert_eq!(bifloc_domain(handle, &mut lo, &mut hi), BiflocStatus::Ok);
    assert_eq!(lo, profile.x_lo());
    assert_eq!(hi, profile.x_hi());

    let x = 0.5 * (lo + hi);
    let mut g = f64::NAN;
    let mut gp = f64::NAN;
    assert_eq!(bifloc_nullcline_value(handle, x, &mut g), BiflocStatus::Ok);
    assert_eq!(
        bifloc_nullcline_derivative(handle, x, &mut gp),
        BiflocStatus::Ok
    );
    assert_eq!(g, profile.value(x).unwrap());
    assert_eq!(gp, profile.derivative(x).unwrap());

    assert_eq!(
        bifloc_nullcline_value(handle, -1.0, &mut g),
        BiflocStatus::OutOfDomain
    );
    let msg = last_error();
    assert!(
        msg.contains("outside the admissible interval"),
        "unexpected message: {msg}"
    );

    bifloc_model_free(handle);
}

#[test]
fn critical_points_honor_the_two_phase_buffer() {
    // u^2 > 3a, so the height has an interior minimum followed by a maximum.
    let params = Holling4Params::raw(0.03, 0.2, 0.1, 1.0, 1.0).unwrap();
    let oracle = ModelInstance::HollingIv(params);
    let want = critical_points(&oracle);
    assert_eq!(want.len(), 2, "fixture should have two interior extrema");

    let mut handle: *mut BiflocModel = ptr::null_mut();
    assert_eq!(
        bifloc_holling4_new(0.03, 0.2, 0.1, 1.0, 1.0, &mut handle),
        BiflocStatus::Ok
    );

    // Size query: null buffer is fine when cap == 0.
    let mut total = 0usize;
    assert_eq!(
        bifloc_critical_points(handle, ptr::null_mut(), 0, &mut total),
        BiflocStatus::Ok
    );
    assert_eq!(total, 2);

    // Truncated fetch writes only the leading entry.
    let sentinel = BiflocCriticalPoint { x: f64::NAN, g_value: f64::NAN, is_max: false };
    let mut buf = [sentinel; 2];
    assert_eq!(
        bifloc_critical_points(handle, buf.as_mut_ptr(), 1, &mut total),
        BiflocStatus::Ok
    );
    assert_eq!(total, 2);
    assert_eq!(buf[0].x, want[0].x);
    assert!(buf[1].x.is_nan(), "entry beyond cap must stay untouched");

    // Full fetch mirrors the library output, minimum first.
    assert_eq!(
        bifloc_critical_points(handle, buf.as_mut_ptr(), buf.len(), &mut total),
        BiflocStatus::Ok
    );
    for (got, want) in buf.iter().zip(&want) {
        assert_eq!(got.x, want.x);
        assert_eq!(got.g_value, want.g_value);
        assert_eq!(got.is_max, want.kind == CritKind::LocalMax);
    }
    assert!(!buf[0].is_max && buf[1].is_max);

    // A null buffer with nonzero cap is a caller error.
    assert_eq!(
        bifloc_critical_points(handle, ptr::null_mut(), 1, &mut total),
        BiflocStatus::NullPointer
    );

    bifloc_model_free(handle);
}

#[test]
fn equilibria_recover_the_engineered_zero_trace_state() {
    let h = bazykin_hopf(1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
    let oracle = ModelInstance::Bazykin(h.params);
    let want = find_coexistence_equilibria(&oracle);
    assert!(!want.is_empty());

    let handle = make_bazykin(&h.params);
    let mut total = 0usize;
    assert_eq!(
        bifloc_equilibria(handle, ptr::null_mut(), 0, &mut total),
        BiflocStatus::Ok
    );
    assert_eq!(total, want.len());

    let mut buf = vec![
        BiflocEquilibrium {
            x: f64::NAN,
            y: f64::NAN,
            residual: f64::NAN,
            branch: BiflocBranch::Critical,
        };
        total
    ];
    assert_eq!(
        bifloc_equilibria(handle, buf.as_mut_ptr(), buf.len(), &mut total),
        BiflocStatus::Ok
    );
    for (got, want) in buf.iter().zip(&want) {
        assert_eq!(got.x, want.state.x);
        assert_eq!(got.y, want.state.y);
        assert_eq!(got.residual, want.residual);
    }
    assert!(
        buf.iter().any(|e| (e.x - h.state.x).abs() < 1e-9),
        "engineered equilibrium at x = {} missing",
        h.state.x
    );

    bifloc_model_free(handle);
}

#[test]
fn spectral_summary_matches_the_library() {
    let h = bazykin_hopf(1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
    let oracle = ModelInstance::Bazykin(h.params);
    let want = spectral_summary(&oracle, h.state);

    let handle = make_bazykin(&h.params);
    let mut s = BiflocSpectralSummary {
        trace: f64::NAN,
        det: f64::NAN,
        discriminant: f64::NAN,
        eigenvalue_re: [f64::NAN; 2],
        eigenvalue_im: [f64::NAN; 2],
        near_double: false,
    };
    assert_eq!(
        bifloc_spectral_summary(handle, h.state.x, h.state.y, &mut s),
        BiflocStatus::Ok
    );
    assert_eq!(s.trace, want.trace);
    assert_eq!(s.det, want.det);
    assert_eq!(s.discriminant, want.discriminant);
    for i in 0..2 {
        assert_eq!(s.eigenvalue_re[i], want.eigenvalues[i].re);
        assert_eq!(s.eigenvalue_im[i], want.eigenvalues[i].im);
    }
    assert_eq!(s.near_double, want.near_double);

    // The construction targets a zero-trace, positive-determinant state.
    assert!(s.trace.abs() < 1e-10);
    assert!(s.det > 0.0);
    assert!(s.eigenvalue_im[0] != 0.0);

    bifloc_model_free(handle);
}

#[test]
fn free_null_is_a_noop() {
    bifloc_model_free(ptr::null_mut());
}

#[test]
fn generated_header_declares_the_exported_interface() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/bifloc.h");
    let text = std::fs::read_to_string(&header).expect("header is generated by build.rs");

    assert!(text.contains("typedef struct BiflocModel BiflocModel;"));
    for symbol in [
        "bifloc_bazykin_new",
        "bifloc_holling4_new",
        "bifloc_holling4_coupled_new",
        "bifloc_crowley_martin_new",
        "bifloc_discrete_crowley_martin_new",
        "bifloc_model_free",
        "bifloc_model_is_map",
        "bifloc_vector_field",
        "bifloc_jacobian",
        "bifloc_domain",
        "bifloc_nullcline_value",
        "bifloc_nullcline_derivative",
        "bifloc_critical_points",
        "bifloc_equilibria",
        "bifloc_spectral_summary",
        "bifloc_last_error_message",
    ] {
        assert!(text.contains(symbol), "header must declare {symbol}");
    }
    assert!(text.contains("BIFLOC_STATUS_OUT_OF_DOMAIN = 3"));
}
