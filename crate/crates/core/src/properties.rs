//! Property checks over random parameter draws.

use crate::{covariance, moments_at, propagator, symplectic_smallest, Model, Regime, SystemParams};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = SystemParams> {
    (
        0.2..2.0f64,
        0.3..2.0f64,
        prop_oneof![Just(0.0), 0.0..15.0f64],
        0.0..1.5f64,
        1.0..30.0f64,
    )
        .prop_map(|(k, g, o, th, a)| SystemParams::new(k, g, o, th, a))
}

proptest! {
    #[test]
    fn coefficient_identity(p in params()) {
        let m = Model::new(p).unwrap();
        prop_assume!(m.spectrum.regime != Regime::Degenerate);
        let s = &m.spectrum;
        // scaled form, free of the 1/Δ singularity: P² + Q₊Q₋ = Δ²
        let lhs = s.p_times_diff.powi(2) + s.qp_times_diff * s.qm_times_diff;
        prop_assert!((lhs - s.mu_diff_sq).abs() <= 1e-9 * (s.p_times_diff.powi(2) + (s.qp_times_diff * s.qm_times_diff).abs()));
    }

    #[test]
    fn propagator_is_real(p in params(), t in 0.0..20.0f64) {
        let m = Model::new(p).unwrap();
        let g = propagator(&m.spectrum, t).unwrap();
        prop_assert!(g.is_real());
    }

    #[test]
    fn moments_and_v_s_stay_finite(p in params(), t in 0.0..30.0f64) {
        let m = Model::new(p).unwrap();
        let sm = moments_at(&m, t).unwrap();
        prop_assert!(sm.n_a.is_finite() && sm.n_b.is_finite() && sm.c_ab.is_finite());
        if let Ok(cv) = covariance(&sm) {
            if let Ok(v) = symplectic_smallest(&cv) {
                prop_assert!(v >= 0.0 && v.is_finite());
            }
        }
    }
}
