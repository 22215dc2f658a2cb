use proptest::prelude::*;
use tower_bubbles::integrals::{closed_form_i, closed_form_i_derivative};
use tower_bubbles::linearized::{mass_decomp_check, recursion_det};
use tower_bubbles::numerics::{lambert_w0, logaddexp, softplus};
use tower_bubbles::params::solve;
use tower_bubbles::profiles::{taylor_check, V_alpha_log};
use tower_bubbles::tower::TowerApprox;

proptest! {
    #[test]
    fn lambert_inverts(x in 1e-8f64..1e6) {
        let w = lambert_w0(x).unwrap();
        prop_assert!((w * w.exp() - x).abs() <= 1e-12 * x.max(1e-3));
    }

    #[test]
    fn softplus_reflection(x in -700f64..700.0) {
        prop_assert!((softplus(x) - softplus(-x) - x).abs() <= 1e-12 * (1.0 + x.abs()));
        prop_assert!(softplus(x) >= x.max(0.0));
    }

    #[test]
    fn logaddexp_bounds(a in -800f64..800.0, b in -800f64..800.0) {
        let l = logaddexp(a, b);
        prop_assert!(l >= a.max(b));
        prop_assert!(l <= a.max(b) + std::f64::consts::LN_2 + 1e-12);
        prop_assert_eq!(l, logaddexp(b, a));
    }

    #[test]
    fn recursion_positive(a in prop::collection::vec(0.0f64..10.0, 1..8), c in prop::collection::vec(0.01f64..5.0, 8)) {
        prop_assert!(recursion_det(&a, &c[..a.len()]) >= 1.0);
    }

    #[test]
    fn power_below_exponential(p in 2.0f64..2000.0, u in 0.0f64..1.0) {
        let s = -p + (p + 5.0) * u;
        let lhs = p * (1.0 + s / p).abs().ln();
        prop_assert!(lhs <= s + 1e-12 * (1.0 + s.abs()));
    }

    #[test]
    fn bubble_sandwich(alpha in 2.0f64..60.0, t in -30f64..30.0) {
        let upper = (2.0 * alpha * alpha).ln() + (alpha - 2.0) * t - 2.0 * (alpha * t).max(0.0);
        let v = V_alpha_log(alpha, t);
        prop_assert!(v <= upper + 1e-12 * (1.0 + upper.abs()));
        prop_assert!(v >= upper - 2.0 * std::f64::consts::LN_2 - 1e-12 * (1.0 + upper.abs()));
    }

    #[test]
    fn mass_bounds_hold(alpha in 2.0f64..40.0, big_r in 0.5f64..50.0, small_r in 0.01f64..2.0, eta in 0.05f64..1.0) {
        for c in mass_decomp_check(alpha, big_r, Some(small_r), eta, 64, 1) {
            prop_assert!(c.pass, "{} margin {}", c.name, c.min_margin);
        }
    }

    #[test]
    fn closed_form_negative_and_decreasing(alpha in 2.0f64..200.0, d in 0.0f64..5.0) {
        prop_assert!(closed_form_i(alpha) < 0.0);
        prop_assert!(closed_form_i_derivative(alpha) <= 0.0);
        prop_assert!(closed_form_i(alpha + d) <= closed_form_i(alpha));
    }

    #[test]
    fn taylor_error_is_cubic(a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0, p in 20.0f64..2000.0) {
        let t = taylor_check(a, b, c, p).unwrap();
        prop_assert!(t.err * p.powi(3) < 40.0, "{}", t.err * p.powi(3));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn tower_vanishes_on_boundary_and_gauges_agree(k in 1usize..=3, p in 80.0f64..400.0, u in 0.0f64..1.0) {
        let ta = TowerApprox::new(solve(k, p, 0.0).unwrap(), 0.5).unwrap();
        prop_assert!(ta.eval_ln_r(0.0).unwrap().abs() < 1e-12);
        let part = &ta.partition;
        for j in 0..k {
            let (lo, hi) = (part.ln_inner[j].max(-200.0), part.ln_outer[j]);
            let ln_r = lo + (hi - lo) * (0.05 + 0.9 * u);
            let direct = ta.eval_ln_r(ln_r).unwrap();
            let local = ta.eval_tower(j, ln_r - ta.params.ln_delta[j]).unwrap();
            prop_assert!((direct - local).abs() <= 1e-12 * (1.0 + direct.abs()));
        }
    }
}
