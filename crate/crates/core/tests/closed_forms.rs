//! Closed forms and asymptotic constants.

use std::f64::consts::{E, PI};

use tower_bubbles::integrals::{closed_form_i, z_identities};
use tower_bubbles::params::{solve, solve_unperturbed};

#[test]
fn i_at_two() {
    let want = 8.0 * PI * (2.0 - 8f64.ln());
    assert!((closed_form_i(2.0) - want).abs() < 1e-13);
}

#[test]
fn exponents_lie_in_unit_windows() {
    let u = solve_unperturbed(8).unwrap();
    assert_eq!(u.alpha[0], 2.0);
    for (i, a) in u.alpha.iter().enumerate().skip(1) {
        let j = (i + 1) as f64;
        assert!(
            *a > 8.0 * j - 6.0 && *a < 8.0 * j - 5.0,
            "alpha_{} = {a}",
            i + 1
        );
    }
}

#[test]
fn epsilon_bounds() {
    for k in 2..=4 {
        let ps = solve(k, 200.0, 0.0).unwrap();
        for e in &ps.eps {
            assert!(*e > 1.0 / (E + 1.0) && *e < 0.5, "k={k} eps={e}");
        }
    }
}

#[test]
fn single_bubble_asymptotics() {
    let mut prev = (f64::INFINITY, f64::INFINITY);
    for p in [1e2, 1e3, 1e4] {
        let ps = solve(1, p, 0.0).unwrap();
        let d = (ps.ln_delta[0] / p + 0.25).abs();
        let t = (ps.tau[0] * p / E.sqrt() - 1.0).abs();
        assert!(d < prev.0 && t < prev.1, "p={p}: {d} {t}");
        prev = (d, t);
    }
    assert!(prev.0 < 0.02, "{}", prev.0);
    assert!(prev.1 < 0.05, "{}", prev.1);
}

#[test]
fn first_two_z_identities() {
    for i in 0..10 {
        let a = 2.0 + 3.7 * i as f64;
        let r = z_identities(a).unwrap();
        assert!(r[0].abs_err < 1e-9, "alpha={a}");
        assert!(r[1].rel_err < 1e-9, "alpha={a}: {}", r[1].rel_err);
    }
}
