//! Independent oracles for derived quantities.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tower_bubbles::integrals::{
    closed_form_i, i_alpha_flux_corrected, i_alpha_quadrature, verify_elementary_table,
    z_identities,
};
use tower_bubbles::linearized::recursion_det;
use tower_bubbles::numerics::lambert_w0;
use tower_bubbles::params::{solve_unperturbed, zeta};
use tower_bubbles::profiles::{
    correction_profiles, correction_profiles_on, representation_formula, solve_radial_linearized,
    source0, z0, GridSpec,
};

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Determinant by dynamic programming over column subsets (Laplace expansion row by row).
fn subset_det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut dp = vec![0.0; 1 << n];
    dp[0] = 1.0;
    for mask in 0usize..(1 << n) {
        let row = mask.count_ones() as usize;
        if row == n || dp[mask] == 0.0 {
            continue;
        }
        for col in 0..n {
            if mask & (1 << col) != 0 {
                continue;
            }
            let above = (mask >> (col + 1)).count_ones();
            let sign = if above % 2 == 0 { 1.0 } else { -1.0 };
            dp[mask | (1 << col)] += sign * m[row][col] * dp[mask];
        }
    }
    dp[(1 << n) - 1]
}

/// Relation matrix with the gamma columns divided by 2π.
fn reduced_matrix(a: &[f64], c: &[f64]) -> Vec<Vec<f64>> {
    let k = a.len();
    let b: Vec<f64> = (0..k).map(|i| c[i..].iter().sum()).collect();
    let mut m = vec![vec![0.0; 2 * k]; 2 * k];
    for j in 0..k {
        for i in 0..j {
            m[2 * j][2 * i] = 2.0;
        }
        m[2 * j][2 * j] = 1.0;
        m[2 * j][2 * j + 1] = -a[j];
        for i in 0..k {
            m[2 * j + 1][2 * i] = b[i.max(j)];
        }
        m[2 * j + 1][2 * j + 1] = 1.0;
        for i in j + 1..k {
            m[2 * j + 1][2 * i + 1] = 2.0;
        }
    }
    m
}

#[test]
fn lambert_w_against_bisection() {
    for x in [1e-6, 0.01, 0.2, 0.3, 1.0, 2.5, 10.0, 1e3] {
        let w = lambert_w0(x).unwrap();
        let oracle = bisect(|w| w * w.exp() - x, -0.5, 10.0);
        assert!((w - oracle).abs() < 1e-12 * (1.0 + oracle.abs()), "x={x}");
    }
}

#[test]
fn zeta_roots_against_bisection() {
    let u = solve_unperturbed(6).unwrap();
    for (j, s) in u.s.iter().enumerate() {
        let a = u.alpha[j];
        let oracle = bisect(|x| zeta(a, x), 1e-9, 1.0 - 1e-15);
        assert!((s - oracle).abs() < 1e-11, "j={j}: {s} vs {oracle}");
        assert!((u.alpha[j + 1] - (2.0 + (a + 2.0) / oracle)).abs() < 1e-9);
    }
}

// Reference values from an independent shooting solve (DOP853, rtol 1e-13).
const SHOOTING: [(f64, f64, f64, f64, f64); 2] = [
    (
        2.0,
        3.6822338332805282,
        -8.096776058769336,
        -4.978542334336195,
        60.2037461972339,
    ),
    (
        10.5,
        -9.58359077954717,
        18.740133977886387,
        -16.82347663617452,
        24.898901237914743,
    ),
];

#[test]
fn profile_constants_against_shooting() {
    for (a, c0, w0, c1, w1) in SHOOTING {
        let cp = correction_profiles(a).unwrap();
        for (got, want, name) in [
            (cp.c0, c0, "C0"),
            (cp.w0_at_0, w0, "w0(0)"),
            (cp.c1, c1, "C1"),
            (cp.w1_at_0, w1, "w1(0)"),
        ] {
            assert!(
                (got - want).abs() < 1e-7 * (1.0 + want.abs()),
                "alpha={a} {name}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn recursion_matches_subset_determinant() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7077e5);
    for _ in 0..100 {
        let k = rng.gen_range(1..=6);
        let a: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..5.0)).collect();
        let c: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..3.0)).collect();
        let det = subset_det(&reduced_matrix(&a, &c));
        let rec = recursion_det(&a, &c);
        assert!(
            (det - rec).abs() <= 1e-10 * rec.abs().max(1.0),
            "k={k}: {det} vs {rec}"
        );
    }
}

#[test]
fn one_bubble_determinant() {
    // rows (1, I) and (b, 2π)
    let (b, i) = (0.7_f64, closed_form_i(2.0));
    let a = -i / (2.0 * PI);
    let det = (2.0 * PI) * recursion_det(&[a], &[b]);
    assert!((det - (2.0 * PI - b * i)).abs() < 1e-12);
}

#[test]
fn two_bubble_row_pattern() {
    let m = reduced_matrix(&[0.3, 0.4], &[0.5, 0.25]);
    assert_eq!(m[0], vec![1.0, -0.3, 0.0, 0.0]);
    assert_eq!(m[1], vec![0.75, 1.0, 0.25, 2.0]);
    assert_eq!(m[2], vec![2.0, 0.0, 1.0, -0.4]);
    assert_eq!(m[3], vec![0.25, 0.0, 0.25, 1.0]);
}

#[test]
fn ninth_table_entry_is_negative() {
    let t = verify_elementary_table().unwrap();
    assert!((t[8].quadrature_value + PI / 128.0).abs() < 1e-12);
    for r in &t[..8] {
        assert!(r.abs_err < 1e-10, "{}", r.name);
    }
}

#[test]
fn third_z_identity_is_minus_four_pi() {
    for a in [2.0, 6.0, 14.5] {
        let r = z_identities(a).unwrap();
        assert!((r[2].quadrature_value + 4.0 * PI).abs() < 1e-9, "alpha={a}");
    }
}

#[test]
fn i_alpha_with_boundary_flux() {
    // the interpolation error of w0 is O(h^4 alpha^4); 8192 nodes keep alpha_4 below 1e-6
    let grid = GridSpec {
        points: 8192,
        ..GridSpec::default()
    };
    let u = solve_unperturbed(4).unwrap();
    for a in u.alpha {
        let cp = correction_profiles_on(a, &grid).unwrap();
        let raw = i_alpha_quadrature(a, &cp.w0).unwrap();
        let fixed = i_alpha_flux_corrected(a, &cp.w0).unwrap();
        assert!(fixed.rel_err < 1e-6, "alpha={a}: {}", fixed.rel_err);
        let gap = raw.quadrature_value - raw.closed_form;
        assert!((gap + 2.0 * PI * cp.c0).abs() < 1e-5 * (1.0 + gap.abs()));
    }
}

#[test]
fn representation_formula_differs_by_kernel_multiple() {
    let a = 2.0;
    let w = solve_radial_linearized(a, |t| source0(a, t), &GridSpec::default()).unwrap();
    let f = move |r: f64| source0(a, r.ln());
    let diffs: Vec<f64> = [0.3, 2.5, 7.0]
        .iter()
        .map(|r| (representation_formula(a, f, *r).unwrap() - w.eval(*r)) / z0(a, *r))
        .collect();
    assert!((diffs[0] - diffs[1]).abs() < 1e-6, "{diffs:?}");
    assert!((diffs[0] - diffs[2]).abs() < 1e-6, "{diffs:?}");
}
