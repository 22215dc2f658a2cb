//! One line per acceptance criterion; exits non-zero if any fails.

use std::f64::consts::E;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tower_bubbles::integrals::{i_alpha_reports, verify_elementary_table, z_identities};
use tower_bubbles::linearized::{
    barrier_report, build_matrix_closed_form, det_and_recursion_check, recursion_det,
};
use tower_bubbles::params::{alpha_via_lambert, solve, solve_unperturbed};
use tower_bubbles::profiles::{correction_profiles, gpp_check, taylor_check};
use tower_bubbles::tower::{
    nodal_count, potential_bound_check, residual_scan, NormGrid, TowerApprox,
};
use tower_bubbles::Result;

// Pinned tolerances.
const EXP_AGREE: f64 = 1e-10;
const EXP_SECONDS: f64 = 1.0;
const I_REL: f64 = 1e-6;
const I_SECONDS: f64 = 30.0;
const Z_ABS: f64 = 1e-8;
const TABLE_ABS: f64 = 1e-10;
const DELTA_LIMIT: f64 = 0.02;
const TAU_LIMIT: f64 = 0.05;
const SLOPE: (f64, f64) = (-4.8, -3.2);
const RESIDUAL_SECONDS: f64 = 120.0;
const DET_RATIO: f64 = 2.0;
const DET_REL: f64 = 1e-10;
const TAYLOR_RATIO: (f64, f64) = (6.0, 10.0);
const SLOPE_REL: f64 = 1e-3;
const NEAR_EQUALITY: f64 = 1e-6;

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn sci(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:.3e}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn exponents() -> Result<Outcome> {
    let t = Instant::now();
    let u = solve_unperturbed(10)?;
    let w = alpha_via_lambert(10)?;
    let secs = t.elapsed().as_secs_f64();
    let mut window = true;
    let mut agree = 0.0_f64;
    for j in 1..=10 {
        let (a, b) = (u.alpha[j - 1], w[j - 1]);
        agree = agree.max((a - b).abs());
        if j >= 2 {
            let lo = 8.0 * j as f64 - 6.0;
            window &= a > lo && a < lo + 1.0 && b > lo && b < lo + 1.0;
        }
    }
    ok(
        window && agree <= EXP_AGREE && secs < EXP_SECONDS,
        format!("windows {window}, max disagreement {agree:.1e}, {secs:.3}s"),
    )
}

fn closed_form_i() -> Result<Outcome> {
    let t = Instant::now();
    let u = solve_unperturbed(3)?;
    let mut worst = 0.0_f64;
    let mut worst_fixed = 0.0_f64;
    for a in &u.alpha {
        let [raw, fixed] = i_alpha_reports(*a)?;
        worst = worst.max(raw.rel_err);
        worst_fixed = worst_fixed.max(fixed.rel_err);
    }
    let secs = t.elapsed().as_secs_f64();
    ok(
        worst <= I_REL && secs < I_SECONDS,
        format!("max rel err {worst:.3e} (with boundary flux term {worst_fixed:.1e}), {secs:.2}s"),
    )
}

fn z_ids() -> Result<Outcome> {
    let mut worst = [0.0_f64; 3];
    for i in 0..10 {
        let a = 2.0 + 38.0 * i as f64 / 9.0;
        for (w, r) in worst.iter_mut().zip(z_identities(a)?) {
            *w = w.max(r.abs_err);
        }
    }
    ok(
        worst.iter().all(|w| *w <= Z_ABS),
        format!(
            "max abs err per identity {:.1e} / {:.1e} / {:.3e}",
            worst[0], worst[1], worst[2]
        ),
    )
}

fn table() -> Result<Outcome> {
    let t = verify_elementary_table()?;
    let bad: Vec<String> = t
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.within_abs(TABLE_ABS))
        .map(|(i, r)| {
            format!(
                "#{} got {:.6e} want {:.6e}",
                i + 1,
                r.quadrature_value,
                r.closed_form
            )
        })
        .collect();
    ok(
        bad.is_empty(),
        format!(
            "{}/9 within {TABLE_ABS:e}; {}",
            9 - bad.len(),
            bad.join(", ")
        ),
    )
}

fn one_bubble() -> Result<Outcome> {
    let mut d = Vec::new();
    let mut tau = Vec::new();
    for p in [1e2, 1e3, 1e4] {
        let ps = solve(1, p, 0.0)?;
        d.push((ps.ln_delta[0] / p + 0.25).abs());
        tau.push((ps.tau[0] * p / E.sqrt() - 1.0).abs());
    }
    let pass = d[0] > d[1]
        && d[1] > d[2]
        && d[2] < DELTA_LIMIT
        && tau[0] > tau[1]
        && tau[1] > tau[2]
        && tau[2] < TAU_LIMIT;
    ok(
        pass,
        format!(
            "|ln d/p + 1/4| {}, |tau p/sqrt(e) - 1| {}",
            sci(&d),
            sci(&tau)
        ),
    )
}

fn residual() -> Result<Outcome> {
    let t = Instant::now();
    let ps = [40.0, 80.0, 160.0, 320.0];
    let mut slopes = Vec::new();
    for k in [1, 2] {
        slopes.push(residual_scan(k, &ps, 0.5, 0.0, &NormGrid::default())?.slope);
    }
    let secs = t.elapsed().as_secs_f64();
    let pass = slopes.iter().all(|s| *s >= SLOPE.0 && *s <= SLOPE.1) && secs < RESIDUAL_SECONDS;
    ok(
        pass,
        format!(
            "slopes k=1 {:.3}, k=2 {:.3}, {secs:.1}s",
            slopes[0], slopes[1]
        ),
    )
}

fn subset_det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut dp = vec![0.0; 1 << n];
    dp[0] = 1.0;
    for mask in 0usize..(1 << n) {
        let row = mask.count_ones() as usize;
        if row == n {
            continue;
        }
        for col in (0..n).filter(|c| mask & (1 << c) == 0) {
            let sign = if (mask >> (col + 1)).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            dp[mask | (1 << col)] += sign * m[row][col] * dp[mask];
        }
    }
    dp[(1 << n) - 1]
}

fn determinant() -> Result<Outcome> {
    let mut pass = true;
    let mut ratios = Vec::new();
    for k in 1..=5 {
        let mut dets = Vec::new();
        for p in [50.0, 100.0, 200.0, 400.0] {
            let r = det_and_recursion_check(&build_matrix_closed_form(&solve(k, p, 0.0)?)?)?;
            pass &= r.pass();
            dets.push(r.det);
        }
        let (lo, hi) = dets
            .iter()
            .fold((f64::INFINITY, 0.0_f64), |(l, h), d| (l.min(*d), h.max(*d)));
        ratios.push(hi / lo);
        pass &= lo > 0.0 && hi / lo <= DET_RATIO;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let k = rng.gen_range(1..=6);
        let a: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..5.0)).collect();
        let c: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..3.0)).collect();
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
        let rec = recursion_det(&a, &c);
        worst = worst.max((subset_det(&m) - rec).abs() / rec.abs());
    }
    pass &= worst <= DET_REL;
    ok(
        pass,
        format!("max/min over p {ratios:.3?}, recursion vs cofactors {worst:.1e}"),
    )
}

fn taylor() -> Result<Outcome> {
    let ratio = taylor_check(1.0, 1.0, 1.0, 100.0)?.err / taylor_check(1.0, 1.0, 1.0, 200.0)?.err;
    let g = gpp_check(100.0, 10_000);
    ok(
        ratio >= TAYLOR_RATIO.0 && ratio <= TAYLOR_RATIO.1 && g.violations == 0,
        format!(
            "ratio {ratio:.3}, {} violations in {} samples",
            g.violations, g.samples
        ),
    )
}

fn growth() -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for a in solve_unperturbed(3)?.alpha {
        let cp = correction_profiles(a)?;
        for w in [&cp.w0, &cp.w1] {
            worst = worst.max((w.fitted_log_slope() - w.c_f).abs() / w.c_f.abs());
        }
    }
    ok(worst <= SLOPE_REL, format!("max rel diff {worst:.1e}"))
}

fn structure() -> Result<Outcome> {
    let mut pass = true;
    let mut nodal = Vec::new();
    for k in 1..=3 {
        let ta = TowerApprox::new(solve(k, 150.0, 0.0)?, 0.5)?;
        let n = nodal_count(&ta);
        nodal.push(n);
        pass &= n == k;
        for e in &ta.params.eps {
            pass &= *e > 1.0 / (E + 1.0) && *e < 0.5;
        }
        if k > 1 {
            pass &= ta.params.s[0] > 3.0 / (2.0 * E + 1.0);
        }
        for p in [100.0, 200.0, 400.0] {
            let other = TowerApprox::new(solve(k, p, 0.0)?, 0.5)?;
            pass &= other.partition.all_included() && ta.partition.all_included();
        }
    }
    ok(pass, format!("nodal regions {nodal:?}"))
}

fn barriers() -> Result<Outcome> {
    let mut pass = true;
    let mut notes = Vec::new();
    for p in [100.0, 200.0] {
        let ps = solve(2, p, 0.0)?;
        let ta = TowerApprox::new(ps.clone(), 0.5)?;
        let c_bar = potential_bound_check(&ta, &NormGrid::default()).max_c_bar();
        let rep = barrier_report(&ps, c_bar, 0.5, 0.5, 1000)?;
        let stray = rep
            .checks
            .iter()
            .filter(|c| c.min_margin < NEAR_EQUALITY && !c.min_at_threshold)
            .count();
        pass &= rep.all_pass && stray == 0;
        notes.push(format!(
            "p={p}: {} checks, all pass {}, off-threshold near-equalities {stray}",
            rep.checks.len(),
            rep.all_pass
        ));
    }
    ok(pass, notes.join("; "))
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 11] = [
        ("exponent windows", exponents),
        ("closed-form I_alpha", closed_form_i),
        ("z identities", z_ids),
        ("elementary table", table),
        ("one-bubble parameters", one_bubble),
        ("residual decay", residual),
        ("determinant", determinant),
        ("taylor expansion", taylor),
        ("growth constants", growth),
        ("structure", structure),
        ("barriers", barriers),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (pass, detail) = match check() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "[{}] {:>2} {name}: {detail}",
            if pass { "PASS" } else { "FAIL" },
            i + 1
        );
    }
    println!(
        "{} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
