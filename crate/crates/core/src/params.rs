//! Exponents, ratios, decay rates and scales of the tower.
//!
//! Unknowns are packed as `(α₁, s₁, α₂, s₂, …, s_{k-1}, α_k)` and equations
//! as `(g₁, h₁, g₂, h₂, …, h_{k-1}, g_k)`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{fd_jacobian, find_root, lambert_w0, newton_solve, RootBracket};
use crate::profiles::correction_profiles;

const E: f64 = std::f64::consts::E;
const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnperturbedParams {
    pub k: usize,
    pub alpha: Vec<f64>,
    pub s: Vec<f64>,
}

/// `ζ_α(s) = (α+2)/2 · ln s + 1 + s`.
pub fn zeta(alpha: f64, s: f64) -> f64 {
    0.5 * (alpha + 2.0) * s.ln() + 1.0 + s
}

pub fn solve_unperturbed(k: usize) -> Result<UnperturbedParams> {
    if k == 0 {
        return Err(Error::Usage("k must be >= 1".into()));
    }
    let mut alpha = vec![2.0];
    let mut s = Vec::with_capacity(k - 1);
    for j in 0..k - 1 {
        let a = alpha[j];
        let sj = find_root(|x| zeta(a, x), RootBracket::new(1e-12, 1.0 - 1e-12))?;
        s.push(sj);
        alpha.push(2.0 + (a + 2.0) / sj);
    }
    Ok(UnperturbedParams { k, alpha, s })
}

/// Same recursion through `α_{j+1} = 2 + 2/W(β e^{-β})`, `β = 2/(α_j+2)`.
pub fn alpha_via_lambert(k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::Usage("k must be >= 1".into()));
    }
    let mut alpha = vec![2.0];
    for j in 0..k - 1 {
        let beta: f64 = 2.0 / (alpha[j] + 2.0);
        let w = lambert_w0(beta * (-beta).exp())?;
        alpha.push(2.0 + 2.0 / w);
    }
    Ok(alpha)
}

/// Analytic Jacobian of the unperturbed system (lower triangular).
pub fn unperturbed_jacobian(u: &UnperturbedParams) -> DMatrix<f64> {
    let n = 2 * u.k - 1;
    let mut j = DMatrix::zeros(n, n);
    j[(0, 0)] = 1.0;
    for m in 0..u.k - 1 {
        let (a, s, a_next) = (u.alpha[m], u.s[m], u.alpha[m + 1]);
        let (ia, is, ian) = (2 * m, 2 * m + 1, 2 * m + 2);
        // h_m
        j[(is, ia)] = 0.5 * s.ln();
        j[(is, is)] = 0.5 * (a + 2.0) / s + 1.0;
        // g_{m+1}
        j[(ian, ia)] = -1.0;
        j[(ian, is)] = a_next - 2.0;
        j[(ian, ian)] = s;
    }
    j
}

/// Profile constants entering the system for one exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileConsts {
    pub c0: f64,
    pub c1: f64,
    pub w0_at_0: f64,
    pub w1_at_0: f64,
}

impl ProfileConsts {
    pub const ZERO: ProfileConsts = ProfileConsts {
        c0: 0.0,
        c1: 0.0,
        w0_at_0: 0.0,
        w1_at_0: 0.0,
    };
}

/// Constants from the cached correction profiles.
pub fn profile_consts(alpha: f64) -> Result<ProfileConsts> {
    let c = correction_profiles(alpha)?;
    Ok(ProfileConsts {
        c0: c.c0,
        c1: c.c1,
        w0_at_0: c.w0_at_0,
        w1_at_0: c.w1_at_0,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamSet {
    pub k: usize,
    pub p: f64,
    pub alpha: Vec<f64>,
    pub s: Vec<f64>,
    pub eps: Vec<f64>,
    pub b: Vec<f64>,
    pub ln_delta: Vec<f64>,
    #[serde(rename = "ln_C")]
    pub ln_c: Vec<f64>,
    pub tau: Vec<f64>,
    pub c: Vec<f64>,
    pub corr0: Vec<f64>,
    pub corr1: Vec<f64>,
    pub w0_at_0: Vec<f64>,
    pub w1_at_0: Vec<f64>,
    pub h0: f64,
    pub newton_residual: f64,
    pub outer_iterations: usize,
}

impl ParamSet {
    pub fn ln_tau(&self, j: usize) -> f64 {
        self.tau[j].ln()
    }

    /// `ln(τ_i/τ_j)`.
    pub fn ln_tau_ratio(&self, i: usize, j: usize) -> f64 {
        ln_tau_ratio(&self.s, i, j)
    }

    /// `α_j + 2 - C⁰/p - C¹/p²`.
    pub fn kappa(&self, j: usize) -> f64 {
        kappa(self.alpha[j], self.corr0[j], self.corr1[j], self.p)
    }
}

/// `[(α+4)/((α+2)e^{4/(α+2)}+2), e^{-2/(α+2)}]`.
pub fn s_convexity_bounds(alpha: f64) -> (f64, f64) {
    let lo = (alpha + 4.0) / ((alpha + 2.0) * (4.0 / (alpha + 2.0)).exp() + 2.0);
    (lo, (-2.0 / (alpha + 2.0)).exp())
}

fn ln_tau_ratio(s: &[f64], i: usize, j: usize) -> f64 {
    if i > j {
        s[j..i].iter().map(|v| v.ln()).sum()
    } else if i < j {
        -s[i..j].iter().map(|v| v.ln()).sum::<f64>()
    } else {
        0.0
    }
}

fn kappa(alpha: f64, c0: f64, c1: f64, p: f64) -> f64 {
    alpha + 2.0 - c0 / p - c1 / (p * p)
}

fn unpack(k: usize, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let alpha = (0..k).map(|j| x[2 * j]).collect();
    let s = (0..k - 1).map(|j| x[2 * j + 1]).collect();
    (alpha, s)
}

fn pack(alpha: &[f64], s: &[f64]) -> Vec<f64> {
    let mut x = Vec::with_capacity(alpha.len() + s.len());
    for j in 0..alpha.len() {
        x.push(alpha[j]);
        if j < s.len() {
            x.push(s[j]);
        }
    }
    x
}

/// The constants `c_j` for given exponents and ratios.
pub fn constants_c(
    alpha: &[f64],
    s: &[f64],
    consts: &[ProfileConsts],
    p: f64,
    h0: f64,
) -> Vec<f64> {
    let k = alpha.len();
    (0..k)
        .map(|j| {
            let mut robin = 0.0;
            let mut corr = 0.0;
            for i in 0..k {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                let ratio = ln_tau_ratio(s, i, j).exp();
                if h0 != 0.0 {
                    let at = alpha[i] - consts[i].c0 / (2.0 * p) - consts[i].c1 / (2.0 * p * p);
                    robin += sign * ratio * at;
                }
                if i > j {
                    corr += sign * ratio * (consts[i].w0_at_0 / p + consts[i].w1_at_0 / (p * p));
                }
            }
            FOUR_PI * h0 * robin - (2.0 * alpha[j] * alpha[j]).ln() + corr
        })
        .collect()
}

/// The map `G(x, t)` at `t = 1/p` with the profile constants frozen.
/// `p = ∞` gives the unperturbed system.
pub fn system_residual(
    k: usize,
    x: &[f64],
    p: f64,
    consts: &[ProfileConsts],
    h0: f64,
) -> Result<Vec<f64>> {
    let (alpha, s) = unpack(k, x);
    if s.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Domain("ratios s_j must stay positive".into()));
    }
    let t = if p.is_infinite() { 0.0 } else { 1.0 / p };
    let c = if t == 0.0 {
        vec![0.0; k]
    } else {
        constants_c(&alpha, &s, consts, p, h0)
    };
    let kap: Vec<f64> = (0..k)
        .map(|j| {
            if t == 0.0 {
                alpha[j] + 2.0
            } else {
                kappa(alpha[j], consts[j].c0, consts[j].c1, p)
            }
        })
        .collect();
    let mut g = Vec::with_capacity(2 * k - 1);
    g.push(alpha[0] - 2.0);
    for j in 0..k - 1 {
        let sj = s[j];
        let pert = if t == 0.0 {
            0.0
        } else {
            t * (c[j] + sj * c[j + 1] - (1.0 + sj)) / (1.0 - t)
        };
        g.push(0.5 * kap[j] * sj.ln() + 1.0 + sj - pert);
        g.push((alpha[j + 1] - 2.0) * sj - kap[j]);
    }
    Ok(g)
}

const NEWTON_TOL: f64 = 1e-12;
const OUTER_TOL: f64 = 1e-13;
const OUTER_MAX: usize = 12;

/// Solve the full system at exponent `p`.
///
/// Profile constants are frozen during each Newton solve and re-evaluated at
/// the new exponents until the exponents stop moving.
pub fn solve_full_system<P>(k: usize, p: f64, consts_for: P, h0: f64) -> Result<ParamSet>
where
    P: Fn(f64) -> Result<ProfileConsts>,
{
    if !(p > 1.0) {
        return Err(Error::Usage(format!("p must be > 1, got {p}")));
    }
    let u = solve_unperturbed(k)?;
    let mut x = pack(&u.alpha, &u.s);
    let mut alpha_used = u.alpha.clone();
    let mut consts: Vec<ProfileConsts> = alpha_used
        .iter()
        .map(|a| consts_for(*a))
        .collect::<Result<_>>()?;
    let mut outer = 0;
    let mut residual;
    loop {
        outer += 1;
        let out = solve_at(k, &x, p, &consts, h0)?;
        x = out.0;
        residual = out.1;
        let (alpha_new, _) = unpack(k, &x);
        let moved = alpha_new
            .iter()
            .zip(&alpha_used)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        if moved < OUTER_TOL {
            break;
        }
        if outer >= OUTER_MAX {
            return Err(Error::NoConvergence {
                what: "profile-constant refresh",
                iterations: outer,
                residual: moved,
            });
        }
        alpha_used = alpha_new;
        consts = alpha_used
            .iter()
            .map(|a| consts_for(*a))
            .collect::<Result<_>>()?;
    }
    let (alpha, s) = unpack(k, &x);
    Ok(back_substitute(
        k, p, alpha, s, &consts, h0, residual, outer,
    ))
}

/// Default solve using the computed correction profiles.
pub fn solve(k: usize, p: f64, h0: f64) -> Result<ParamSet> {
    solve_full_system(k, p, profile_consts, h0)
}

fn solve_at(
    k: usize,
    x0: &[f64],
    p: f64,
    consts: &[ProfileConsts],
    h0: f64,
) -> Result<(Vec<f64>, f64)> {
    let g = |x: &[f64]| system_residual(k, x, p, consts, h0);
    match newton_solve(&g, |x: &[f64]| fd_jacobian(&g, x), x0, NEWTON_TOL) {
        Ok(out) => Ok((out.x, out.residual)),
        Err(_) => {
            // continuation in t = 1/p
            let mut x = x0.to_vec();
            let mut res = f64::NAN;
            let steps = 16;
            for m in 1..=steps {
                let tm = (m as f64 / steps as f64) / p;
                let pm = 1.0 / tm;
                let gm = |x: &[f64]| system_residual(k, x, pm, consts, h0);
                let out = newton_solve(&gm, |x: &[f64]| fd_jacobian(&gm, x), &x, NEWTON_TOL)?;
                x = out.x;
                res = out.residual;
            }
            Ok((x, res))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn back_substitute(
    k: usize,
    p: f64,
    alpha: Vec<f64>,
    s: Vec<f64>,
    consts: &[ProfileConsts],
    h0: f64,
    newton_residual: f64,
    outer_iterations: usize,
) -> ParamSet {
    let c = constants_c(&alpha, &s, consts, p, h0);
    let kap: Vec<f64> = (0..k)
        .map(|j| kappa(alpha[j], consts[j].c0, consts[j].c1, p))
        .collect();
    let mut ln_delta = vec![0.0; k];
    let mut b = vec![0.0; k];
    let mut ln_c = vec![0.0; k];
    let mut ln_tau = vec![0.0; k];
    let last = k - 1;
    ln_delta[last] = (c[last] - p) / kap[last];
    b[last] = 1.0 / kap[last];
    ln_c[last] = c[last] / kap[last];
    ln_tau[last] = -(p * p.ln() + 2.0 * ln_delta[last]) / (p - 1.0);
    for j in (0..last).rev() {
        let shift = (c[j] + c[j + 1] * s[j]) / kap[j];
        ln_delta[j] = ln_delta[j + 1] - (1.0 + s[j]) * p / kap[j] + shift;
        b[j] = b[j + 1] + (1.0 + s[j]) / kap[j];
        ln_c[j] = ln_c[j + 1] + shift;
        ln_tau[j] = ln_tau[j + 1] - s[j].ln();
    }
    let eps = s.iter().map(|v| v / (1.0 + v)).collect();
    ParamSet {
        k,
        p,
        alpha,
        s,
        eps,
        b,
        ln_delta,
        ln_c,
        tau: ln_tau.iter().map(|v| v.exp()).collect(),
        c,
        corr0: consts.iter().map(|q| q.c0).collect(),
        corr1: consts.iter().map(|q| q.c1).collect(),
        w0_at_0: consts.iter().map(|q| q.w0_at_0).collect(),
        w1_at_0: consts.iter().map(|q| q.w1_at_0).collect(),
        h0,
        newton_residual,
        outer_iterations,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

/// Realized values of the quantities the standing assumptions bound by an
/// unspecified constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealizedBounds {
    pub alpha_k: f64,
    pub b_k: f64,
    pub b_1: f64,
    /// `τ_j p e^{-2 b_j}`, expected near 1.
    pub tau_p_over_exp2b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructuralReport {
    pub checks: Vec<Check>,
    pub realized: RealizedBounds,
}

impl StructuralReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

pub fn check_structural_properties(ps: &ParamSet) -> StructuralReport {
    let k = ps.k;
    let p = ps.p;
    let mut checks = Vec::new();

    let b_ok = ps.b.windows(2).all(|w| w[0] > w[1]) && ps.b.iter().all(|v| *v > 0.0);
    checks.push(Check::new(
        "b decreasing and positive",
        b_ok,
        format!("b = {:?}", ps.b),
    ));

    let d = (0..k).fold(0.0_f64, |m, j| {
        m.max((ps.ln_delta[j] - (ps.ln_c[j] - ps.b[j] * p)).abs())
    });
    checks.push(Check::new(
        "ln delta = ln C - b p",
        d <= 1e-9 * p.max(1.0),
        format!("max deviation {d:e}"),
    ));

    let e = (0..k - 1).fold(0.0_f64, |m, j| {
        m.max((ps.eps[j] - ps.s[j] / (1.0 + ps.s[j])).abs())
    });
    checks.push(Check::new(
        "eps = s/(1+s)",
        e <= 1e-15,
        format!("max deviation {e:e}"),
    ));

    if k > 1 {
        let s_lo = 3.0 / (2.0 * E + 1.0);
        let order_ok = strictly_increasing(&ps.s) && ps.s[k - 2] < 1.0 && ps.s[0] > 0.0;
        checks.push(Check::new(
            "0 < s_1 < ... < s_{k-1} < 1",
            order_ok,
            format!("s = {:?}", ps.s),
        ));
        checks.push(Check::new(
            "3/(2e+1) < s_1",
            ps.s[0] > s_lo,
            format!("s_1 = {}, lower {s_lo}", ps.s[0]),
        ));
        let e_lo = 1.0 / (E + 1.0);
        let e_ok = ps.eps[0] > e_lo && strictly_increasing(&ps.eps) && ps.eps[k - 2] < 0.5;
        checks.push(Check::new(
            "1/(e+1) < eps_1 < ... < eps_{k-1} < 1/2",
            e_ok,
            format!("eps = {:?}, lower {e_lo}", ps.eps),
        ));
        // The convexity bounds are properties of the p = ∞ root; the solved
        // s_j sit O(1/p) below it.
        match solve_unperturbed(k) {
            Ok(u) => {
                let mut sb_ok = true;
                let mut worst = String::new();
                for j in 0..k - 1 {
                    let (lo, hi) = s_convexity_bounds(u.alpha[j]);
                    if !(lo <= u.s[j] && u.s[j] <= hi) {
                        sb_ok = false;
                        worst = format!("j={} s0={} not in [{lo}, {hi}]", j + 1, u.s[j]);
                    }
                }
                checks.push(Check::new(
                    "convexity bounds on the limiting s_j",
                    sb_ok,
                    worst,
                ));
            }
            Err(e) => checks.push(Check::new(
                "convexity bounds on the limiting s_j",
                false,
                e.to_string(),
            )),
        }
        let mut rec = 0.0_f64;
        for j in 0..k - 1 {
            rec = rec.max((ps.b[j] - ps.b[j + 1] - (1.0 + ps.s[j]) / ps.kappa(j)).abs());
        }
        checks.push(Check::new(
            "b recursion",
            rec <= 1e-10,
            format!("max deviation {rec:e}"),
        ));
    }

    let mut amp = 0.0_f64;
    for j in 0..k {
        amp = amp.max((p * p.ln() + (p - 1.0) * ps.ln_tau(j) + 2.0 * ps.ln_delta[j]).abs());
    }
    checks.push(Check::new(
        "p^p tau^(p-1) delta^2 = 1 (log form)",
        amp <= 1e-8,
        format!("max deviation {amp:e}"),
    ));
    checks.push(Check::new(
        "system residual",
        ps.newton_residual <= NEWTON_TOL,
        format!("{:e}", ps.newton_residual),
    ));

    let realized = RealizedBounds {
        alpha_k: ps.alpha[k - 1],
        b_k: ps.b[k - 1],
        b_1: ps.b[0],
        tau_p_over_exp2b: (0..k)
            .map(|j| ps.tau[j] * p * (-2.0 * ps.b[j]).exp())
            .collect(),
    };
    StructuralReport { checks, realized }
}

/// Exponent bounds and growth of the unperturbed recursion.
pub fn check_unperturbed(u: &UnperturbedParams) -> Vec<Check> {
    let mut checks = Vec::new();
    let mut in_band = true;
    for j in 1..u.k {
        let jj = (j + 1) as f64;
        if !(u.alpha[j] > 8.0 * jj - 6.0 && u.alpha[j] < 8.0 * jj - 5.0) {
            in_band = false;
        }
    }
    checks.push(Check::new(
        "8j-6 < alpha_j < 8j-5",
        in_band,
        format!("alpha = {:?}", u.alpha),
    ));
    let mut growth = true;
    for j in 0..u.k.saturating_sub(1) {
        let gap = u.alpha[j + 1] - u.alpha[j] - 8.0;
        let cap = (32.0 / 3.0) / (u.alpha[j] + 2.0).powi(2);
        if !(gap > 0.0 && gap <= cap) {
            growth = false;
        }
    }
    checks.push(Check::new(
        "8 < alpha_{j+1} - alpha_j <= 8 + (32/3)/(alpha_j+2)^2",
        growth,
        "",
    ));
    let fp = u.s.iter().zip(&u.alpha).fold(0.0_f64, |m, (s, a)| {
        m.max((s - (-2.0 * (1.0 + s) / (a + 2.0)).exp()).abs())
    });
    checks.push(Check::new(
        "s = exp(-2(1+s)/(alpha+2))",
        fp <= 1e-12,
        format!("{fp:e}"),
    ));
    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_at_one() {
        for a in [2.0, 10.0, 33.3] {
            assert!((zeta(a, 1.0) - 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn k1_has_no_ratios() {
        let u = solve_unperturbed(1).unwrap();
        assert_eq!(u.alpha, vec![2.0]);
        assert!(u.s.is_empty());
        assert!(solve_unperturbed(0).is_err());
    }

    #[test]
    fn unperturbed_is_fixed_point_of_system() {
        let u = solve_unperturbed(4).unwrap();
        let x = pack(&u.alpha, &u.s);
        let g = system_residual(4, &x, f64::INFINITY, &[ProfileConsts::ZERO; 4], 0.0).unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn tau_ratios_compose() {
        let s = [0.5, 0.25, 0.8];
        let r = ln_tau_ratio(&s, 3, 1) + ln_tau_ratio(&s, 1, 0);
        assert!((r - ln_tau_ratio(&s, 3, 0)).abs() < 1e-15);
        assert!((ln_tau_ratio(&s, 0, 2) + ln_tau_ratio(&s, 2, 0)).abs() < 1e-15);
    }

    #[test]
    fn rejects_small_p() {
        assert!(solve_full_system(1, 1.0, |_| Ok(ProfileConsts::ZERO), 0.0).is_err());
    }
}
