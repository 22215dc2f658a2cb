//! The 2k×2k relation matrix of the reduced problem and the barrier
//! functions used for the maximum principle on the necks between bubbles.
//!
//! Barrier inequalities are checked in rescaled coordinates `y = x/δ_j` and
//! in log form, so none of the tiny `δ_j` ever appears unlogged.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrals::closed_form_i;
use crate::numerics::{logaddexp, softplus};
use crate::params::ParamSet;
use crate::profiles::V_alpha_log;

// ---------------------------------------------------------------------------
// Matrix

#[derive(Debug, Clone, Serialize)]
pub struct TowerMatrix {
    pub k: usize,
    /// Row-major; columns are ordered `(σ_1, γ_1, σ_2, γ_2, …)`.
    pub entries: Vec<Vec<f64>>,
}

impl TowerMatrix {
    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        let n = 2 * self.k;
        DMatrix::from_fn(n, n, |r, c| self.entries[r][c])
    }
}

pub fn build_matrix(ps: &ParamSet, i_values: &[f64]) -> Result<TowerMatrix> {
    let k = ps.k;
    if i_values.len() != k {
        return Err(Error::Usage(format!(
            "expected {k} values of I, got {}",
            i_values.len()
        )));
    }
    let n = 2 * k;
    let mut m = vec![vec![0.0; n]; n];
    for j in 0..k {
        let r1 = &mut m[2 * j];
        for i in 0..j {
            r1[2 * i] = 2.0;
        }
        r1[2 * j] = 1.0;
        r1[2 * j + 1] = i_values[j];
        let r2 = &mut m[2 * j + 1];
        for i in 0..k {
            r2[2 * i] = if i <= j { ps.b[j] } else { ps.b[i] };
        }
        r2[2 * j + 1] = 2.0 * PI;
        for i in j + 1..k {
            r2[2 * i + 1] = 4.0 * PI;
        }
    }
    Ok(TowerMatrix { k, entries: m })
}

/// Matrix with `I_{α_j}` from the closed form.
pub fn build_matrix_closed_form(ps: &ParamSet) -> Result<TowerMatrix> {
    let iv: Vec<f64> = ps.alpha.iter().map(|a| closed_form_i(*a)).collect();
    build_matrix(ps, &iv)
}

/// `A_1` from `B_j = c_j A_{j+1} + B_{j+1}`, `A_j = A_{j+1} + a_j B_j`,
/// starting at `A_{k+1} = 1`, `B_{k+1} = 0`.
pub fn recursion_det(a: &[f64], c: &[f64]) -> f64 {
    let (mut big_a, mut big_b) = (1.0, 0.0);
    for j in (0..a.len()).rev() {
        big_b += c[j] * big_a;
        big_a += a[j] * big_b;
    }
    big_a
}

#[derive(Debug, Clone, Serialize)]
pub struct DetReport {
    pub k: usize,
    pub det: f64,
    /// `(2π)^k A_1` with `a_i = -I_i/(2π)`, `c_i = b_i - b_{i+1}`, `c_k = b_k`.
    pub recursion_det: f64,
    pub rel_diff: f64,
    pub a: Vec<f64>,
    pub c: Vec<f64>,
    pub positive: bool,
    pub recursion_ok: bool,
}

impl DetReport {
    pub fn pass(&self) -> bool {
        self.positive && self.recursion_ok
    }
}

pub fn det_and_recursion_check(tm: &TowerMatrix) -> Result<DetReport> {
    let k = tm.k;
    let det = tm.to_dmatrix().lu().determinant();
    if !det.is_finite() || det == 0.0 {
        return Err(Error::Invariant(format!(
            "relation matrix is singular (det = {det})"
        )));
    }
    let a: Vec<f64> = (0..k)
        .map(|j| -tm.entries[2 * j][2 * j + 1] / (2.0 * PI))
        .collect();
    let b: Vec<f64> = (0..k).map(|j| tm.entries[2 * j + 1][2 * j]).collect();
    let c: Vec<f64> = (0..k)
        .map(|j| if j + 1 < k { b[j] - b[j + 1] } else { b[j] })
        .collect();
    let recursion_det = (2.0 * PI).powi(k as i32) * recursion_det(&a, &c);
    let rel_diff = (det - recursion_det).abs() / det.abs();
    Ok(DetReport {
        k,
        det,
        recursion_det,
        rel_diff,
        a,
        c,
        positive: det > 0.0,
        recursion_ok: rel_diff <= 1e-10,
    })
}

// ---------------------------------------------------------------------------
// Barriers

#[derive(Debug, Clone, Serialize)]
pub struct BarrierConfig {
    pub c0: f64,
    pub eta: f64,
    pub m_radius: f64,
    pub c_bar: f64,
    pub d_under: f64,
    pub d_over: f64,
    pub lambda: Vec<f64>,
    #[serde(rename = "Lambda")]
    pub big_lambda: Vec<f64>,
    /// Radii after calibration; `r_tilde[0]` is unused.
    #[serde(rename = "R_tilde")]
    pub big_r_tilde: Vec<f64>,
    pub r_tilde: Vec<f64>,
    /// Radii straight from the threshold formulas.
    #[serde(rename = "R_tilde_threshold")]
    pub big_r_threshold: Vec<f64>,
    pub r_tilde_threshold: Vec<f64>,
    /// Factor by which `R̃` was enlarged and `r̃` shrunk to close the combined bound.
    pub calibration: f64,
}

/// `R̃ ≥ max{λ^{-1}((1+c₀)/(1-c₀))^{1/α}, ((√(D/(c₀λ^α)) - 1)/(1 - √(Dλ^α/c₀)))^{1/α}}`.
pub fn r_tilde_under(alpha: f64, c0: f64, lambda: f64, d: f64) -> Result<f64> {
    let la = lambda.powf(alpha);
    let s = (d * la / c0).sqrt();
    if s >= 1.0 {
        return Err(Error::Usage(format!(
            "lambda^alpha = {la} too large for D = {d}"
        )));
    }
    let first = ((1.0 + c0) / (1.0 - c0)).powf(1.0 / alpha) / lambda;
    let second = (((d / (c0 * la)).sqrt() - 1.0) / (1.0 - s)).powf(1.0 / alpha);
    Ok(first.max(second))
}

/// `r̃ ≤ min{Λ^{-1}((1-c₀)/(1+c₀))^{1/α}, ((1 - √(D/(c₀Λ^α)))/(√(DΛ^α/c₀) - 1))^{1/α}}`.
pub fn r_tilde_over(alpha: f64, c0: f64, big_lambda: f64, d: f64) -> Result<f64> {
    let la = big_lambda.powf(alpha);
    let s = (d / (c0 * la)).sqrt();
    if s >= 1.0 {
        return Err(Error::Usage(format!(
            "Lambda^alpha = {la} too small for D = {d}"
        )));
    }
    let first = ((1.0 - c0) / (1.0 + c0)).powf(1.0 / alpha) / big_lambda;
    let second = ((1.0 - s) / ((d * la / c0).sqrt() - 1.0)).powf(1.0 / alpha);
    Ok(first.min(second))
}

impl BarrierConfig {
    /// `D̲ = D̄ = kC̄ + 1`, `λ_j^{α_j} = c₀/(4D)`, `Λ_j^{α_j} = 4D/c₀`.
    pub fn new(ps: &ParamSet, c_bar: f64, c0: f64, eta: f64) -> Result<Self> {
        if !(c0 > 0.0 && c0 < 1.0) {
            return Err(Error::Usage(format!("c0 must lie in (0,1), got {c0}")));
        }
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::Usage(format!("eta must lie in (0,1), got {eta}")));
        }
        let k = ps.k;
        let d = k as f64 * c_bar + 1.0;
        let mut lambda = Vec::with_capacity(k);
        let mut big_lambda = Vec::with_capacity(k);
        let mut big_r = Vec::with_capacity(k);
        let mut small_r = Vec::with_capacity(k);
        for &a in &ps.alpha {
            let l = (c0 / (4.0 * d)).powf(1.0 / a);
            let bl = (4.0 * d / c0).powf(1.0 / a);
            lambda.push(l);
            big_lambda.push(bl);
            big_r.push(r_tilde_under(a, c0, l, d)?);
            small_r.push(r_tilde_over(a, c0, bl, d)?);
        }
        Ok(BarrierConfig {
            c0,
            eta,
            m_radius: 5.0,
            c_bar,
            d_under: d,
            d_over: d,
            lambda,
            big_lambda,
            big_r_tilde: big_r.clone(),
            r_tilde: small_r.clone(),
            big_r_threshold: big_r,
            r_tilde_threshold: small_r,
            calibration: 1.0,
        })
    }

    fn with_calibration(&self, f: f64) -> Self {
        let mut c = self.clone();
        c.calibration = f;
        c.big_r_tilde = self.big_r_threshold.iter().map(|r| r * f).collect();
        c.r_tilde = self.r_tilde_threshold.iter().map(|r| r / f).collect();
        c
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BarrierCheck {
    pub name: String,
    pub j: usize,
    pub pass: bool,
    /// Smallest log-slack over the samples; negative means violated.
    pub min_margin: f64,
    pub margin_at_threshold: f64,
    pub argmin_ln_y: f64,
    /// Whether the smallest slack sits at the threshold radius.
    pub min_at_threshold: bool,
    pub samples: usize,
}

fn log_samples(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|m| lo + (hi - lo) * m as f64 / (n - 1) as f64)
        .collect()
}

fn summarize(
    name: &str,
    j: usize,
    pts: &[f64],
    margins: &[f64],
    threshold_idx: usize,
) -> BarrierCheck {
    let (mut idx, mut min) = (0, f64::INFINITY);
    for (m, v) in margins.iter().enumerate() {
        if *v < min {
            min = *v;
            idx = m;
        }
    }
    BarrierCheck {
        name: name.into(),
        j: j + 1,
        pass: min >= -1e-12,
        min_margin: min,
        margin_at_threshold: margins[threshold_idx],
        argmin_ln_y: pts[idx],
        min_at_threshold: idx == threshold_idx,
        samples: pts.len(),
    }
}

/// `ln Ψ^u(y)` with `Ψ^u = -z(λy) = tanh(α(ln λ + ln y)/2)`.
fn ln_psi_under(alpha: f64, ln_lambda: f64, ln_y: f64) -> f64 {
    (0.5 * alpha * (ln_lambda + ln_y)).tanh().ln()
}

/// Both inequalities for `Ψ^u_j` on `R̃_j ≤ y ≤ 1/δ_j`.
pub fn barrier_under_check(
    cfg: &BarrierConfig,
    ps: &ParamSet,
    j: usize,
    samples: usize,
) -> Vec<BarrierCheck> {
    let a = ps.alpha[j];
    let ll = cfg.lambda[j].ln();
    let pts = log_samples(cfg.big_r_tilde[j].ln(), -ps.ln_delta[j], samples.max(2));
    let psi: Vec<f64> = pts
        .iter()
        .map(|u| ln_psi_under(a, ll, *u) - cfg.c0.ln())
        .collect();
    // -ΔΨ / (|x|^{α-2}e^U) = λ^α (1+y^α)²/(1+(λy)^α)² Ψ in rescaled form.
    let lap: Vec<f64> = pts
        .iter()
        .map(|u| {
            a * ll + 2.0 * softplus(a * u) - 2.0 * softplus(a * (ll + u)) + ln_psi_under(a, ll, *u)
                - cfg.d_under.ln()
        })
        .collect();
    vec![
        summarize("Psi_under >= c0", j, &pts, &psi, 0),
        summarize("Delta Psi_under <= -D |x|^(a-2) e^U", j, &pts, &lap, 0),
    ]
}

/// Both inequalities for `Ψ^o_j = z(Λy)` on `0 < y ≤ r̃_j`.
pub fn barrier_over_check(
    cfg: &BarrierConfig,
    ps: &ParamSet,
    j: usize,
    samples: usize,
) -> Vec<BarrierCheck> {
    let a = ps.alpha[j];
    let lb = cfg.big_lambda[j].ln();
    let hi = cfg.r_tilde[j].ln();
    let pts = log_samples(hi - 60.0 / a, hi, samples.max(2));
    let last = pts.len() - 1;
    let ln_psi = |u: f64| (-0.5 * a * (lb + u)).tanh().ln();
    let psi: Vec<f64> = pts.iter().map(|u| ln_psi(*u) - cfg.c0.ln()).collect();
    let lap: Vec<f64> = pts
        .iter()
        .map(|u| {
            a * lb + 2.0 * softplus(a * u) - 2.0 * softplus(a * (lb + u)) + ln_psi(*u)
                - cfg.d_over.ln()
        })
        .collect();
    vec![
        summarize("Psi_over >= c0", j, &pts, &psi, last),
        summarize("Delta Psi_over <= -D |x|^(a-2) e^U", j, &pts, &lap, last),
    ]
}

/// Constants of `ψ_j(r) = -δ^η/(η²r^η) + C₁ ln r + C₂` vanishing at `R̃δ` and `M`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PsiConstants {
    pub c1: f64,
    pub c2: f64,
    pub ln_r_max: f64,
    pub max_value: f64,
    /// `1/(η² R̃^η)`.
    pub bound: f64,
}

pub fn psi_constants(cfg: &BarrierConfig, ps: &ParamSet, j: usize) -> PsiConstants {
    let eta = cfg.eta;
    let l = ps.ln_delta[j];
    let lm = cfg.m_radius.ln();
    let lr = cfg.big_r_tilde[j].ln();
    let e2 = eta * eta;
    let c1 = ((eta * (l - lm)).exp() - (-eta * lr).exp()) / (e2 * (lm - lr - l));
    let c2 = (eta * (l - lm)).exp() / e2 - c1 * lm;
    let ln_r_max = l + (-1.0 / (eta * c1)).ln() / eta;
    let consts = PsiConstants {
        c1,
        c2,
        ln_r_max,
        max_value: 0.0,
        bound: (-eta * lr).exp() / e2,
    };
    PsiConstants {
        max_value: psi_value(&consts, eta, l, ln_r_max),
        ..consts
    }
}

fn psi_value(c: &PsiConstants, eta: f64, ln_delta: f64, ln_r: f64) -> f64 {
    -(eta * (ln_delta - ln_r)).exp() / (eta * eta) + c.c1 * ln_r + c.c2
}

/// `r²Δψ = ∂_t²ψ` in `t = ln r`; with `∂_t ψ = δ^η/(η r^η) + C₁` the
/// logarithmic and constant parts drop out.
fn psi_r2_laplacian(eta: f64, ln_delta: f64, ln_r: f64) -> f64 {
    -(eta * (ln_delta - ln_r)).exp()
}

#[derive(Debug, Clone, Serialize)]
pub struct PsiReport {
    pub j: usize,
    pub constants: PsiConstants,
    pub boundary_inner: f64,
    pub boundary_outer: f64,
    pub min_value: f64,
    /// `max |r^{2+η}(-Δψ)/δ^η - 1|` over the samples.
    pub equation_residual: f64,
    pub tilde_max: f64,
    pub tilde_bound: f64,
    pub tilde_min: f64,
    pub checks: Vec<(String, bool)>,
}

impl PsiReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.1)
    }
}

pub fn psi_profiles_check(
    cfg: &BarrierConfig,
    ps: &ParamSet,
    j: usize,
    samples: usize,
) -> PsiReport {
    let eta = cfg.eta;
    let l = ps.ln_delta[j];
    let c = psi_constants(cfg, ps, j);
    let lo = cfg.big_r_tilde[j].ln() + l;
    let hi = cfg.m_radius.ln();
    let scale = c.bound.max(1e-300);
    let b_in = psi_value(&c, eta, l, lo) / scale;
    let b_out = psi_value(&c, eta, l, hi) / scale;
    let pts = log_samples(lo, hi, samples.max(2));
    let mut min_value = f64::INFINITY;
    let mut eq_res = 0.0_f64;
    let mut max_sampled = f64::NEG_INFINITY;
    for &t in &pts {
        let v = psi_value(&c, eta, l, t);
        min_value = min_value.min(v);
        max_sampled = max_sampled.max(v);
        let lap = psi_r2_laplacian(eta, l, t);
        // -Δψ · r^{2+η}/δ^η
        let ratio = -lap / (eta * (l - t)).exp();
        eq_res = eq_res.max((ratio - 1.0).abs());
    }
    // ψ̃_j on B_{r̃_jδ_j}: (r̃² - (r/δ)²)/4.
    let (tilde_max, tilde_min, tilde_bound) = if j > 0 {
        let rt = cfg.r_tilde[j];
        let ys = log_samples(rt.ln() - 40.0, rt.ln(), samples.max(2));
        let vals: Vec<f64> = ys
            .iter()
            .map(|u| 0.25 * (rt * rt - (2.0 * u).exp()))
            .collect();
        let mx = vals
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
            .max(0.25 * rt * rt);
        let mn = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        (mx, mn, 0.25 * rt * rt)
    } else {
        (0.0, 0.0, 0.0)
    };
    let checks = vec![
        ("C1 < 0".to_string(), c.c1 < 0.0),
        ("C2 > 0".to_string(), c.c2 > 0.0),
        (
            "psi vanishes on both boundary circles".to_string(),
            b_in.abs() < 1e-10 && b_out.abs() < 1e-10,
        ),
        ("psi >= 0".to_string(), min_value >= -1e-12 * scale),
        (
            "-Laplacian psi = delta^eta / r^(2+eta)".to_string(),
            eq_res < 1e-12,
        ),
        (
            "max psi < 1/(eta^2 R^eta)".to_string(),
            c.max_value < c.bound && max_sampled <= c.max_value * (1.0 + 1e-12),
        ),
        (
            "0 <= psi_tilde <= r_tilde^2/4".to_string(),
            tilde_min >= -1e-15 && tilde_max <= tilde_bound * (1.0 + 1e-15),
        ),
    ];
    PsiReport {
        j: j + 1,
        constants: c,
        boundary_inner: b_in,
        boundary_outer: b_out,
        min_value,
        equation_residual: eq_res,
        tilde_max,
        tilde_bound,
        tilde_min,
        checks,
    }
}

/// Mass decomposition bounds for bubble `i` in rescaled form.
pub fn mass_decomp_check(
    alpha: f64,
    big_r: f64,
    small_r: Option<f64>,
    eta: f64,
    samples: usize,
    index: usize,
) -> Vec<BarrierCheck> {
    let l2 = (2.0 * alpha * alpha).ln();
    let lr = big_r.ln();
    let pts = log_samples(lr, lr + 40.0, samples.max(2));
    let m: Vec<f64> = pts
        .iter()
        .map(|u| l2 + (eta - alpha) * lr - (2.0 + eta) * u - V_alpha_log(alpha, *u))
        .collect();
    let mut out = vec![summarize("mass decay outside R_tilde", index, &pts, &m, 0)];
    if let Some(rt) = small_r {
        let lt = rt.ln();
        let pts = log_samples(lt - 40.0, lt, samples.max(2));
        let m: Vec<f64> = pts
            .iter()
            .map(|u| l2 + (alpha - 2.0) * lt - V_alpha_log(alpha, *u))
            .collect();
        out.push(summarize(
            "mass bound inside r_tilde",
            index,
            &pts,
            &m,
            pts.len() - 1,
        ));
    }
    out
}

/// `ln(Σ_i |x|^{α_i-2}e^{U_i})` at `ln|x|`.
fn ln_total_mass(ps: &ParamSet, ln_r: f64) -> f64 {
    let mut acc = f64::NEG_INFINITY;
    for i in 0..ps.k {
        let li = ps.ln_delta[i];
        acc = logaddexp(acc, V_alpha_log(ps.alpha[i], ln_r - li) - 2.0 * li);
    }
    acc
}

/// `C̄ Σ mass_i (ψ_j + ψ̃_{j+1}) ≤ ½(δ_j^η/r^{2+η} + 1/δ_{j+1}²)` on the neck
/// `R̃_jδ_j ≤ |x| ≤ r̃_{j+1}δ_{j+1}` (up to `|x| = 1` for the last bubble).
pub fn lpopsi_check(cfg: &BarrierConfig, ps: &ParamSet, j: usize, samples: usize) -> BarrierCheck {
    let eta = cfg.eta;
    let lj = ps.ln_delta[j];
    let c = psi_constants(cfg, ps, j);
    let lo = cfg.big_r_tilde[j].ln() + lj;
    let (hi, next) = if j + 1 < ps.k {
        (
            cfg.r_tilde[j + 1].ln() + ps.ln_delta[j + 1],
            Some((cfg.r_tilde[j + 1], ps.ln_delta[j + 1])),
        )
    } else {
        (0.0, None)
    };
    let pts = log_samples(lo, hi, samples.max(2));
    let margins: Vec<f64> = pts
        .par_iter()
        .map(|&t| {
            let mut barrier = psi_value(&c, eta, lj, t).max(0.0);
            let mut rhs = eta * (lj - t) - 2.0 * t;
            if let Some((rt, ln_next)) = next {
                barrier += 0.25 * (rt * rt - (2.0 * (t - ln_next)).exp());
                rhs = logaddexp(rhs, -2.0 * ln_next);
            }
            let lhs = cfg.c_bar.ln() + ln_total_mass(ps, t) + barrier.max(1e-300).ln();
            rhs + 0.5f64.ln() - lhs
        })
        .collect();
    summarize("combined supersolution bound", j, &pts, &margins, 0)
}

#[derive(Debug, Clone, Serialize)]
pub struct BarrierReport {
    /// Radii from the threshold formulas; the single-bubble inequalities are checked here.
    pub threshold_config: BarrierConfig,
    /// Calibrated radii used for the combined bound and for `ψ_j`.
    pub config: BarrierConfig,
    pub checks: Vec<BarrierCheck>,
    pub psi: Vec<PsiReport>,
    pub all_pass: bool,
}

/// Run every barrier check. The combined bound is closed by enlarging `R̃`
/// and shrinking `r̃` by powers of two; shrinking the regions keeps the
/// single-bubble inequalities valid.
pub fn barrier_report(
    ps: &ParamSet,
    c_bar: f64,
    c0: f64,
    eta: f64,
    samples: usize,
) -> Result<BarrierReport> {
    let base = BarrierConfig::new(ps, c_bar, c0, eta)?;
    let mut cfg = base.clone();
    let mut f = 1.0;
    for _ in 0..60 {
        cfg = base.with_calibration(f);
        if (0..ps.k).all(|j| lpopsi_check(&cfg, ps, j, samples).pass) {
            break;
        }
        f *= 2.0;
    }
    let k = ps.k;
    let mut checks = Vec::new();
    for j in 0..k {
        checks.extend(barrier_under_check(&base, ps, j, samples));
        if j > 0 {
            checks.extend(barrier_over_check(&base, ps, j, samples));
        }
        let small = if j > 0 { Some(base.r_tilde[j]) } else { None };
        checks.extend(mass_decomp_check(
            ps.alpha[j],
            base.big_r_tilde[j],
            small,
            eta,
            samples,
            j,
        ));
        checks.push(lpopsi_check(&cfg, ps, j, samples));
    }
    let psi: Vec<PsiReport> = (0..k)
        .map(|j| psi_profiles_check(&cfg, ps, j, samples))
        .collect();
    let all_pass = checks.iter().all(|c| c.pass) && psi.iter().all(|p| p.pass());
    Ok(BarrierReport {
        threshold_config: base,
        config: cfg,
        checks,
        psi,
        all_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recursion_k1() {
        assert_eq!(recursion_det(&[0.5], &[2.0]), 2.0);
    }

    #[test]
    fn threshold_formulas_with_half() {
        let d = 3.0;
        let a = 2.0;
        let l = (0.5_f64 / (4.0 * d)).powf(1.0 / a);
        let r = r_tilde_under(a, 0.5, l, d).unwrap();
        assert!((r - (24.0 * d).powf(0.5)).abs() < 1e-12);
        let bl = (4.0 * d / 0.5).powf(1.0 / a);
        let s = r_tilde_over(a, 0.5, bl, d).unwrap();
        assert!((s - (24.0 * d).powf(-0.5)).abs() < 1e-12);
    }

    #[test]
    fn under_barrier_rejects_large_lambda() {
        assert!(r_tilde_under(2.0, 0.5, 1.0, 10.0).is_err());
    }
}
