//! The approximate solution on the unit disk, its annulus partition, and the
//! weighted residual.
//!
//! Every evaluation happens in log radius. Inside annulus `j` the tower is
//! written as `U_p = (-1)^{j-1} τ_j p Q` with `Q = S/p`, where `S` collects
//! every projected bubble scaled by `±τ_i/τ_j`. The amplitude constraint turns
//! `|U_p|^{p-1}U_p` into `(-1)^{j-1}(τ_j/δ_j²) sgn(Q)|Q|^p`, so after
//! multiplying by the weight `δ_j²(1+|y|^{2+η})` every factor is O(1).

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{find_root, logaddexp, softplus, RootBracket};
use crate::params::ParamSet;
use crate::profiles::{correction_profiles, phi0, phi1, CorrectionProfiles, V_alpha_log};

const EXP_GUARD: f64 = 700.0;

#[derive(Debug, Clone, Serialize)]
pub struct AnnulusPartition {
    pub k: usize,
    /// `ln` of the inner radius of `A_j` (`-∞` for the innermost annulus).
    pub ln_inner: Vec<f64>,
    pub ln_outer: Vec<f64>,
    /// `ln` of the radii bounding `B_j = {V_j(x/δ_j) > -p/2}`.
    pub ln_b_inner: Vec<f64>,
    pub ln_b_outer: Vec<f64>,
    /// Leading-order radii `δ_j e^{-p/(2(α_j-2))}` and `δ_j e^{p/(2(α_j+2))}`, logged.
    pub ln_b_inner_leading: Vec<f64>,
    pub ln_b_outer_leading: Vec<f64>,
    pub inclusion: Vec<bool>,
}

impl AnnulusPartition {
    pub fn all_included(&self) -> bool {
        self.inclusion.iter().all(|b| *b)
    }

    /// Index of the annulus containing `|x| = e^{ln_r}`.
    pub fn annulus_of(&self, ln_r: f64) -> usize {
        self.ln_outer
            .iter()
            .position(|o| ln_r <= *o)
            .unwrap_or(self.k - 1)
    }
}

/// Level set `{V_α(y) > -p/2}` in `ln y`.
fn b_bounds(alpha: f64, p: f64) -> Result<(f64, f64)> {
    let level = -0.5 * p;
    let f = |u: f64| V_alpha_log(alpha, u) - level;
    let c = (2.0 * alpha * alpha).ln() + 0.5 * p;
    let u_peak = if alpha > 2.0 {
        let sig: f64 = (alpha - 2.0) / (2.0 * alpha);
        (sig / (1.0 - sig)).ln() / alpha
    } else {
        f64::NEG_INFINITY
    };
    let outer_lo = if u_peak.is_finite() { u_peak } else { -1.0 };
    let outer = find_root(
        f,
        RootBracket::new(outer_lo, c / (alpha + 2.0) + 50.0).with_tol(1e-13),
    )?;
    let inner = if alpha > 2.0 {
        find_root(
            f,
            RootBracket::new(-c / (alpha - 2.0) - 50.0, u_peak).with_tol(1e-13),
        )?
    } else {
        f64::NEG_INFINITY
    };
    Ok((inner, outer))
}

pub fn build_partition(ps: &ParamSet) -> Result<AnnulusPartition> {
    let k = ps.k;
    let l = &ps.ln_delta;
    let mut ln_outer = Vec::with_capacity(k);
    for j in 0..k {
        if j + 1 < k {
            ln_outer.push(ps.eps[j] * l[j] + (1.0 - ps.eps[j]) * l[j + 1]);
        } else {
            ln_outer.push(0.0);
        }
    }
    let mut ln_inner = vec![f64::NEG_INFINITY];
    ln_inner.extend_from_slice(&ln_outer[..k - 1]);
    let mut ln_b_inner = Vec::with_capacity(k);
    let mut ln_b_outer = Vec::with_capacity(k);
    let mut ln_b_inner_leading = Vec::with_capacity(k);
    let mut ln_b_outer_leading = Vec::with_capacity(k);
    let mut inclusion = Vec::with_capacity(k);
    for j in 0..k {
        let a = ps.alpha[j];
        let (bi, bo) = b_bounds(a, ps.p)?;
        let (bi, bo) = (bi + l[j], bo + l[j]);
        ln_b_inner.push(bi);
        ln_b_outer.push(bo);
        ln_b_inner_leading.push(if a > 2.0 {
            l[j] - ps.p / (2.0 * (a - 2.0))
        } else {
            f64::NEG_INFINITY
        });
        ln_b_outer_leading.push(l[j] + ps.p / (2.0 * (a + 2.0)));
        inclusion.push(bi >= ln_inner[j] && bo <= ln_outer[j] && bi < bo);
    }
    let ordered = ln_outer.windows(2).all(|w| w[0] < w[1]);
    if !ordered {
        return Err(Error::Invariant("annulus radii are not increasing".into()));
    }
    Ok(AnnulusPartition {
        k,
        ln_inner,
        ln_outer,
        ln_b_inner,
        ln_b_outer,
        ln_b_inner_leading,
        ln_b_outer_leading,
        inclusion,
    })
}

/// The assembled approximation with cached projection constants.
#[derive(Debug, Clone)]
pub struct TowerApprox {
    pub params: ParamSet,
    pub profiles: Vec<Arc<CorrectionProfiles>>,
    pub partition: AnnulusPartition,
    pub eta: f64,
    /// Boundary values `U_i(1)`, `w⁰_i(1/δ_i)`, `w¹_i(1/δ_i)` removed by the projection.
    pub boundary_u: Vec<f64>,
    pub boundary_w0: Vec<f64>,
    pub boundary_w1: Vec<f64>,
}

/// Pieces of the tower at one point, seen from annulus `j`.
#[derive(Debug, Clone, Copy)]
struct Local {
    s: f64,
    v: f64,
    w0: f64,
    w1: f64,
}

impl TowerApprox {
    pub fn new(params: ParamSet, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::Usage(format!("eta must lie in (0,1), got {eta}")));
        }
        let partition = build_partition(&params)?;
        let profiles = params
            .alpha
            .iter()
            .map(|a| correction_profiles(*a))
            .collect::<Result<Vec<_>>>()?;
        let mut boundary_u = Vec::with_capacity(params.k);
        let mut boundary_w0 = Vec::with_capacity(params.k);
        let mut boundary_w1 = Vec::with_capacity(params.k);
        for i in 0..params.k {
            let (a, l) = (params.alpha[i], params.ln_delta[i]);
            boundary_u.push((2.0 * a * a).ln() + a * l - 2.0 * softplus(a * l));
            boundary_w0.push(profiles[i].w0.eval_log(-l));
            boundary_w1.push(profiles[i].w1.eval_log(-l));
        }
        Ok(TowerApprox {
            params,
            profiles,
            partition,
            eta,
            boundary_u,
            boundary_w0,
            boundary_w1,
        })
    }

    pub fn k(&self) -> usize {
        self.params.k
    }

    fn sign(j: usize) -> f64 {
        if j % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Projected profile of bubble `i` at `ln|x|`, divided by nothing.
    fn projected(&self, i: usize, ln_r: f64) -> f64 {
        let ps = &self.params;
        let (a, l, p) = (ps.alpha[i], ps.ln_delta[i], ps.p);
        let pu = 2.0 * softplus(a * l) - 2.0 * logaddexp(a * l, a * ln_r);
        let prof = &self.profiles[i];
        let pw0 = prof.w0.eval_log(ln_r - l) - self.boundary_w0[i];
        let pw1 = prof.w1.eval_log(ln_r - l) - self.boundary_w1[i];
        pu + pw0 / p + pw1 / (p * p)
    }

    fn local(&self, j: usize, ln_r: f64) -> Local {
        let ps = &self.params;
        let mut s = 0.0;
        for i in 0..ps.k {
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            s += sign * ps.ln_tau_ratio(i, j).exp() * self.projected(i, ln_r);
        }
        let ln_y = ln_r - ps.ln_delta[j];
        let prof = &self.profiles[j];
        Local {
            s,
            v: V_alpha_log(ps.alpha[j], ln_y),
            w0: prof.w0.eval_log(ln_y),
            w1: prof.w1.eval_log(ln_y),
        }
    }

    fn check_radius(ln_r: f64) -> Result<()> {
        if ln_r > 1e-12 || ln_r.is_nan() {
            return Err(Error::OutOfDomain(format!("ln|x| = {ln_r}")));
        }
        Ok(())
    }

    /// `U_p` at `|x| = e^{ln_r}`.
    pub fn eval_ln_r(&self, ln_r: f64) -> Result<f64> {
        Self::check_radius(ln_r)?;
        let j = self.partition.annulus_of(ln_r);
        let loc = self.local(j, ln_r);
        Ok(Self::sign(j) * self.params.tau[j] * loc.s)
    }

    /// `U_p(δ_j y)` with `y = e^{ln_y}`, assembled in the coordinates of annulus `j`.
    pub fn eval_tower(&self, j: usize, ln_y: f64) -> Result<f64> {
        let ln_r = ln_y + self.params.ln_delta[j];
        Self::check_radius(ln_r)?;
        let loc = self.local(j, ln_r);
        Ok(Self::sign(j) * self.params.tau[j] * loc.s)
    }

    /// `Q - (1 + V/p + w⁰/p² + w¹/p³)` in annulus `j`.
    pub fn upexp_deviation(&self, j: usize, ln_y: f64) -> Result<f64> {
        let p = self.params.p;
        let ln_r = ln_y + self.params.ln_delta[j];
        Self::check_radius(ln_r)?;
        let loc = self.local(j, ln_r);
        Ok((loc.s - p) / p - (loc.v / p + loc.w0 / (p * p) + loc.w1 / (p * p * p)))
    }

    /// `g_p(U_p)/((-1)^{j-1}τ_j |x|^{α_j-2}e^{U_j}) - [1 + (w⁰-φ⁰)/p + (w¹-φ¹)/p²]`.
    pub fn gpgpp_deviation(&self, j: usize, ln_y: f64) -> Result<f64> {
        let p = self.params.p;
        let ln_r = ln_y + self.params.ln_delta[j];
        Self::check_radius(ln_r)?;
        let loc = self.local(j, ln_r);
        let q = (loc.s - p) / p;
        if q <= -1.0 {
            return Err(Error::Domain("tower changes sign at this point".into()));
        }
        let d = p * q.ln_1p() - loc.v;
        Ok(d.exp_m1() - beta(loc.v, loc.w0, loc.w1, p))
    }

    /// Weighted residual `ρ_p R_p` at `x = δ_j y`.
    pub fn residual_at(&self, j: usize, ln_y: f64) -> Result<f64> {
        let ps = &self.params;
        let p = ps.p;
        let lj = ps.ln_delta[j];
        let ln_r = ln_y + lj;
        Self::check_radius(ln_r)?;
        let loc = self.local(j, ln_r);
        let ln_w = softplus((2.0 + self.eta) * ln_y);
        let q = (loc.s - p) / p;
        let big_q = loc.s / p;

        let bj = beta(loc.v, loc.w0, loc.w1, p);
        let own = loc.v + ln_w;
        guard(own, "own mass")?;
        let mut bracket = if big_q > 0.0 {
            let d = p * q.ln_1p() - loc.v;
            if d < 30.0 {
                own.exp() * (d.exp_m1() - bj)
            } else {
                let e = p * big_q.ln() + ln_w;
                guard(e, "power term")?;
                e.exp() - own.exp() * (1.0 + bj)
            }
        } else {
            let pow = if big_q < 0.0 {
                let e = p * (-big_q).ln() + ln_w;
                guard(e, "power term")?;
                -e.exp()
            } else {
                0.0
            };
            pow - own.exp() * (1.0 + bj)
        };
        for i in 0..ps.k {
            if i == j {
                continue;
            }
            let li = ps.ln_delta[i];
            let ln_yi = ln_r - li;
            let vi = V_alpha_log(ps.alpha[i], ln_yi);
            let e = ps.ln_tau_ratio(i, j) + vi + 2.0 * (lj - li) + ln_w;
            guard(e, "cross mass")?;
            let prof = &self.profiles[i];
            let bi = beta(vi, prof.w0.eval_log(ln_yi), prof.w1.eval_log(ln_yi), p);
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            bracket -= sign * e.exp() * (1.0 + bi);
        }
        Ok(Self::sign(j) * ps.tau[j] * bracket)
    }

    /// `ln(ρ_j δ_j² |x|^{α_i-2} e^{U_i})` for a foreign bubble `i`, i.e. the
    /// weighted mass of bubble `i` seen in annulus `j`.
    pub fn cross_weighted_mass(&self, i: usize, j: usize, ln_y: f64) -> f64 {
        let ps = &self.params;
        let ln_r = ln_y + ps.ln_delta[j];
        V_alpha_log(ps.alpha[i], ln_r - ps.ln_delta[i])
            + 2.0 * (ps.ln_delta[j] - ps.ln_delta[i])
            + softplus((2.0 + self.eta) * ln_y)
    }

    /// `ln(W_p / (|x|^{α_j-2}e^{U_j})) = (p-1) ln|Q| - V_j`.
    pub fn ln_potential_ratio(&self, j: usize, ln_y: f64) -> f64 {
        let ps = &self.params;
        let loc = self.local(j, ln_y + ps.ln_delta[j]);
        (ps.p - 1.0) * (loc.s / ps.p).abs().ln() - loc.v
    }
}

fn beta(v: f64, w0: f64, w1: f64, p: f64) -> f64 {
    (w0 - phi0(v)) / p + (w1 - phi1(v, w0)) / (p * p)
}

fn guard(exponent: f64, context: &str) -> Result<()> {
    if exponent > EXP_GUARD {
        return Err(Error::Overflow {
            exponent,
            context: context.into(),
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Sampling

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormGrid {
    pub points_per_annulus: usize,
    /// Density multiplier near the boundaries of each `B_j`.
    pub refine: usize,
    /// Lower end of `ln y` in the innermost annulus.
    pub innermost_ln_y: f64,
}

impl Default for NormGrid {
    fn default() -> Self {
        NormGrid {
            points_per_annulus: 512,
            refine: 4,
            innermost_ln_y: -20.0,
        }
    }
}

impl TowerApprox {
    /// Range of `ln y` covering annulus `j`.
    pub fn annulus_range(&self, j: usize, grid: &NormGrid) -> (f64, f64) {
        let l = self.params.ln_delta[j];
        let lo = if j == 0 {
            grid.innermost_ln_y
        } else {
            self.partition.ln_inner[j] - l
        };
        (lo, self.partition.ln_outer[j] - l)
    }

    /// Sample points in `ln y` for annulus `j`, refined around `∂B_j`.
    pub fn annulus_samples(&self, j: usize, grid: &NormGrid) -> Vec<f64> {
        let (lo, hi) = self.annulus_range(j, grid);
        let n = grid.points_per_annulus.max(2);
        let h = (hi - lo) / (n - 1) as f64;
        let mut pts: Vec<f64> = (0..n).map(|m| lo + h * m as f64).collect();
        let l = self.params.ln_delta[j];
        let fine = h / grid.refine.max(1) as f64;
        for b in [
            self.partition.ln_b_inner[j] - l,
            self.partition.ln_b_outer[j] - l,
        ] {
            if !b.is_finite() {
                continue;
            }
            let half = 8.0 * h;
            let mut u = b - half;
            while u <= b + half {
                if u > lo && u < hi {
                    pts.push(u);
                }
                u += fine;
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    fn in_b(&self, j: usize, ln_y: f64) -> bool {
        let l = self.params.ln_delta[j];
        ln_y > self.partition.ln_b_inner[j] - l && ln_y < self.partition.ln_b_outer[j] - l
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NormReport {
    pub p: f64,
    pub norm: f64,
    pub per_annulus_sup: Vec<f64>,
    /// `ln y` where each annulus attains its sup.
    pub sup_ln_y: Vec<f64>,
    pub sup_in_b: Vec<f64>,
    pub sup_outside_b: Vec<f64>,
    pub samples: usize,
}

/// `‖R_p‖_ρ = sup |ρ_p R_p|` over the sampled radii.
pub fn weighted_norm(ta: &TowerApprox, grid: &NormGrid) -> Result<NormReport> {
    let k = ta.k();
    let mut per = vec![0.0; k];
    let mut at = vec![f64::NAN; k];
    let mut inb = vec![0.0; k];
    let mut outb = vec![0.0; k];
    let mut count = 0;
    for j in 0..k {
        let pts = ta.annulus_samples(j, grid);
        count += pts.len();
        let vals: Vec<(f64, f64)> = pts
            .par_iter()
            .map(|&u| ta.residual_at(j, u).map(|r| (u, r.abs())))
            .collect::<Result<_>>()?;
        for (u, r) in vals {
            if r > per[j] {
                per[j] = r;
                at[j] = u;
            }
            if ta.in_b(j, u) {
                inb[j] = f64::max(inb[j], r);
            } else {
                outb[j] = f64::max(outb[j], r);
            }
        }
    }
    let norm = per.iter().cloned().fold(0.0, f64::max);
    Ok(NormReport {
        p: ta.params.p,
        norm,
        per_annulus_sup: per,
        sup_ln_y: at,
        sup_in_b: inb,
        sup_outside_b: outb,
        samples: count,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualScan {
    pub k: usize,
    pub eta: f64,
    pub p_values: Vec<f64>,
    pub norms: Vec<f64>,
    pub reports: Vec<NormReport>,
    /// Least-squares slope of `ln ‖R_p‖_ρ` against `ln p`.
    pub slope: f64,
}

pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub fn residual_scan(
    k: usize,
    p_values: &[f64],
    eta: f64,
    h0: f64,
    grid: &NormGrid,
) -> Result<ResidualScan> {
    if p_values.len() < 2 {
        return Err(Error::Usage(
            "a residual scan needs at least two values of p".into(),
        ));
    }
    let reports = p_values
        .par_iter()
        .map(|&p| {
            let ps = crate::params::solve(k, p, h0)?;
            let ta = TowerApprox::new(ps, eta)?;
            weighted_norm(&ta, grid)
        })
        .collect::<Result<Vec<_>>>()?;
    let norms: Vec<f64> = reports.iter().map(|r| r.norm).collect();
    let slope = loglog_slope(p_values, &norms);
    Ok(ResidualScan {
        k,
        eta,
        p_values: p_values.to_vec(),
        norms,
        reports,
        slope,
    })
}

/// Number of sign-alternating radial regions of `U_p` on `(0, 1)`.
pub fn nodal_count(ta: &TowerApprox) -> usize {
    let grid = NormGrid {
        points_per_annulus: 4096,
        refine: 1,
        innermost_ln_y: -40.0,
    };
    let mut prev = 0.0_f64;
    let mut changes = 0;
    for j in 0..ta.k() {
        let (lo, hi) = ta.annulus_range(j, &grid);
        let n = grid.points_per_annulus;
        for m in 0..n {
            let u = lo + (hi - lo) * m as f64 / n as f64;
            let loc = ta.local(j, u + ta.params.ln_delta[j]);
            let v = TowerApprox::sign(j) * loc.s;
            if v == 0.0 {
                continue;
            }
            if prev != 0.0 && v.signum() != prev.signum() {
                changes += 1;
            }
            prev = v;
        }
    }
    changes + 1
}

#[derive(Debug, Clone, Serialize)]
pub struct PotentialReport {
    pub p: f64,
    /// Smallest `C̄` with `W_p ≤ C̄ |x|^{α_j-2}e^{U_j}` on each sampled `A_j`.
    pub c_bar: Vec<f64>,
    /// Smallest `C` with `V_j ≥ -p - C` on each sampled `A_j/δ_j`.
    pub c_v: Vec<f64>,
    /// `V_j + p` at the inner and outer ends of `A_j/δ_j`.
    pub v_plus_p_inner: Vec<f64>,
    pub v_plus_p_outer: Vec<f64>,
}

impl PotentialReport {
    pub fn max_c_bar(&self) -> f64 {
        self.c_bar.iter().cloned().fold(0.0, f64::max)
    }
}

pub fn potential_bound_check(ta: &TowerApprox, grid: &NormGrid) -> PotentialReport {
    let ps = &ta.params;
    let p = ps.p;
    let k = ps.k;
    let mut c_bar = vec![0.0; k];
    let mut c_v = vec![f64::NEG_INFINITY; k];
    let mut vin = vec![f64::NAN; k];
    let mut vout = vec![f64::NAN; k];
    for j in 0..k {
        let pts = ta.annulus_samples(j, grid);
        let a = ps.alpha[j];
        let mut worst = f64::NEG_INFINITY;
        for &u in &pts {
            worst = worst.max(ta.ln_potential_ratio(j, u));
            c_v[j] = f64::max(c_v[j], -p - V_alpha_log(a, u));
        }
        c_bar[j] = worst.exp();
        let (lo, hi) = ta.annulus_range(j, grid);
        if j > 0 {
            vin[j] = V_alpha_log(a, lo) + p;
        }
        if j + 1 < k {
            vout[j] = V_alpha_log(a, hi) + p;
        }
    }
    PotentialReport {
        p,
        c_bar,
        c_v,
        v_plus_p_inner: vin,
        v_plus_p_outer: vout,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn b_bounds_alpha_two() {
        let (i, o) = b_bounds(2.0, 100.0).unwrap();
        assert_eq!(i, f64::NEG_INFINITY);
        assert!((V_alpha_log(2.0, o) + 50.0).abs() < 1e-10);
    }

    #[test]
    fn b_bounds_general_alpha() {
        let (i, o) = b_bounds(10.4, 150.0).unwrap();
        assert!((V_alpha_log(10.4, i) + 75.0).abs() < 1e-10);
        assert!((V_alpha_log(10.4, o) + 75.0).abs() < 1e-10);
        assert!(i < o);
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [10.0, 20.0, 40.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-4.0)).collect();
        assert!((loglog_slope(&xs, &ys) + 4.0).abs() < 1e-12);
    }
}
