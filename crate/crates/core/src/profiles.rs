//! Singular Liouville bubbles, the kernel element z, and radial solutions of
//! the linearized equation `Δw + |y|^{α-2} e^{v_α} w = F`.
//!
//! Radial functions are handled in the log variable `t = ln r`, where the
//! equation reads `w_tt + q(t) w = e^{2t} F` with
//! `q(t) = 2α² e^{αt} / (1 + e^{αt})²`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{gauss10, gauss10_nodes, integrate_halfline, softplus, QuadratureSpec};

// ---------------------------------------------------------------------------
// Bubble functions

pub fn v_alpha(alpha: f64, rho: f64) -> f64 {
    if rho == 0.0 {
        return (2.0 * alpha * alpha).ln();
    }
    v_alpha_log(alpha, rho.ln())
}

/// `v_α` at `ρ = e^t`.
pub fn v_alpha_log(alpha: f64, t: f64) -> f64 {
    (2.0 * alpha * alpha).ln() - 2.0 * softplus(alpha * t)
}

#[allow(non_snake_case)]
pub fn V_alpha(alpha: f64, rho: f64) -> f64 {
    if rho == 0.0 && alpha == 2.0 {
        return 8f64.ln();
    }
    V_alpha_log(alpha, rho.ln())
}

/// `V_α = v_α + (α-2) ln ρ` at `ρ = e^t`. This is also the log of the mass
/// density `ρ^{α-2} e^{v_α}`.
#[allow(non_snake_case)]
pub fn V_alpha_log(alpha: f64, t: f64) -> f64 {
    let lin = if alpha == 2.0 { 0.0 } else { (alpha - 2.0) * t };
    (2.0 * alpha * alpha).ln() + lin - 2.0 * softplus(alpha * t)
}

pub fn phi0(v: f64) -> f64 {
    0.5 * v * v
}

pub fn phi1(v: f64, w0: f64) -> f64 {
    let v2 = v * v;
    v * w0 - v2 * v / 3.0 - 0.5 * w0 * w0 - v2 * v2 / 8.0 + 0.5 * v2 * w0
}

/// `z(ρ) = (1 - ρ^α)/(1 + ρ^α)`.
pub fn z0(alpha: f64, rho: f64) -> f64 {
    if rho == 0.0 {
        return 1.0;
    }
    z0_log(alpha, rho.ln())
}

pub fn z0_log(alpha: f64, t: f64) -> f64 {
    -(0.5 * alpha * t).tanh()
}

/// A bubble `U_{α,δ}` with `δ` held as its logarithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bubble {
    pub alpha: f64,
    pub ln_delta: f64,
}

impl Bubble {
    pub fn new(alpha: f64, ln_delta: f64) -> Result<Self> {
        if !(alpha >= 2.0) {
            return Err(Error::Domain(format!(
                "bubble exponent must be >= 2, got {alpha}"
            )));
        }
        Ok(Bubble { alpha, ln_delta })
    }

    /// `U_{α,δ}(x)` at `|x| = e^{ln_x}`.
    pub fn value_log(&self, ln_x: f64) -> f64 {
        let a = self.alpha;
        (2.0 * a * a).ln() + a * self.ln_delta
            - 2.0 * crate::numerics::logaddexp(a * self.ln_delta, a * ln_x)
    }

    /// `ln(|x|^{α-2} e^{U_{α,δ}(x)})`.
    pub fn log_mass(&self, ln_x: f64) -> f64 {
        V_alpha_log(self.alpha, ln_x - self.ln_delta) - 2.0 * self.ln_delta
    }
}

// ---------------------------------------------------------------------------
// Kernel of the linearized operator in t = ln r

/// Regular kernel element `-tanh(αt/2)`, i.e. `z` in log radius.
#[inline]
pub fn kernel_phi(alpha: f64, t: f64) -> f64 {
    -(0.5 * alpha * t).tanh()
}

#[inline]
fn kernel_phi_t(alpha: f64, t: f64) -> f64 {
    let s = sech2(0.5 * alpha * t);
    -0.5 * alpha * s
}

/// Second kernel element, growing linearly in `t` at both ends.
/// Wronskian `φψ' - φ'ψ = α/2`.
#[inline]
pub fn kernel_psi(alpha: f64, t: f64) -> f64 {
    let tau = 0.5 * alpha * t;
    -tau * tau.tanh() + 2.0 * logistic(-2.0 * tau)
}

#[inline]
fn kernel_psi_t(alpha: f64, t: f64) -> f64 {
    let tau = 0.5 * alpha * t;
    let s = sech2(tau);
    0.5 * alpha * (-tau * s - tau.tanh() - s)
}

#[inline]
fn sech2(x: f64) -> f64 {
    let c = x.abs();
    if c > 350.0 {
        return 0.0;
    }
    let e = (-2.0 * c).exp();
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

#[inline]
fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Potential `q(t) = r² |y|^{α-2}e^{v}` of the log-radius equation.
#[inline]
pub fn potential_q(alpha: f64, t: f64) -> f64 {
    0.5 * alpha * alpha * sech2(0.5 * alpha * t)
}

// ---------------------------------------------------------------------------
// Radial profiles

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            r_min: 1e-6,
            r_max: 1e8,
            points: 4096,
        }
    }
}

impl GridSpec {
    fn validate(&self) -> Result<()> {
        if !(self.r_min > 0.0 && self.r_max > self.r_min * 10.0 && self.points >= 16) {
            return Err(Error::Usage(format!(
                "profile grid needs 0 < r_min, r_max > 10 r_min and >= 16 points, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// A radial function sampled on a uniform grid in `ln r`, together with its
/// exact log-derivative and asymptotic constants.
#[derive(Debug, Clone, Serialize)]
pub struct RadialProfile {
    pub alpha: f64,
    pub ln_r: Vec<f64>,
    pub values: Vec<f64>,
    /// `dw/d ln r` at the grid nodes.
    pub slopes: Vec<f64>,
    /// Logarithmic growth: `w(r) - c_f ln r -> 0` as `r -> ∞`.
    pub c_f: f64,
    /// `∫_0^∞ t φ_α(t) F(t) dt`; equals `-c_f`.
    pub ci_integral: f64,
    /// `w(0)`.
    pub at_origin: f64,
    /// Sup of `|w_tt + q w - e^{2t}F| / (1 + |q w| + |e^{2t}F|)` sampled in
    /// the grid interior.
    pub ode_residual: f64,
}

impl RadialProfile {
    fn step(&self) -> f64 {
        self.ln_r[1] - self.ln_r[0]
    }

    /// Value and log-slope at `t = ln r`.
    pub fn eval_log_with_slope(&self, t: f64) -> (f64, f64) {
        let n = self.ln_r.len();
        let t0 = self.ln_r[0];
        let tn = self.ln_r[n - 1];
        let a = self.alpha;
        if t < t0 {
            let w_inf = self.at_origin;
            let raw0 = self.values[0] - w_inf * kernel_phi(a, t0);
            let e = (a * (t - t0)).exp();
            return (
                w_inf * kernel_phi(a, t) + raw0 * e,
                w_inf * kernel_phi_t(a, t) + a * raw0 * e,
            );
        }
        if t > tn {
            let c = self.c_f;
            let rem = self.values[n - 1] - c * tn;
            let e = (-a * (t - tn)).exp();
            return (c * t + rem * e, c - a * rem * e);
        }
        let h = self.step();
        let i = (((t - t0) / h).floor() as usize).min(n - 2);
        let s = (t - self.ln_r[i]) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let val = h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1;
        let d00 = 6.0 * s2 - 6.0 * s;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = -6.0 * s2 + 6.0 * s;
        let d11 = 3.0 * s2 - 2.0 * s;
        let der = (d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1) / h;
        (val, der)
    }

    pub fn eval_log(&self, t: f64) -> f64 {
        self.eval_log_with_slope(t).0
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r == 0.0 {
            return self.at_origin;
        }
        self.eval_log(r.ln())
    }

    /// Least-squares slope of `w` against `ln r` over the last decade of the grid.
    pub fn fitted_log_slope(&self) -> f64 {
        let (slope, _) = self.last_decade_fit();
        slope
    }

    /// Fitted `w - c_f ln r` over the last decade, a diagnostic for the
    /// normalization constant.
    pub fn fitted_tail_constant(&self) -> f64 {
        let tn = *self.ln_r.last().expect("non-empty grid");
        let lo = tn - std::f64::consts::LN_10;
        let pts: Vec<f64> = self
            .ln_r
            .iter()
            .zip(&self.values)
            .filter(|(t, _)| **t >= lo)
            .map(|(t, w)| w - self.c_f * t)
            .collect();
        pts.iter().sum::<f64>() / pts.len() as f64
    }

    fn last_decade_fit(&self) -> (f64, f64) {
        let tn = *self.ln_r.last().expect("non-empty grid");
        let lo = tn - std::f64::consts::LN_10;
        let pts: Vec<(f64, f64)> = self
            .ln_r
            .iter()
            .zip(&self.values)
            .filter(|(t, _)| **t >= lo)
            .map(|(t, w)| (*t, *w))
            .collect();
        let n = pts.len() as f64;
        let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let mw = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - mw)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mt) * (p.0 - mt)).sum();
        let slope = sxy / sxx;
        (slope, mw - slope * mt)
    }

    /// Max over the last decade of `|w - c_f ln r|`, paired with the same
    /// quantity over the preceding decade.
    pub fn tail_decay(&self) -> (f64, f64) {
        let tn = *self.ln_r.last().expect("non-empty grid");
        let l10 = std::f64::consts::LN_10;
        let sup = |lo: f64, hi: f64| {
            self.ln_r
                .iter()
                .zip(&self.values)
                .filter(|(t, _)| **t >= lo && **t <= hi)
                .fold(0.0_f64, |m, (t, w)| m.max((w - self.c_f * t).abs()))
        };
        (sup(tn - l10, tn), sup(tn - 2.0 * l10, tn - l10))
    }
}

struct Cumulative {
    a_fwd: Vec<f64>,
    b_tail: Vec<f64>,
}

/// Solve `Δw + |y|^{α-2}e^{v_α} w = F` for radial `w`, regular at 0 and
/// normalized so that `w(r) - C_F ln r -> 0`.
///
/// `f` receives `ln r` and returns `F(r)`.
pub fn solve_radial_linearized<F>(alpha: f64, f: F, grid: &GridSpec) -> Result<RadialProfile>
where
    F: Fn(f64) -> f64,
{
    if !(alpha >= 2.0) {
        return Err(Error::Domain(format!("alpha must be >= 2, got {alpha}")));
    }
    grid.validate()?;
    let n = grid.points;
    let t0 = grid.r_min.ln();
    let tn = grid.r_max.ln();
    let h = (tn - t0) / (n - 1) as f64;
    let ln_r: Vec<f64> = (0..n).map(|i| t0 + h * i as f64).collect();

    let g = |t: f64| (2.0 * t).exp() * f(t);
    let phi_g = |t: f64| kernel_phi(alpha, t) * g(t);
    let psi_g = |t: f64| kernel_psi(alpha, t) * g(t);

    let spec = QuadratureSpec::default().with_tolerances(1e-15, 1e-13);
    let head_a = integrate_halfline(|u| phi_g(t0 - u), &spec)?.value;
    let head_b = integrate_halfline(|u| psi_g(t0 - u), &spec)?.value;
    let tail_a = integrate_halfline(|u| phi_g(tn + u), &spec)?.value;
    let tail_b = integrate_halfline(|u| psi_g(tn + u), &spec)?.value;

    let mut cell_a = vec![0.0; n - 1];
    let mut cell_b = vec![0.0; n - 1];
    for i in 0..n - 1 {
        let (mut sa, mut sb) = (0.0, 0.0);
        for (x, w) in gauss10_nodes(ln_r[i], ln_r[i + 1]) {
            let gx = g(x);
            sa += w * kernel_phi(alpha, x) * gx;
            sb += w * kernel_psi(alpha, x) * gx;
        }
        cell_a[i] = sa;
        cell_b[i] = sb;
    }
    let mut a_fwd = vec![0.0; n];
    a_fwd[0] = head_a;
    for i in 1..n {
        a_fwd[i] = a_fwd[i - 1] + cell_a[i - 1];
    }
    let mut b_tail = vec![0.0; n];
    b_tail[n - 1] = tail_b;
    for i in (0..n - 1).rev() {
        b_tail[i] = b_tail[i + 1] + cell_b[i];
    }
    let a_inf = a_fwd[n - 1] + tail_a;
    let b_inf = b_tail[0] + head_b;
    if !(a_inf.is_finite() && b_inf.is_finite()) {
        return Err(Error::Domain(
            "source is not integrable against the kernel".into(),
        ));
    }

    let k = 2.0 / alpha;
    let values: Vec<f64> = (0..n)
        .map(|i| {
            k * (kernel_psi(alpha, ln_r[i]) * a_fwd[i] + kernel_phi(alpha, ln_r[i]) * b_tail[i])
        })
        .collect();
    let slopes: Vec<f64> = (0..n)
        .map(|i| {
            k * (kernel_psi_t(alpha, ln_r[i]) * a_fwd[i] + kernel_phi_t(alpha, ln_r[i]) * b_tail[i])
        })
        .collect();

    let cum = Cumulative { a_fwd, b_tail };
    let ode_residual = sampled_ode_residual(alpha, &g, &ln_r, &cum);

    Ok(RadialProfile {
        alpha,
        ln_r,
        values,
        slopes,
        c_f: -a_inf,
        ci_integral: a_inf,
        at_origin: k * b_inf,
        ode_residual,
    })
}

// Exact (w, w_t) at an off-grid point from the cumulative integrals.
fn exact_point<G: Fn(f64) -> f64>(
    alpha: f64,
    g: &G,
    ln_r: &[f64],
    cum: &Cumulative,
    t: f64,
) -> (f64, f64) {
    let h = ln_r[1] - ln_r[0];
    let i = (((t - ln_r[0]) / h).floor() as usize).min(ln_r.len() - 2);
    let ti = ln_r[i];
    let da = gauss10(&|x: f64| kernel_phi(alpha, x) * g(x), ti, t);
    let db = gauss10(&|x: f64| kernel_psi(alpha, x) * g(x), ti, t);
    let a = cum.a_fwd[i] + da;
    let b = cum.b_tail[i] - db;
    let k = 2.0 / alpha;
    (
        k * (kernel_psi(alpha, t) * a + kernel_phi(alpha, t) * b),
        k * (kernel_psi_t(alpha, t) * a + kernel_phi_t(alpha, t) * b),
    )
}

fn sampled_ode_residual<G: Fn(f64) -> f64>(
    alpha: f64,
    g: &G,
    ln_r: &[f64],
    cum: &Cumulative,
) -> f64 {
    let n = ln_r.len();
    let eta = 1e-3 * 2.0 / alpha;
    let mut worst = 0.0_f64;
    let stride = (n / 256).max(1);
    let mut i = 4;
    while i + 4 < n {
        // offset the sample off the grid node
        let t = ln_r[i] + 0.37 * (ln_r[1] - ln_r[0]);
        let sl = |m: f64| exact_point(alpha, g, ln_r, cum, t + m * eta).1;
        let w_tt = (-sl(2.0) + 8.0 * sl(1.0) - 8.0 * sl(-1.0) + sl(-2.0)) / (12.0 * eta);
        let w = exact_point(alpha, g, ln_r, cum, t).0;
        let qw = potential_q(alpha, t) * w;
        let gt = g(t);
        let r = (w_tt + qw - gt).abs() / (1.0 + qw.abs() + gt.abs());
        worst = worst.max(r);
        i += stride;
    }
    worst
}

/// Pointwise evaluation of the reduction-of-order representation
/// `w(r) = φ(r)[∫_0^r (φ_F(s) - φ_F(1))/(1-s)² ds + φ_F(1) r/(1-r)]`
/// with `φ_F(s) = (1-s)²/(s φ(s)²) ∫_0^s t φ(t) F(t) dt`.
///
/// Differs from the normalized grid solution by a multiple of `φ`.
/// `f` receives `r` (not `ln r`). Requires `r != 1`.
pub fn representation_formula<F>(alpha: f64, f: F, r: f64) -> Result<f64>
where
    F: Fn(f64) -> f64 + Copy,
{
    if !(r > 0.0) || (r - 1.0).abs() < 1e-12 {
        return Err(Error::Domain(format!(
            "representation formula needs r > 0, r != 1, got {r}"
        )));
    }
    let spec = QuadratureSpec::default().with_tolerances(1e-13, 1e-11);
    let inner = |s: f64| -> f64 {
        let q = crate::numerics::integrate(
            |t| t * z0(alpha, t) * f(t),
            0.0,
            s,
            &spec.clone().with_splits(&[1.0]),
        );
        q.map(|q| q.value).unwrap_or(f64::NAN)
    };
    // (1-s)/φ(s), continuous through s = 1
    let one_minus_over_phi = |s: f64| -> f64 {
        let u = 1.0 - s;
        let x = -0.5 * alpha * s.ln();
        let tanh_ratio = if x.abs() < 1e-8 {
            1.0 - x * x / 3.0
        } else {
            x.tanh() / x
        };
        let ln_ratio = if u.abs() < 1e-8 {
            1.0 + u / 2.0
        } else {
            -(-u).ln_1p() / u
        };
        1.0 / (0.5 * alpha * ln_ratio * tanh_ratio)
    };
    let phi_f = |s: f64| -> f64 {
        let c = one_minus_over_phi(s);
        c * c / s * inner(s)
    };
    let phi_f1 = phi_f(1.0);
    let integrand = |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        let u = 1.0 - s;
        (phi_f(s) - phi_f1) / (u * u)
    };
    let loose = QuadratureSpec::default()
        .with_tolerances(1e-9, 1e-8)
        .with_splits(&[1.0]);
    let fp = crate::numerics::integrate(integrand, 0.0, r, &loose)?.value;
    Ok(z0(alpha, r) * (fp + phi_f1 * r / (1.0 - r)))
}

// ---------------------------------------------------------------------------
// Correction profiles

#[derive(Debug, Clone, Serialize)]
pub struct CorrectionProfiles {
    pub alpha: f64,
    pub w0: RadialProfile,
    pub w1: RadialProfile,
    pub c0: f64,
    pub c1: f64,
    pub w0_at_0: f64,
    pub w1_at_0: f64,
}

/// Source of the first correction, as a function of `ln r`.
pub fn source0(alpha: f64, t: f64) -> f64 {
    let v = V_alpha_log(alpha, t);
    v.exp() * phi0(v)
}

/// Source of the second correction given the first.
pub fn source1(alpha: f64, w0: &RadialProfile, t: f64) -> f64 {
    let v = V_alpha_log(alpha, t);
    v.exp() * phi1(v, w0.eval_log(t))
}

type CacheKey = (i64, u64, u64, usize);
type Cache = Mutex<HashMap<CacheKey, Arc<CorrectionProfiles>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

pub fn correction_profiles(alpha: f64) -> Result<Arc<CorrectionProfiles>> {
    correction_profiles_on(alpha, &GridSpec::default())
}

/// Cached per `α` (rounded to 1e-12) and grid.
pub fn correction_profiles_on(alpha: f64, grid: &GridSpec) -> Result<Arc<CorrectionProfiles>> {
    let key = (
        (alpha * 1e12).round() as i64,
        grid.r_min.to_bits(),
        grid.r_max.to_bits(),
        grid.points,
    );
    if let Some(hit) = cache().lock().expect("profile cache poisoned").get(&key) {
        return Ok(hit.clone());
    }
    let built = Arc::new(build_corrections(alpha, grid)?);
    let mut guard = cache().lock().expect("profile cache poisoned");
    Ok(guard.entry(key).or_insert(built).clone())
}

fn build_corrections(alpha: f64, grid: &GridSpec) -> Result<CorrectionProfiles> {
    let w0 = solve_radial_linearized(alpha, |t| source0(alpha, t), grid)?;
    let w1 = solve_radial_linearized(alpha, |t| source1(alpha, &w0, t), grid)?;
    Ok(CorrectionProfiles {
        alpha,
        c0: w0.c_f,
        c1: w1.c_f,
        w0_at_0: w0.at_origin,
        w1_at_0: w1.at_origin,
        w0,
        w1,
    })
}

// ---------------------------------------------------------------------------
// Expansion of the nonlinearity

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TaylorCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub err: f64,
}

/// Compare `(1 + a/p + b/p² + c/p³)^p` with its two-term expansion.
pub fn taylor_check(a: f64, b: f64, c: f64, p: f64) -> Result<TaylorCheck> {
    if !(a > -p / 2.0) {
        return Err(Error::Domain(format!(
            "taylor_check needs a > -p/2, got a={a}, p={p}"
        )));
    }
    let base = a / p + b / (p * p) + c / (p * p * p);
    let lhs = (p * base.ln_1p()).exp();
    let rhs = a.exp() * (1.0 + (b - phi0(a)) / p + (c - phi1(a, b)) / (p * p));
    Ok(TaylorCheck {
        lhs,
        rhs,
        err: (lhs - rhs).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GppReport {
    pub p: f64,
    pub samples: usize,
    /// Max of `p ln|1+s/p| - s`; the bound holds when this is <= 0.
    pub max_excess: f64,
    pub violations: usize,
}

/// Sample `|1+s/p|^p <= e^s` on `s ∈ [-p, 5]` (compared in log form).
pub fn gpp_check(p: f64, samples: usize) -> GppReport {
    let mut worst = f64::NEG_INFINITY;
    let mut bad = 0;
    for i in 0..samples {
        let s = -p + (5.0 + p) * i as f64 / (samples - 1).max(1) as f64;
        let lhs = p * (1.0 + s / p).abs().ln();
        let excess = lhs - s;
        // relative round-off allowance on the two logs
        let slack = 4.0 * f64::EPSILON * (s.abs() + 1.0);
        if excess > slack {
            bad += 1;
        }
        worst = worst.max(excess);
    }
    GppReport {
        p,
        samples,
        max_excess: worst,
        violations: bad,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn bubble_point_values() {
        assert!((v_alpha(2.0, 0.0) - 8f64.ln()).abs() < 1e-15);
        assert!((v_alpha(2.0, 1.0) - LN_2).abs() < 1e-15);
        assert!((V_alpha(7.5, 1.0) - (7.5f64 * 7.5 / 2.0).ln()).abs() < 1e-14);
        assert_eq!(V_alpha(2.0, 3.0), v_alpha(2.0, 3.0));
    }

    #[test]
    fn phi_values() {
        assert_eq!(phi0(0.0), 0.0);
        assert_eq!(phi1(0.0, 0.0), 0.0);
        assert_eq!(phi0(2.0), 2.0);
        assert!((phi1(1.0, 0.0) + 11.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn z_values() {
        assert_eq!(z0(3.0, 0.0), 1.0);
        assert_eq!(z0(3.0, 1.0), 0.0);
        for a in [2.0, 5.0, 10.0] {
            assert!((z0(a, 1e3) + 1.0).abs() < 2.0 * 10f64.powf(-3.0 * a));
        }
    }

    #[test]
    fn kernel_elements_solve_homogeneous_equation() {
        let a = 3.7;
        let h = 1e-3;
        for &t in &[-2.0, -0.4, 0.0, 0.3, 1.9] {
            for f in [kernel_phi, kernel_psi] {
                let d2 = (-f(a, t + 2.0 * h) + 16.0 * f(a, t + h) - 30.0 * f(a, t)
                    + 16.0 * f(a, t - h)
                    - f(a, t - 2.0 * h))
                    / (12.0 * h * h);
                assert!((d2 + potential_q(a, t) * f(a, t)).abs() < 1e-7, "t={t}");
            }
            let w = kernel_phi(a, t) * kernel_psi_t(a, t) - kernel_phi_t(a, t) * kernel_psi(a, t);
            assert!((w - a / 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_source_gives_zero_profile() {
        let p = solve_radial_linearized(2.0, |_| 0.0, &GridSpec::default()).unwrap();
        assert!(p.values.iter().all(|v| *v == 0.0));
        assert_eq!(p.c_f, 0.0);
    }

    #[test]
    fn hermite_reproduces_nodes() {
        let p = solve_radial_linearized(2.0, |t| source0(2.0, t), &GridSpec::default()).unwrap();
        for i in [3usize, 1000, 4000] {
            assert!((p.eval_log(p.ln_r[i]) - p.values[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn taylor_zero() {
        let c = taylor_check(0.0, 0.0, 0.0, 50.0).unwrap();
        assert_eq!(c.lhs, 1.0);
        assert_eq!(c.err, 0.0);
        assert!(taylor_check(-30.0, 0.0, 0.0, 50.0).is_err());
    }
}
