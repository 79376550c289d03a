//! Stable laws `S_α(σ, β, μ)` with characteristic function
//!
//! ```text
//! α ≠ 1:  exp(−σ^α|t|^α (1 − iβ sign(t) tan(πα/2)) + iμt)
//! α = 1:  exp(−σ|t| (1 + iβ (2/π) sign(t) log|t|) + iμt)
//! ```
//!
//! The CDF and density come from Zolotarev's integral representation over a finite
//! angle interval (see [`cdf`]); [`cdf_gil_pelaez`] inverts the characteristic function
//! directly and serves as an independent check.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::quad::{integrate, QuadOptions};
use crate::scalar::EULER_GAMMA;
use crate::specfun::{log_gamma, normal_cdf};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    pub alpha: f64,
    pub sigma: f64,
    pub beta: f64,
    pub mu: f64,
}

impl StableParams {
    /// Validates the ranges; for `α = 2` the skewness is irrelevant and set to 0.
    pub fn new(alpha: f64, sigma: f64, beta: f64, mu: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(domain("StableParams", format!("alpha = {alpha} outside (0, 2]")));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(domain("StableParams", format!("sigma = {sigma} must be positive")));
        }
        if !(-1.0..=1.0).contains(&beta) {
            return Err(domain("StableParams", format!("beta = {beta} outside [-1, 1]")));
        }
        if !mu.is_finite() {
            return Err(domain("StableParams", "mu must be finite"));
        }
        let beta = if alpha == 2.0 { 0.0 } else { beta };
        Ok(StableParams { alpha, sigma, beta, mu })
    }

    fn is_gaussian(&self) -> bool {
        self.alpha == 2.0
    }
}

fn check_c(func: &'static str, c: f64) -> Result<()> {
    if c > 0.25 && c < 0.5 {
        Ok(())
    } else {
        Err(domain(func, format!("c = {c} outside (1/4, 1/2)")))
    }
}

/// `Γ(2−α) cos(πα/2) / (2(1−α))` for `α = 1/(2c)`; both factors are negative on `(1, 2)`.
fn scale_base(c: f64) -> Result<f64> {
    let alpha = 1.0 / (2.0 * c);
    let num = log_gamma(2.0 - alpha)?.exp() * (PI * alpha / 2.0).cos();
    Ok(num / (2.0 * (1.0 - alpha)))
}

/// Law of `H(c)`: `S_{1/(2c)}(2 (Γ(2−1/(2c)) cos(π/(4c)) / (2(1−1/(2c))))^{2c}, 1, 0)`.
pub fn params_for_h(c: f64) -> Result<StableParams> {
    check_c("params_for_H", c)?;
    let sigma = 2.0 * scale_base(c)?.powf(2.0 * c);
    StableParams::new(1.0 / (2.0 * c), sigma, 1.0, 0.0)
}

/// Law of `(2c − 1/2)^{1/2} H(c)`.
pub fn params_for_scaled_h(c: f64) -> Result<StableParams> {
    let p = params_for_h(c)?;
    StableParams::new(p.alpha, (2.0 * c - 0.5).sqrt() * p.sigma, p.beta, 0.0)
}

/// Law of `Ĥ(c) = H(c) + 1/(1−2c)`.
pub fn params_for_h_hat(c: f64) -> Result<StableParams> {
    let p = params_for_h(c)?;
    StableParams::new(p.alpha, p.sigma, p.beta, 1.0 / (1.0 - 2.0 * c))
}

/// Law of `Z_0`: `S_1(π/2, 1, 1 − log 2 − γ)`.
pub fn params_for_z0() -> StableParams {
    StableParams { alpha: 1.0, sigma: FRAC_PI_2, beta: 1.0, mu: 1.0 - std::f64::consts::LN_2 - EULER_GAMMA }
}

/// Law of `aX + b` for `X ~ p`.
pub fn affine(p: StableParams, a: f64, b: f64) -> Result<StableParams> {
    if a == 0.0 || !a.is_finite() || !b.is_finite() {
        return Err(domain("affine", format!("a = {a}, b = {b}")));
    }
    let mu = if p.alpha == 1.0 {
        a * p.mu + b - FRAC_2_PI * a * a.abs().ln() * p.sigma * p.beta
    } else {
        a * p.mu + b
    };
    StableParams::new(p.alpha, a.abs() * p.sigma, a.signum() * p.beta, mu)
}

pub fn char_fn(p: StableParams, t: f64) -> Complex64 {
    if t == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let at = t.abs();
    let sgn = t.signum();
    let exponent = if p.alpha == 1.0 {
        Complex64::new(-p.sigma * at, -p.sigma * at * p.beta * FRAC_2_PI * sgn * at.ln())
    } else {
        let m = (p.sigma * at).powf(p.alpha);
        Complex64::new(-m, m * p.beta * sgn * (PI * p.alpha / 2.0).tan())
    };
    (exponent + Complex64::new(0.0, p.mu * t)).exp()
}

/// Maps `x` to the standardized variable with `σ = 1, μ = 0` of the same `α, β`.
fn standardize(p: StableParams, x: f64) -> f64 {
    if p.alpha == 1.0 {
        (x - p.mu - FRAC_2_PI * p.beta * p.sigma * p.sigma.ln()) / p.sigma
    } else {
        (x - p.mu) / p.sigma
    }
}

const QUAD: QuadOptions = QuadOptions { abs_tol: 1e-15, rel_tol: 1e-12, max_intervals: 2000 };

/// Levels of `log u` at which the integrands `e^{-u}` and `u e^{-u}` change shape.
const LOG_U_LEVELS: [f64; 9] = [-30.0, -12.0, -5.0, -2.0, 0.0, 1.0, 2.0, 3.0, 4.5];

/// Integrates `f(u(θ))` over `(lo, hi)` where `log u(θ)` is monotone in `θ`. The
/// interval is first cut where `log u` crosses each of [`LOG_U_LEVELS`], so narrow
/// transitions are never straddled by a single quadrature panel.
fn integrate_monotone<G: Fn(f64) -> f64, F: Fn(f64) -> f64>(log_u: G, f: F, lo: f64, hi: f64) -> Result<f64> {
    if !(hi > lo) {
        return Ok(0.0);
    }
    let value = |th: f64| {
        let lu = log_u(th);
        let v = f(lu.exp());
        if v.is_nan() {
            0.0
        } else {
            v
        }
    };
    let eps = 1e-12 * (hi - lo);
    let la = log_u(lo + eps);
    let lb = log_u(hi - eps);
    let mut cuts = vec![lo];
    for level in LOG_U_LEVELS {
        if (la < level) == (lb < level) {
            continue;
        }
        let left_below = la < level;
        let (mut a, mut b) = (lo, hi);
        while b - a > 1e-14 * (hi - lo) {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let lm = log_u(m);
            if lm.is_nan() || (lm < level) == left_below {
                a = m;
            } else {
                b = m;
            }
        }
        cuts.push(0.5 * (a + b));
    }
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            total += integrate(value, w[0], w[1], QUAD)?.0;
        }
    }
    Ok(total)
}

/// Zolotarev's `log V(θ)` for `α ≠ 1` on `(−θ₀, π/2)`.
fn log_v(alpha: f64, theta0: f64, th: f64) -> f64 {
    let am1 = alpha - 1.0;
    (alpha * theta0).cos().ln() / am1 + alpha / am1 * (th.cos().ln() - (alpha * (theta0 + th)).sin().ln())
        + (alpha * theta0 + am1 * th).cos().ln()
        - th.cos().ln()
}

/// `log V(θ)` for `α = 1`, `β > 0`, on `(−π/2, π/2)`.
fn log_v1(beta: f64, th: f64) -> f64 {
    let w = FRAC_PI_2 + beta * th;
    FRAC_2_PI.ln() + w.ln() - th.cos().ln() + w * th.tan() / beta
}

/// Standardized CDF (σ = 1, μ = 0) for `α ∉ {1, 2}`, in the shifted variable `x₀`
/// in which the integral representation takes its simplest form.
fn cdf_shifted(x0: f64, alpha: f64, beta: f64) -> Result<f64> {
    let zeta = -beta * (PI * alpha / 2.0).tan();
    if x0 < zeta {
        return Ok(1.0 - cdf_shifted(-x0, alpha, -beta)?);
    }
    let theta0 = (beta * (PI * alpha / 2.0).tan()).atan() / alpha;
    if x0 == zeta {
        return Ok((FRAC_PI_2 - theta0) / PI);
    }
    let c1 = if alpha < 1.0 { (FRAC_PI_2 - theta0) / PI } else { 1.0 };
    let ly = alpha / (alpha - 1.0) * (x0 - zeta).ln();
    let integral = integrate_monotone(|th| ly + log_v(alpha, theta0, th), |u| (-u).exp(), -theta0, FRAC_PI_2)?;
    Ok((c1 + (1.0 - alpha).signum() / PI * integral).clamp(0.0, 1.0))
}

fn pdf_shifted(x0: f64, alpha: f64, beta: f64) -> Result<f64> {
    let zeta = -beta * (PI * alpha / 2.0).tan();
    if x0 < zeta {
        return pdf_shifted(-x0, alpha, -beta);
    }
    let theta0 = (beta * (PI * alpha / 2.0).tan()).atan() / alpha;
    if x0 == zeta {
        return Ok(log_gamma(1.0 + 1.0 / alpha)?.exp() * theta0.cos()
            / (PI * (1.0 + zeta * zeta).powf(1.0 / (2.0 * alpha))));
    }
    let ly = alpha / (alpha - 1.0) * (x0 - zeta).ln();
    let integral = integrate_monotone(|th| ly + log_v(alpha, theta0, th), |u| u * (-u).exp(), -theta0, FRAC_PI_2)?;
    Ok(alpha / (PI * (alpha - 1.0).abs() * (x0 - zeta)) * integral)
}

fn cdf_alpha_one(x: f64, beta: f64) -> Result<f64> {
    if beta == 0.0 {
        return Ok(0.5 + x.atan() / PI);
    }
    if beta < 0.0 {
        return Ok(1.0 - cdf_alpha_one(-x, -beta)?);
    }
    let shift = -PI * x / (2.0 * beta);
    let integral = integrate_monotone(|th| shift + log_v1(beta, th), |u| (-u).exp(), -FRAC_PI_2, FRAC_PI_2)?;
    Ok((integral / PI).clamp(0.0, 1.0))
}

fn pdf_alpha_one(x: f64, beta: f64) -> Result<f64> {
    if beta == 0.0 {
        return Ok(1.0 / (PI * (1.0 + x * x)));
    }
    if beta < 0.0 {
        return pdf_alpha_one(-x, -beta);
    }
    let shift = -PI * x / (2.0 * beta);
    let integral = integrate_monotone(|th| shift + log_v1(beta, th), |u| u * (-u).exp(), -FRAC_PI_2, FRAC_PI_2)?;
    Ok(integral / (2.0 * beta))
}

/// `P(X ≤ x)` for `X ~ p`.
///
/// For `α ≠ 1` the standardized variable is shifted by `β tan(πα/2)`, after which
/// the CDF is `c₁ + sign(1−α)/π ∫_{−θ₀}^{π/2} exp(−(x−ζ)^{α/(α−1)} V(θ)) dθ`.
pub fn cdf(p: StableParams, x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(domain("stable cdf", "NaN argument"));
    }
    if x == f64::INFINITY {
        return Ok(1.0);
    }
    if x == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let z = standardize(p, x);
    if p.is_gaussian() {
        return Ok(normal_cdf(z / std::f64::consts::SQRT_2));
    }
    if p.alpha == 1.0 {
        return cdf_alpha_one(z, p.beta);
    }
    cdf_shifted(z - p.beta * (PI * p.alpha / 2.0).tan(), p.alpha, p.beta)
}

/// Density of `p` at `x`.
pub fn pdf(p: StableParams, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return if x.is_nan() { Err(domain("stable pdf", "NaN argument")) } else { Ok(0.0) };
    }
    let z = standardize(p, x);
    let f = if p.is_gaussian() {
        (-z * z / 4.0).exp() / (2.0 * PI.sqrt())
    } else if p.alpha == 1.0 {
        pdf_alpha_one(z, p.beta)?
    } else {
        pdf_shifted(z - p.beta * (PI * p.alpha / 2.0).tan(), p.alpha, p.beta)?
    };
    Ok(f / p.sigma)
}

/// `P(X ≤ x) = 1/2 − (1/π) ∫_0^∞ Im(e^{−itx} φ(t))/t dt`, truncated where
/// `|φ(t)| = exp(−(σt)^α) < e^{−45}`.
pub fn cdf_gil_pelaez(p: StableParams, x: f64) -> Result<f64> {
    let t_max = 45f64.powf(1.0 / p.alpha) / p.sigma;
    let opts = QuadOptions { abs_tol: 1e-13, rel_tol: 1e-11, max_intervals: 20_000 };
    let f = |t: f64| {
        if t == 0.0 {
            return 0.0;
        }
        (Complex64::new(0.0, -t * x).exp() * char_fn(p, t)).im / t
    };
    let pieces = 64;
    let mut total = 0.0;
    for k in 0..pieces {
        let a = t_max * k as f64 / pieces as f64;
        let b = t_max * (k + 1) as f64 / pieces as f64;
        total += integrate(f, a, b, opts)?.0;
    }
    Ok(0.5 - total / PI)
}

/// One draw by the Chambers–Mallows–Stuck transform.
pub fn sample<R: Rng + ?Sized>(p: StableParams, rng: &mut R) -> f64 {
    let v = PI * (rng.random::<f64>() - 0.5);
    let w: f64 = rng.sample(Exp1);
    if p.is_gaussian() {
        // α = 2: the transform reduces to 2 sin(V) √W, which is N(0, 2)
        return p.sigma * 2.0 * v.sin() * w.sqrt() + p.mu;
    }
    if p.alpha == 1.0 {
        let b = p.beta;
        let w_half = FRAC_PI_2 + b * v;
        let z = FRAC_2_PI * (w_half * v.tan() - b * ((FRAC_PI_2 * w * v.cos()) / w_half).ln());
        return p.sigma * z + FRAC_2_PI * b * p.sigma * p.sigma.ln() + p.mu;
    }
    let a = p.alpha;
    let t = p.beta * (PI * a / 2.0).tan();
    let b0 = t.atan() / a;
    let s = (1.0 + t * t).powf(1.0 / (2.0 * a));
    let z = s * (a * (v + b0)).sin() / v.cos().powf(1.0 / a) * ((v - a * (v + b0)).cos() / w).powf((1.0 - a) / a);
    p.sigma * z + p.mu
}

/// Rows `(x, pdf, cdf)` on `count` equally spaced points of `[lo, hi]`.
pub fn density_table(p: StableParams, lo: f64, hi: f64, count: usize) -> Result<Vec<(f64, f64, f64)>> {
    if count < 2 || !(hi > lo) {
        return Err(domain("density_table", format!("grid [{lo}, {hi}] with {count} points")));
    }
    (0..count)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / (count - 1) as f64;
            Ok((x, pdf(p, x)?, cdf(p, x)?))
        })
        .collect()
}
