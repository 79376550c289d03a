//! The Poisson process of intensity ½ on `(0, ∞)` and the functionals
//! `H(c) = ∫_0^∞ V^{-2c} dR(V)`, `R(V) = N(V) − V`, `N(V) = 2·#{T_j ≤ V}`.
//!
//! Realizations are simulated on `(0, A]`. The part of each functional beyond `A` is
//! replaced by a Gaussian with the exact covariance of the discarded integral.

mod negativity;
mod partitions;

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

pub use negativity::{negativity_curve, negativity_probability, NegativityEstimate, NegativityOptions};
pub use partitions::{moments_exact, partitions_no_singletons, NoSingletonPartitions, MAX_PARTITION_SIZE};

/// Default simulation horizon.
pub const DEFAULT_HORIZON: f64 = 1e4;

/// Points `0 < T_1 < T_2 < … ≤ A` of one realization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonRealization {
    horizon: f64,
    points: Vec<f64>,
}

impl PoissonRealization {
    pub fn new(horizon: f64, points: Vec<f64>) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(domain("PoissonRealization", format!("horizon {horizon} must be positive")));
        }
        if points.first().is_some_and(|&t| !(t > 0.0)) || points.last().is_some_and(|&t| t > horizon) {
            return Err(domain("PoissonRealization", "points must lie in (0, A]"));
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(domain("PoissonRealization", "points must be strictly ascending"));
        }
        Ok(PoissonRealization { horizon, points })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// `N(V) = 2·#{T_j ≤ V}` for `V ≤ A`.
    pub fn count(&self, v: f64) -> f64 {
        2.0 * self.points.partition_point(|&t| t <= v) as f64
    }

    /// `R(V) = N(V) − V`.
    pub fn remainder(&self, v: f64) -> f64 {
        self.count(v) - v
    }
}

/// One realization on `(0, A]`, built from exponential gaps of mean 2.
pub fn simulate_points<R: Rng + ?Sized>(a: f64, rng: &mut R) -> Result<PoissonRealization> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(domain("simulate_points", format!("A = {a} must be positive")));
    }
    let mut points = Vec::with_capacity((0.5 * a + 4.0 * a.sqrt() + 8.0) as usize);
    let mut t = 0.0;
    loop {
        let gap: f64 = rng.sample(Exp1);
        t += 2.0 * gap;
        if t > a {
            break;
        }
        if t > 0.0 && points.last().is_none_or(|&p| t > p) {
            points.push(t);
        }
    }
    Ok(PoissonRealization { horizon: a, points })
}

fn check_c(func: &'static str, c: f64) -> Result<()> {
    if c > 0.25 && c < 0.5 {
        Ok(())
    } else {
        Err(domain(func, format!("c = {c} outside (1/4, 1/2)")))
    }
}

/// `2 Σ_{T_j ≤ A} T_j^{-2c} − A^{1−2c}/(1−2c)`.
pub fn h_truncated(real: &PoissonRealization, c: f64) -> Result<f64> {
    check_c("H_truncated", c)?;
    Ok(head_value(real, c))
}

fn head_value(real: &PoissonRealization, c: f64) -> f64 {
    let a = real.horizon;
    if c == 0.5 {
        return z0_truncated(real);
    }
    let sum: f64 = real.points.iter().rev().map(|&t| t.powf(-2.0 * c)).sum();
    2.0 * sum - a.powf(1.0 - 2.0 * c) / (1.0 - 2.0 * c)
}

/// `H(c, δ)` on `(δ, A]`: `2 Σ_{δ < T_j ≤ A} T_j^{-2c} − (A^{1−2c} − δ^{1−2c})/(1−2c)`.
pub fn h_truncated_delta(real: &PoissonRealization, c: f64, delta: f64) -> Result<f64> {
    check_c("H_truncated_delta", c)?;
    let a = real.horizon;
    if !(delta > 0.0 && delta < a) {
        return Err(domain("H_truncated_delta", format!("delta = {delta} outside (0, A)")));
    }
    let start = real.points.partition_point(|&t| t <= delta);
    let sum: f64 = real.points[start..].iter().rev().map(|&t| t.powf(-2.0 * c)).sum();
    Ok(2.0 * sum - (a.powf(1.0 - 2.0 * c) - delta.powf(1.0 - 2.0 * c)) / (1.0 - 2.0 * c))
}

/// `2 Σ_{T_j ≤ A} T_j^{-1} − log A`.
pub fn z0_truncated(real: &PoissonRealization) -> f64 {
    2.0 * real.points.iter().rev().map(|&t| t.recip()).sum::<f64>() - real.horizon.ln()
}

/// The `k`-th cumulant of `∫_A^∞ V^{-2c} dR(V)`: `2^{k−1} A^{1−2ck}/(2ck − 1)` for `k ≥ 2`.
pub fn tail_cumulant(k: u32, c: f64, a: f64) -> f64 {
    if k < 2 {
        return 0.0;
    }
    let kc = 2.0 * c * k as f64;
    2f64.powi(k as i32 - 1) * a.powf(1.0 - kc) / (kc - 1.0)
}

/// `2A^{1−4c}/(4c − 1)`.
pub fn tail_variance(c: f64, a: f64) -> f64 {
    tail_cumulant(2, c, a)
}

/// `4A^{1−6c}/(6c − 1)`, the skewness diagnostic of the Gaussian tail surrogate.
pub fn tail_third_cumulant(c: f64, a: f64) -> f64 {
    tail_cumulant(3, c, a)
}

/// `Cov(∫_A^∞ V^{-2c₁} dR, ∫_A^∞ V^{-2c₂} dR) = 2A^{1−2(c₁+c₂)}/(2(c₁+c₂) − 1)`.
pub fn tail_covariance(c1: f64, c2: f64, a: f64) -> f64 {
    let s = 2.0 * (c1 + c2);
    2.0 * a.powf(1.0 - s) / (s - 1.0)
}

/// A centered Gaussian vector with the tail covariance on a fixed list of `c` values,
/// factored by pivoted Cholesky as `C ≈ L Lᵀ` with `L` of low rank.
#[derive(Clone, Debug)]
pub struct GaussianTail {
    cs: Vec<f64>,
    rank: usize,
    factor: Vec<f64>,
}

impl GaussianTail {
    pub fn new(cs: &[f64], a: f64) -> Result<Self> {
        if let Some(&c) = cs.iter().find(|&&c| !(c > 0.25 && c <= 0.5)) {
            return Err(domain("GaussianTail", format!("c = {c} outside (1/4, 1/2]")));
        }
        if !(a > 0.0) {
            return Err(domain("GaussianTail", format!("A = {a} must be positive")));
        }
        let m = cs.len();
        let cov = |i: usize, j: usize| tail_covariance(cs[i], cs[j], a);
        let mut diag: Vec<f64> = (0..m).map(|i| cov(i, i)).collect();
        let scale = diag.iter().copied().fold(0.0, f64::max);
        let mut cols: Vec<Vec<f64>> = Vec::new();
        let mut used = vec![false; m];
        while cols.len() < m {
            let (piv, &d) = diag
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .max_by(|a, b| a.1.total_cmp(b.1))
                .expect("unused pivot");
            if d <= 1e-15 * scale {
                break;
            }
            used[piv] = true;
            let root = d.sqrt();
            let col: Vec<f64> = (0..m)
                .map(|i| {
                    if used[i] && i != piv {
                        return 0.0;
                    }
                    let prior: f64 = cols.iter().map(|c| c[i] * c[piv]).sum();
                    (cov(i, piv) - prior) / root
                })
                .collect();
            for i in 0..m {
                diag[i] -= col[i] * col[i];
            }
            cols.push(col);
        }
        let rank = cols.len();
        let mut factor = vec![0.0; m * rank];
        for (k, col) in cols.iter().enumerate() {
            for i in 0..m {
                factor[i * rank + k] = col[i];
            }
        }
        Ok(GaussianTail { cs: cs.to_vec(), rank, factor })
    }

    pub fn cs(&self) -> &[f64] {
        &self.cs
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Standard normal weights for one draw of the whole vector.
    pub fn draw_weights<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.rank).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
    }

    /// Entry `i` of the vector determined by `weights`.
    pub fn value(&self, i: usize, weights: &[f64]) -> f64 {
        self.factor[i * self.rank..(i + 1) * self.rank].iter().zip(weights).map(|(l, z)| l * z).sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let w = self.draw_weights(rng);
        (0..self.cs.len()).map(|i| self.value(i, &w)).collect()
    }
}

/// Jointly distributed draws of `H(c)` for each `c` in `cs`, from one realization on
/// `(0, A]` plus the Gaussian tail surrogate. `c = 1/2` gives `Z_0`.
pub fn h_sample_joint<R: Rng + ?Sized>(cs: &[f64], a: f64, rng: &mut R) -> Result<Vec<f64>> {
    if !(a >= 10.0) {
        return Err(domain("H_sample", format!("A = {a} must be at least 10")));
    }
    let tail = GaussianTail::new(cs, a)?;
    let real = simulate_points(a, rng)?;
    let noise = tail.sample(rng);
    Ok(h_path(&real, cs)?.into_iter().zip(noise).map(|(h, t)| h + t).collect())
}

/// One draw of `H(c) ≈ H_truncated + N(0, 2A^{1−4c}/(4c−1))`.
pub fn h_sample<R: Rng + ?Sized>(c: f64, a: f64, rng: &mut R) -> Result<f64> {
    check_c("H_sample", c)?;
    Ok(h_sample_joint(&[c], a, rng)?[0])
}

/// One draw of `Z_0 ≈ 2 Σ_{T_j ≤ A} T_j^{-1} − log A + N(0, 2/A)`.
pub fn z0_sample<R: Rng + ?Sized>(a: f64, rng: &mut R) -> Result<f64> {
    if !(a >= 10.0) {
        return Err(domain("Z0_sample", format!("A = {a} must be at least 10")));
    }
    let real = simulate_points(a, rng)?;
    let g: f64 = rng.sample(StandardNormal);
    Ok(z0_truncated(&real) + g * (2.0 / a).sqrt())
}

/// `(2c − 1/2)^{1/2} H(c)`.
pub fn gaussian_rescaled_sample<R: Rng + ?Sized>(c: f64, a: f64, rng: &mut R) -> Result<f64> {
    Ok((2.0 * c - 0.5).sqrt() * h_sample(c, a, rng)?)
}

/// The truncated functional at every `c` of an ascending grid in `(1/4, 1/2]`, all from
/// the same realization; at `c = 1/2` the entry is the `Z_0` form.
pub fn h_path(real: &PoissonRealization, c_grid: &[f64]) -> Result<Vec<f64>> {
    if let Some(&c) = c_grid.iter().find(|&&c| !(c > 0.25 && c <= 0.5)) {
        return Err(domain("H_path", format!("c = {c} outside (1/4, 1/2]")));
    }
    if c_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Config("c grid must be strictly ascending".into()));
    }
    if c_grid.len() <= 2 {
        return Ok(c_grid.iter().map(|&c| head_value(real, c)).collect());
    }
    let logs: Vec<f64> = real.points.iter().map(|t| t.ln()).collect();
    let a = real.horizon;
    Ok(c_grid
        .iter()
        .map(|&c| {
            let sum: f64 = logs.iter().rev().map(|&l| (-2.0 * c * l).exp()).sum();
            if c == 0.5 {
                2.0 * sum - a.ln()
            } else {
                2.0 * sum - a.powf(1.0 - 2.0 * c) / (1.0 - 2.0 * c)
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{trial_rng, StreamTag};

    #[test]
    fn realization_validation() {
        assert!(PoissonRealization::new(10.0, vec![1.0, 3.0, 9.5]).is_ok());
        assert!(PoissonRealization::new(10.0, vec![1.0, 1.0]).is_err());
        assert!(PoissonRealization::new(10.0, vec![0.0]).is_err());
        assert!(PoissonRealization::new(10.0, vec![11.0]).is_err());
        let r = PoissonRealization::new(10.0, vec![1.0, 3.0]).unwrap();
        assert_eq!(r.count(2.0), 2.0);
        assert_eq!(r.remainder(5.0), -1.0);
    }

    #[test]
    fn empty_and_single_point_cases() {
        let empty = PoissonRealization::new(100.0, vec![]).unwrap();
        let c = 0.35f64;
        assert!((h_truncated(&empty, c).unwrap() + 100f64.powf(0.3) / 0.3).abs() < 1e-12);
        assert!((z0_truncated(&empty) + 100f64.ln()).abs() < 1e-15);
        let one = PoissonRealization::new(2.0, vec![1.0]).unwrap();
        let want = 2.0 - 2f64.powf(0.4) / 0.4;
        assert!((h_truncated(&one, 0.3).unwrap() - want).abs() < 1e-14);
        assert!(h_truncated(&one, 0.25).is_err());
        assert!(h_truncated(&one, 0.5).is_err());
    }

    #[test]
    fn tail_formulas() {
        assert!((tail_variance(0.3, 1e4) - 10.0 * 10f64.powf(-0.8)).abs() < 1e-12);
        assert!((tail_variance(0.5, 200.0) - 0.01).abs() < 1e-15);
        assert!((tail_third_cumulant(0.35, 1e4) - 4.0 * 1e4f64.powf(1.0 - 2.1) / 1.1).abs() < 1e-15);
    }

    #[test]
    fn path_matches_pointwise_values() {
        let real = simulate_points(500.0, &mut trial_rng(5, StreamTag::Poisson, 0)).unwrap();
        let grid = [0.27, 0.3, 0.41, 0.45, 0.5];
        let path = h_path(&real, &grid).unwrap();
        for (c, v) in grid.iter().zip(&path) {
            let want = if *c == 0.5 { z0_truncated(&real) } else { h_truncated(&real, *c).unwrap() };
            assert!((v - want).abs() < 1e-10 * want.abs().max(1.0));
        }
    }

    #[test]
    fn gaussian_tail_reproduces_covariance() {
        let cs = [0.26, 0.3, 0.4, 0.5];
        let a = 1e3;
        let tail = GaussianTail::new(&cs, a).unwrap();
        for i in 0..cs.len() {
            for j in 0..cs.len() {
                let got: f64 = (0..tail.rank()).map(|k| tail.factor[i * tail.rank + k] * tail.factor[j * tail.rank + k]).sum();
                let want = tail_covariance(cs[i], cs[j], a);
                assert!((got - want).abs() < 1e-12 * want.abs().max(1.0), "{i} {j}");
            }
        }
    }

    #[test]
    fn deterministic_streams() {
        let a = h_sample(0.4, 100.0, &mut trial_rng(1, StreamTag::Poisson, 7)).unwrap();
        let b = h_sample(0.4, 100.0, &mut trial_rng(1, StreamTag::Poisson, 7)).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
