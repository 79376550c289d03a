//! Empirical distribution functions, Kolmogorov–Smirnov distances, moment estimates
//! and binomial confidence intervals.

use crate::error::{domain, Error, Result};

fn sorted(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.iter().any(|x| x.is_nan()) {
        return Err(domain("ks_statistic", "NaN sample"));
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// `sup_x |F_N(x) − F(x)|` over the sample points, both one-sided terms included.
///
/// The left term compares `F` just below each sample point with the empirical left
/// limit, so reference CDFs with atoms at sample points are handled exactly.
pub fn ks_statistic<F: FnMut(f64) -> f64>(samples: &[f64], mut cdf: F) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples { need: 2, got: samples.len() });
    }
    let sorted = sorted(samples)?;
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let x = sorted[i];
        let j = i + sorted[i..].partition_point(|&y| y == x);
        d = d.max((j as f64 / n - cdf(x)).abs()).max((cdf(x.next_down()) - i as f64 / n).abs());
        i = j;
    }
    Ok(d)
}

/// Fast path for continuous CDFs and samples already in ascending order; one CDF
/// evaluation per sample.
pub fn ks_sorted<F: FnMut(f64) -> f64>(sorted: &[f64], mut cdf: F) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let x = sorted[i];
        let j = i + sorted[i..].partition_point(|&y| y == x);
        let f = cdf(x);
        d = d.max(j as f64 / n - f).max(f - i as f64 / n);
        i = j;
    }
    d
}

/// [`ks_sorted`] with the reference CDF evaluated beforehand, one value per sample.
pub fn ks_sorted_with_values(sorted: &[f64], cdf_values: &[f64]) -> f64 {
    let mut k = 0;
    ks_sorted(sorted, |_| {
        let v = cdf_values[k];
        k += 1;
        v
    })
}

/// Upper bound on the KS distance of a large sorted sample from a continuous CDF,
/// evaluating the CDF only at every `stride`-th order statistic. On each cell between
/// evaluated points both functions are monotone, so the distance there is at most
/// `max(F_N(right−) − F(left), F(right) − F_N(left))`. The bound exceeds the exact
/// value by at most one cell's increment of `F_N` plus that of `F`.
pub fn ks_upper_bound<F: FnMut(f64) -> f64>(sorted: &[f64], stride: usize, mut cdf: F) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return 1.0;
    }
    let nf = n as f64;
    let stride = stride.max(1);
    let mut idx: Vec<usize> = (0..n).step_by(stride).collect();
    if *idx.last().unwrap() != n - 1 {
        idx.push(n - 1);
    }
    let le = |x: f64| sorted.partition_point(|&y| y <= x) as f64 / nf;
    let lt = |x: f64| sorted.partition_point(|&y| y < x) as f64 / nf;
    let mut prev_x = f64::NEG_INFINITY;
    let mut prev_f = 0.0;
    let mut prev_le = 0.0;
    let mut d: f64 = 0.0;
    for &i in &idx {
        let x = sorted[i];
        let f = cdf(x);
        if x > prev_x {
            d = d.max(lt(x) - prev_f).max(f - prev_le);
        }
        d = d.max((le(x) - f).abs());
        prev_x = x;
        prev_f = f;
        prev_le = le(x);
    }
    d.max(1.0 - prev_f)
}

/// `O(N²)` oracle: at each sample point the empirical CDF is recounted from scratch,
/// together with its left limit.
pub fn ks_brute_force<F: FnMut(f64) -> f64>(samples: &[f64], mut cdf: F) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples { need: 2, got: samples.len() });
    }
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for &x in samples {
        let le = samples.iter().filter(|&&y| y <= x).count() as f64 / n;
        let lt = samples.iter().filter(|&&y| y < x).count() as f64 / n;
        d = d.max((le - cdf(x)).abs()).max((cdf(x.next_down()) - lt).abs());
    }
    Ok(d)
}

/// Two-sample Kolmogorov–Smirnov distance between empirical CDFs.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::TooFewSamples { need: 2, got: a.len().min(b.len()) });
    }
    let (a, b) = (sorted(a)?, sorted(b)?);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Empirical CDF of a sample.
#[derive(Clone, Debug)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::TooFewSamples { need: 1, got: 0 });
        }
        Ok(Ecdf { sorted: sorted(samples)? })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&y| y <= x) as f64 / self.sorted.len() as f64
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }
}

/// `k`-th raw moment with its jackknife standard error.
pub fn moment_estimator(samples: &[f64], k: u32) -> Result<(f64, f64)> {
    let n = samples.len();
    if n < 30 {
        return Err(Error::TooFewSamples { need: 30, got: n });
    }
    let powers: Vec<f64> = samples.iter().map(|x| x.powi(k as i32)).collect();
    let total: f64 = powers.iter().sum();
    let nf = n as f64;
    let estimate = total / nf;
    let loo: Vec<f64> = powers.iter().map(|p| (total - p) / (nf - 1.0)).collect();
    let loo_mean = loo.iter().sum::<f64>() / nf;
    let ss: f64 = loo.iter().map(|t| (t - loo_mean).powi(2)).sum();
    Ok((estimate, ((nf - 1.0) / nf * ss).sqrt()))
}

/// Sample mean and its standard error.
pub fn mean_and_se(samples: &[f64]) -> Result<(f64, f64)> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::TooFewSamples { need: 2, got: n });
    }
    let nf = n as f64;
    let mean = samples.iter().sum::<f64>() / nf;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    Ok((mean, (var / nf).sqrt()))
}

/// Pearson correlation coefficient.
pub fn correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::TooFewSamples { need: 2, got: x.len().min(y.len()) });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}
