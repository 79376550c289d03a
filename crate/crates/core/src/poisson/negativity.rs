//! Monte Carlo estimate of `P{H(c) < 0 for all c ∈ [c₁, c₂] \ {1/2}}`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{simulate_points, GaussianTail, DEFAULT_HORIZON};
use crate::error::{domain, Result};
use crate::harness::stats::wilson_interval;
use crate::rng::{trial_rng, StreamTag};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NegativityOptions {
    pub grid_step: f64,
    /// Each coarse interval that may hide a sign change is split into this many parts.
    pub refine: usize,
    pub horizon: f64,
    pub trials: u64,
    pub master_seed: u64,
}

impl Default for NegativityOptions {
    fn default() -> Self {
        NegativityOptions { grid_step: 2e-3, refine: 4, horizon: DEFAULT_HORIZON, trials: 100_000, master_seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NegativityEstimate {
    pub c1: f64,
    pub c2: f64,
    pub trials: u64,
    pub negative: u64,
    pub estimate: f64,
    pub ci95: (f64, f64),
    /// Trials counted negative on the coarse grid but not after refinement.
    pub flipped_by_refinement: u64,
}

struct Grid {
    coarse: Vec<f64>,
    fine: Vec<f64>,
    refine: usize,
}

fn build_grid(c_lo: f64, c2: f64, step: f64, refine: usize) -> Grid {
    let mut coarse = Vec::new();
    let mut k = 0u32;
    loop {
        let c = c_lo + step * k as f64;
        if c > c2 + 1e-12 || c >= 0.5 - 1e-12 {
            break;
        }
        coarse.push(c);
        k += 1;
    }
    if c2 < 0.5 && *coarse.last().unwrap() < c2 - 1e-12 {
        coarse.push(c2);
    }
    let mut fine = Vec::with_capacity((coarse.len() - 1) * refine + 1);
    for w in coarse.windows(2) {
        for j in 0..refine {
            fine.push(w[0] + (w[1] - w[0]) * j as f64 / refine as f64);
        }
    }
    fine.push(*coarse.last().unwrap());
    Grid { coarse, fine, refine }
}

/// Per-trial outcome: the smallest coarse index `b` with the path negative on
/// `[c_b, c₂]`, and the same index computed without refinement.
fn trial_boundary(grid: &Grid, tail: &GaussianTail, a: f64, master_seed: u64, trial: u64) -> Result<(usize, usize)> {
    let mut rng = trial_rng(master_seed, StreamTag::Poisson, trial);
    let real = simulate_points(a, &mut rng)?;
    let weights = tail.draw_weights(&mut rng);
    let logs: Vec<f64> = real.points().iter().map(|t| t.ln()).collect();
    let compensator = |c: f64| a.powf(1.0 - 2.0 * c) / (1.0 - 2.0 * c);

    let m = grid.coarse.len();
    let mut cur: Vec<f64> = logs.iter().map(|&l| (-2.0 * grid.coarse[0] * l).exp()).collect();
    let mut ratio: Vec<f64> = Vec::new();
    let mut ratio_step = f64::NAN;
    let mut values = Vec::with_capacity(m);
    for k in 0..m {
        if k > 0 {
            let d = grid.coarse[k] - grid.coarse[k - 1];
            if !((d - ratio_step).abs() <= 1e-15) {
                ratio = logs.iter().map(|&l| (-2.0 * d * l).exp()).collect();
                ratio_step = d;
            }
            for (x, r) in cur.iter_mut().zip(&ratio) {
                *x *= r;
            }
        }
        let sum: f64 = cur.iter().rev().sum();
        let c = grid.coarse[k];
        values.push(2.0 * sum - compensator(c) + tail.value(k * grid.refine, &weights));
    }

    let coarse_boundary = values.iter().rposition(|&v| v >= 0.0).map_or(0, |k| k + 1);
    for k in (0..m).rev() {
        if values[k] >= 0.0 {
            return Ok((k + 1, coarse_boundary));
        }
        if k + 1 < m {
            let (lo, hi) = (values[k], values[k + 1]);
            if lo.max(hi) + (hi - lo).abs() >= 0.0 {
                for j in 1..grid.refine {
                    let idx = k * grid.refine + j;
                    let c = grid.fine[idx];
                    let sum: f64 = logs.iter().rev().map(|&l| (-2.0 * c * l).exp()).sum();
                    if 2.0 * sum - compensator(c) + tail.value(idx, &weights) >= 0.0 {
                        return Ok((k + 1, coarse_boundary));
                    }
                }
            }
        }
    }
    Ok((0, coarse_boundary))
}

/// `f(c₁, c₂)` for several `c₁` sharing one grid and one set of trials, so the estimates
/// are exactly monotone in `c₁`. Every `c₁` must lie on the grid `min c₁ + k·step`.
pub fn negativity_curve(c1_list: &[f64], c2: f64, opts: NegativityOptions) -> Result<Vec<NegativityEstimate>> {
    if c1_list.is_empty() {
        return Err(domain("negativity", "no c1 given"));
    }
    let c_lo = c1_list.iter().copied().fold(f64::INFINITY, f64::min);
    if !(c_lo > 0.25) || !(c2 <= 0.5) || c1_list.iter().any(|&c| !(c < c2)) {
        return Err(domain("negativity", format!("need 1/4 < c1 < c2 <= 1/2, got c1 = {c1_list:?}, c2 = {c2}")));
    }
    if !(opts.grid_step > 0.0) || opts.refine == 0 || opts.trials == 0 || !(opts.horizon >= 10.0) {
        return Err(domain("negativity", format!("invalid options {opts:?}")));
    }
    let grid = build_grid(c_lo, c2, opts.grid_step, opts.refine);
    let mut indices = Vec::new();
    for &c1 in c1_list {
        let k = ((c1 - c_lo) / opts.grid_step).round() as usize;
        if k >= grid.coarse.len() || (grid.coarse[k] - c1).abs() > 1e-9 {
            return Err(domain("negativity", format!("c1 = {c1} is not on the grid {c_lo} + k·{}", opts.grid_step)));
        }
        indices.push(k);
    }
    let tail = GaussianTail::new(&grid.fine, opts.horizon)?;
    let outcomes: Vec<(usize, usize)> = (0..opts.trials)
        .into_par_iter()
        .map(|t| trial_boundary(&grid, &tail, opts.horizon, opts.master_seed, t))
        .collect::<Result<_>>()?;
    Ok(c1_list
        .iter()
        .zip(indices)
        .map(|(&c1, k)| {
            let negative = outcomes.iter().filter(|o| o.0 <= k).count() as u64;
            let coarse_negative = outcomes.iter().filter(|o| o.1 <= k).count() as u64;
            NegativityEstimate {
                c1,
                c2,
                trials: opts.trials,
                negative,
                estimate: negative as f64 / opts.trials as f64,
                ci95: wilson_interval(negative, opts.trials, 1.959_963_984_540_054),
                flipped_by_refinement: coarse_negative - negative,
            }
        })
        .collect())
}

/// `f(c₁, c₂)` with its Wilson 95% interval.
pub fn negativity_probability(c1: f64, c2: f64, opts: NegativityOptions) -> Result<NegativityEstimate> {
    Ok(negativity_curve(&[c1], c2, opts)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poisson::{h_path, PoissonRealization};

    #[test]
    fn grid_excludes_one_half() {
        let g = build_grid(0.3, 0.5, 0.05, 4);
        assert_eq!(g.coarse.len(), 4);
        assert!(*g.coarse.last().unwrap() < 0.5);
        assert_eq!(g.fine.len(), 13);
        let g = build_grid(0.3, 0.42, 0.05, 2);
        assert_eq!(g.coarse, vec![0.3, 0.35, 0.4, 0.42]);
    }

    #[test]
    fn empty_realization_is_negative_everywhere() {
        let real = PoissonRealization::new(1e4, vec![]).unwrap();
        let path = h_path(&real, &[0.27, 0.3, 0.4, 0.49]).unwrap();
        assert!(path.iter().all(|&v| v < 0.0));
    }

    #[test]
    fn small_run_is_monotone_and_reproducible() {
        let opts = NegativityOptions { trials: 400, horizon: 1e3, master_seed: 3, ..Default::default() };
        let a = negativity_curve(&[0.35, 0.3, 0.27], 0.5, opts).unwrap();
        let b = negativity_curve(&[0.35, 0.3, 0.27], 0.5, opts).unwrap();
        assert_eq!(a, b);
        assert!(a[0].negative >= a[1].negative && a[1].negative >= a[2].negative);
        assert!(a[0].estimate > 0.0 && a[0].estimate < 1.0, "{a:?}");
        assert!(negativity_curve(&[0.3, 0.311], 0.5, opts).is_err());
        assert!(negativity_probability(0.3, 0.25, opts).is_err());
    }
}
