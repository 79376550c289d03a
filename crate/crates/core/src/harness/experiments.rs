//! Named end-to-end experiments. Each returns an [`ExperimentReport`] whose checks are
//! tagged with the acceptance criterion they realize.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{ExperimentReport, Relation};
use super::rogers::rogers_second_moment;
use super::stats::{correlation, ks_brute_force, ks_sorted, ks_statistic, mean_and_se, moment_estimator};
use crate::enumeration::{brute_force_within, vectors_within, VectorLengthList};
use crate::epstein::{height_limit, height_statistic_from, Cutoff, EpsteinEvaluator};
use crate::error::{Error, Result};
use crate::lattice::{default_walk_steps, sample_lattice, Lattice, DEFAULT_PRIME};
use crate::poisson::{
    h_path, h_truncated_delta, moments_exact, negativity_curve, partitions_no_singletons, simulate_points,
    tail_cumulant, tail_variance, z0_truncated, GaussianTail, NegativityOptions,
};
use crate::quad::{integrate, QuadOptions};
use crate::rng::{trial_rng, StreamTag};
use crate::specfun::{ball_geometry, ln_g_incomplete, log_gamma, normal_cdf, zeta_int};
use crate::stable::{self, affine, params_for_h, params_for_z0, StableParams};

/// Experiment names accepted by [`run_experiment`].
pub const EXPERIMENTS: [&str; 11] = [
    "anchors",
    "oracles",
    "siegel-check",
    "variance-bound",
    "stable-match",
    "z0-match",
    "moments",
    "gaussian-limit",
    "negativity",
    "epstein-vs-limit",
    "height-limit",
];

/// Environment variable naming a directory for cached per-lattice functionals.
pub const CACHE_ENV: &str = "EPSTEIN_LAB_CACHE";

/// A dimension or a list of dimensions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Dims {
    One(usize),
    Many(Vec<usize>),
}

impl Dims {
    pub fn to_vec(&self) -> Vec<usize> {
        match self {
            Dims::One(n) => vec![*n],
            Dims::Many(v) => v.clone(),
        }
    }
}

/// Experiment configuration. Unset fields take the experiment's defaults (see
/// [`default_config`]); setting a field the experiment does not use is an error.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<Dims>,
    /// Hecke level.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    /// Hecke walk length; `0` selects [`default_walk_steps`].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(rename = "A", skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refine: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub volumes: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $name:expr, [$($f:ident),*]) => {
        $(
            if $top.$f.is_some() {
                if $base.$f.is_none() {
                    return Err(Error::Config(format!("experiment '{}' does not use '{}'", $name, stringify!($f))));
                }
                $base.$f = $top.$f.clone();
            }
        )*
    };
}

impl ExperimentConfig {
    /// Parses a JSON config. The document is either a flat config or an object keyed
    /// by experiment name, in which case the entry for `name` is used (or defaults if
    /// there is none).
    pub fn from_json_for(text: &str, name: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let keyed = value.as_object().is_some_and(|o| o.keys().any(|k| EXPERIMENTS.contains(&k.as_str())));
        let entry = if keyed { value.get(name).cloned().unwrap_or(serde_json::json!({})) } else { value };
        serde_json::from_value(entry).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file_for(path: impl AsRef<Path>, name: &str) -> Result<Self> {
        Self::from_json_for(&std::fs::read_to_string(path)?, name)
    }

    fn merged(&self, name: &str) -> Result<ExperimentConfig> {
        let mut base = default_config(name)?;
        overlay!(base, self, name, [n, p, steps, trials, a, c_grid, grid_step, refine, tol, volumes, delta, threshold]);
        base.master_seed = Some(self.master_seed.unwrap_or(0));
        base.cache_dir = self.cache_dir.clone().or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from));
        Ok(base)
    }
}

/// Full default configuration of experiment `name`; the fields left `None` are the
/// ones the experiment does not read.
pub fn default_config(name: &str) -> Result<ExperimentConfig> {
    let mut c = ExperimentConfig::default();
    match name {
        "anchors" => {
            c.n = Some(Dims::Many((2..=8).collect()));
            c.p = Some(DEFAULT_PRIME);
            c.steps = Some(0);
            c.trials = Some(100);
            c.tol = Some(1e-10);
        }
        "oracles" => {
            c.n = Some(Dims::Many((2..=6).collect()));
            c.p = Some(DEFAULT_PRIME);
            c.trials = Some(50);
            c.volumes = Some(vec![40.0]);
        }
        "siegel-check" => {
            c.n = Some(Dims::One(8));
            c.p = Some(65_537);
            c.steps = Some(1);
            c.trials = Some(10_000);
            c.volumes = Some(vec![1.0, 5.0, 10.0]);
        }
        "variance-bound" => {
            c.n = Some(Dims::One(8));
            c.p = Some(DEFAULT_PRIME);
            c.steps = Some(0);
            c.trials = Some(2000);
            c.a = Some(10.0);
            c.delta = Some(2.0);
        }
        "stable-match" => {
            c.trials = Some(100_000);
            c.a = Some(1e4);
            c.c_grid = Some(vec![0.30, 0.35, 0.40, 0.45]);
        }
        "z0-match" => {
            c.trials = Some(100_000);
            c.a = Some(1e4);
        }
        "moments" => {
            c.trials = Some(100_000);
            c.a = Some(1e4);
            c.c_grid = Some(vec![0.35]);
            c.delta = Some(1.0);
        }
        "gaussian-limit" => {
            c.trials = Some(100_000);
            c.a = Some(1e4);
            c.c_grid = Some(vec![0.40, 0.32, 0.27, 0.26]);
            c.threshold = Some(0.05);
        }
        "negativity" => {
            c.trials = Some(100_000);
            c.a = Some(1e4);
            c.c_grid = Some(vec![0.35, 0.30, 0.27]);
            c.grid_step = Some(2e-3);
            c.refine = Some(4);
        }
        "epstein-vs-limit" | "height-limit" => {
            c.n = Some(Dims::Many(vec![8, 16, 24]));
            c.p = Some(DEFAULT_PRIME);
            c.steps = Some(0);
            c.trials = Some(2000);
            c.a = Some(1e4);
            c.c_grid = Some(vec![0.35]);
        }
        other => return Err(Error::UnknownExperiment(other.to_string())),
    }
    c.master_seed = Some(0);
    Ok(c)
}

/// Runs experiment `name` under `config` (see [`EXPERIMENTS`]).
pub fn run_experiment(name: &str, config: &ExperimentConfig) -> Result<ExperimentReport> {
    let cfg = config.merged(name)?;
    let seed = cfg.master_seed.unwrap_or(0);
    let mut report = ExperimentReport::new(name, seed);
    let start = Instant::now();
    match name {
        "anchors" => anchors(&cfg, &mut report)?,
        "oracles" => oracles(&cfg, &mut report)?,
        "siegel-check" => siegel_check(&cfg, &mut report)?,
        "variance-bound" => variance_bound(&cfg, &mut report)?,
        "stable-match" => stable_match(&cfg, &mut report)?,
        "z0-match" => z0_match(&cfg, &mut report)?,
        "moments" => moments(&cfg, &mut report)?,
        "gaussian-limit" => gaussian_limit(&cfg, &mut report)?,
        "negativity" => negativity(&cfg, &mut report)?,
        "epstein-vs-limit" => epstein_vs_limit(&cfg, &mut report)?,
        "height-limit" => height_limit_experiment(&cfg, &mut report)?,
        other => return Err(Error::UnknownExperiment(other.to_string())),
    }
    report.wall_time_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

fn record_params(cfg: &ExperimentConfig, r: &mut ExperimentReport) {
    if let Ok(serde_json::Value::Object(map)) = serde_json::to_value(cfg) {
        for (k, v) in map {
            if k != "master_seed" && k != "cache_dir" {
                r.parameters.insert(k, v);
            }
        }
    }
}

fn check_range(what: &str, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Config(format!("invalid {what}")))
    }
}

fn walk_steps(cfg: &ExperimentConfig, n: usize) -> u32 {
    match cfg.steps.unwrap_or(0) {
        0 => default_walk_steps(n, cfg.p.unwrap_or(DEFAULT_PRIME)),
        s => s,
    }
}

fn draw_lattices(cfg: &ExperimentConfig, n: usize, count: u64) -> Result<Vec<Lattice<f64>>> {
    let p = cfg.p.unwrap_or(DEFAULT_PRIME);
    let steps = walk_steps(cfg, n);
    let seed = cfg.master_seed.unwrap_or(0);
    (0..count).into_par_iter().map(|t| sample_lattice(n, p, steps, seed, t)).collect()
}

fn stable_cdf_values(p: StableParams, sorted: &[f64]) -> Result<Vec<f64>> {
    sorted.par_iter().map(|&x| stable::cdf(p, x)).collect()
}

fn ks_against(p: StableParams, samples: &mut [f64]) -> Result<f64> {
    samples.sort_by(f64::total_cmp);
    let values = stable_cdf_values(p, samples)?;
    Ok(super::stats::ks_sorted_with_values(samples, &values))
}

// ---------------------------------------------------------------------------------
// criteria 1–3

/// `∫_{R^n} G(s, π|x|²) dx` in polar coordinates with `r = e^y`.
pub fn gaussian_kernel_integral(n: usize, s: f64) -> Result<(f64, f64)> {
    let log_surface = ball_geometry::<f64>(n).log_surface;
    let nf = n as f64;
    let f = |y: f64| {
        let x = std::f64::consts::PI * (2.0 * y).exp();
        match ln_g_incomplete(s, x) {
            Ok(lg) => (log_surface + nf * y + lg).exp(),
            Err(_) => f64::NAN,
        }
    };
    // below y = lo the integrand is ~ e^{(n−2s)y}; with n − 2s ≥ 0.2 the omitted part
    // is under 1e-29 of the total
    let lo = (-745.0 / (nf - 2.0 * s).max(1e-3) - 5.0).max(-345.0);
    let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-12, max_intervals: 20_000 };
    integrate(f, lo, 6.0, opts)
}

fn anchors(cfg: &ExperimentConfig, r: &mut ExperimentReport) -> Result<()> {
    record_params(cfg, r);
    let dims = cfg.n.as_ref().unwrap().to_vec();
    let trials = cfg.trials.unwrap();
    let tol = cfg.tol.unwrap();
    check_range("n", !dims.is_empty() && dims.iter().all(|&n| n >= 1))?;
    check_range("tol", tol > 0.0)?;
    let p = cfg.p.unwrap();
    let seed = cfg.master_seed.unwrap();

    let lattices: Vec<Lattice<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let n = dims[t as usize % dims.len()];
            sample_lattice(n, p, walk_steps(cfg, n), seed, t)
        })
        .collect::<Result<_>>()?;

    // E_n(L, s) → −1 as s → 0, through the incomplete-gamma expansion; a power of two
    // keeps n/2 − s exact
    let s0 = 2f64.powi(-34);
    let e0: Vec<f64> = lattices
        .par_iter()
        .map(|l| {
            let ev = EpsteinEvaluator::new(l, Cutoff::Certified { tol })?;
            let f = ev.f(s0)?;
            Ok(f.value * (s0 * std::f64::consts::PI.ln() - log_gamma(s0)?).exp())
        })
        .collect::<Result<_>>()?;
    let worst = e0.iter().map(|e| (e + 1.0).abs()).fold(0.0, f64::max);
    r.stat("E(L, 2^-34) mean", e0.iter().sum::<f64>() / e0.len() as f64);
    r.check(Some(1), "max |E_n(L,0) + 1| over sampled lattices", worst, Relation::AtMost, 0.0, 1e-8);

    // functional equation and residue on the first lattices
    let probe = lattices.len().min(14);
    let mut fe_ratio: f64 = 0.0;
    let mut fe_residual: f64 = 0.0;
    let mut residue_err: f64 = 0.0;
    for l in &lattices[..probe] {
        let n = l.dim();
        let half = 0.5 * n as f64;
        let ev = EpsteinEvaluator::new(l, Cutoff::Certified { tol })?;
        let evd = EpsteinEvaluator::new(&l.dual()?, Cutoff::Certified { tol })?;
        for frac in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let s = frac * half;
            let a = ev.f(s)?;
            let b = evd.f(half - s)?;
            let resid = (a.value - b.value).abs();
            let allowed = a.tail_bound + b.tail_bound + 1e-13 * a.value.abs().max(1.0);
            fe_residual = fe_residual.max(resid);
            fe_ratio = fe_ratio.max(resid / allowed);
        }
        let h = 1e-4;
        let plus = ev.e(half + h)?.value;
        let minus = ev.e(half - h)?.value;
        let residue = 0.5 * h * (plus - minus);
        let want = (half * std::f64::consts::PI.ln() - log_gamma(half)?).exp();
        residue_err = residue_err.max((residue / want - 1.0).abs());
    }
    r.stat("functional equation max residual", fe_residual);
    r.check(Some(1), "functional equation residual / combined tail bounds", fe_ratio, Relation::AtMost, 1.0, 0.0);
    r.check(Some(1), "near-pole residue relative error", residue_err, Relation::Less, 1e-4, 0.0);

    // E_1(Z, 1) against 2ζ(2) from the series
    let z1 = EpsteinEvaluator::new(&Lattice::integer(1), Cutoff::Certified { tol: 1e-13 })?;
    let e1 = z1.e(1.0)?.value;
    let target = 2.0 * zeta_int::<f64>(2)?;
    r.stat("E_1(Z,1)", e1);
    r.check(Some(2), "E_1(Z,1) vs 2 zeta(2)", e1, Relation::Within, target, 1e-10);

    // the Gaussian-kernel integral
    let mut worst_rel: f64 = 0.0;
    for n in [2usize, 5, 10] {
        for c in [0.3, 0.45] {
            let s = c * n as f64;
            let (val, _) = gaussian_kernel_integral(n, s)?;
            let want = 1.0 / (0.5 * n as f64 - s);
            let rel = (val / want - 1.0).abs();
            r.stat(format!("kernel integral rel err n={n} c={c}"), rel);
            worst_rel = worst_rel.max(rel);
        }
    }
    r.check(Some(3), "max relative error of the kernel integral", worst_rel, Relation::Less, 1e-6, 0.0);
    Ok(())
}

// ---------------------------------------------------------------------------------
// criterion 13

fn all_set_partitions(k: usize) -> Vec<Vec<Vec<usize>>> {
    let mut parts: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for i in 0..k {
        let mut next = Vec::new();
        for p in &parts {
            for b in 0..p.len() {
                let mut q = p.clone();
                q[b].push(i);
                next.push(q);
            }
            let mut q = p.clone();
            q.push(vec![i]);
            next.push(q);
        }
        parts = next;
    }
    parts
}

fn oracles(cfg: &ExperimentConfig, r: &mut ExperimentReport) -> Result<()> {
    record_params(cfg, r);
    let dims = cfg.n.as_ref().unwrap().to_vec();
    let trials = cfg.trials.unwrap();
    let volume = cfg.volumes.as_ref().unwrap().first().copied().unwrap_or(40.0);
    check_range("n", !dims.is_empty() && dims.iter().all(|&n| (1..=6).contains(&n)))?;
    let p = cfg.p.unwrap();
    let seed = cfg.master_seed.unwrap();

    let mismatches: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let n = dims[t as usize % dims.len()];
            let l = sample_lattice(n, p, 1, seed, t)?;
            let radius = (volume / ball_geometry::<f64>(n).volume).powf(1.0 / n as f64);
            let mut a: Vec<Vec<i64>> = vectors_within(&l, radius)?.into_iter().map(|v| v.coeffs).collect();
            let mut b: Vec<Vec<i64>> = brute_force_within(&l, radius)?.into_iter().map(|v| v.coeffs).collect();
            a.sort();
            b.sort();
            Ok(u64::from(a != b))
        })
        .collect::<Result<Vec<u64>>>()?
        .into_iter()
        .sum();
    r.check(Some(13), "enumeration vs brute-force box: mismatching lattices", mismatches as f64, Relation::Within, 0.0, 0.0);

    let law = params_for_h(0.35)?;
    let mut rng = trial_rng(seed, StreamTag::Misc, 13);
    let mut worst: f64 = 0.0;
    for size in [10usize, 100, 1000] {
        // rounding produces ties
        let xs: Vec<f64> = (0..size).map(|_| (stable::sample(law, &mut rng) * 10.0).round() / 10.0).collect();
        let cdf = |x: f64| stable::cdf(law, x).unwrap_or(f64::NAN);
        let fast = ks_statistic(&xs, cdf)?;
        let slow = ks_brute_force(&xs, cdf)?;
        worst = worst.max((fast - slow).abs());
    }
    r.check(Some(13), "KS vs O(N^2) brute force: max difference", worst, Relation::Within, 0.0, 0.0);

    let mut bad = 0u32;
    for k in 0..=8 {
        let want = all_set_partitions(k).into_iter().filter(|q| q.iter().all(|b| b.len() >= 2)).count();
        if partitions_no_singletons(k)?.count() != want {
            bad += 1;
        }
    }
    r.check(Some(13), "partition counts vs brute-force filter, k <= 8: mismatches", bad as f64, Relation::Within, 0.0, 0.0);
    Ok(())
}

// ---------------------------------------------------------------------------------
// criterion 4

/// `E[N_n(V)]` over the Hecke points of level `p` (single step), computed exactly:
/// a nonzero `x ∈ Z^n` lies in a uniform index-`p` sublattice with probability
/// `(p^{n−1} − 1)/(p^n − 1)` unless `x ∈ pZ^n`, where it always does.
pub fn hecke_expected_count(n: usize, p: u64, v: f64) -> Result<f64> {
    check_range("n", n >= 1)?;
    check_range("V", v >= 0.0)?;
    let nf = n as f64;
    let pf = p as f64;
    let r2 = (v / ball_geometry::<f64>(n).volume).powf(2.0 / nf);
    let k_max = (r2 * pf.powf(2.0 / nf) * (1.0 + 1e-12)).floor();
    if k_max > 5e6 {
        return Err(Error::Config(format!("|x|² bound {k_max} too large for the exact Hecke mean")));
    }
    let k_max = k_max as usize;
    // representation counts r_n(k) for k ≤ k_max
    let mut reps = vec![0.0f64; k_max + 1];
    reps[0] = 1.0;
    for _ in 0..n {
        let mut next = vec![0.0; k_max + 1];
        for (k, slot) in next.iter_mut().enumerate() {
            let mut acc = reps[k];
            let mut j = 1usize;
            while j * j <= k {
                acc += 2.0 * reps[k - j * j];
                j += 1;
            }
            *slot = acc;
        }
        reps = next;
    }
    let total: f64 = reps[1..].iter().sum();
    let pp = (p as u128 * p as u128).min(usize::MAX as u128) as usize;
    let in_pz: f64 = reps.iter().enumerate().skip(1).filter(|(k, _)| k % pp == 0).map(|(_, r)| r).sum();
    let prob = (1.0 - pf.powf(1.0 - nf)) / (1.0 - pf.powf(-nf)) / pf;
    Ok((total - in_pz) * prob + in_pz)
}

fn siegel_check(cfg: &ExperimentConfig, r: &mut ExperimentReport) -> Result<()> {
    record_params(cfg, r);
    let n = cfg.n.as_ref().unwrap().to_vec()[0];
    let p = cfg.p.unwrap();
    let trials = cfg.trials.unwrap();
    let volumes = cfg.volumes.clone().unwrap();
    check_range("volumes", !volumes.is_empty() && volumes.iter().all(|&v| v > 0.0))?;
    let vmax = volumes.iter().copied().fold(0.0, f64::max);

    let counts = |steps: u32| -> Result<Vec<Vec<f64>>> {
        let seed = cfg.master_seed.unwrap();
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let l = sample_lattice(n, p, steps, seed, t)?;
                let vl = VectorLengthList::enumerate(&l, vmax)?;
                volumes.iter().map(|&v| Ok(vl.counting_functions(v)?.0 as f64)).collect()
            })
            .collect()
    };

    let steps = walk_steps(cfg, n);
    let main = counts(steps)?;
    for (i, &v) in volumes.iter().enumerate() {
        let col: Vec<f64> = main.iter().map(|row| row[i]).collect();
        let (mean, se) = mean_and_se(&col)?;
        r.stat(format!("mean N(V={v})"), mean);
        r.stat(format!("SE N(V={v})"), se);
        r.check(Some(4), format!("Siegel mean N(V={v}), {steps}-step Hecke"), mean, Relation::Within, v, 3.0 * se);
        if steps == 1 {
            if let Ok(exact) = hecke_expected_count(n, p, v) {
                r.stat(format!("exact Hecke-point mean N(V={v})"), exact);
                r.check(None, format!("MC vs exact Hecke-point mean N(V={v})"), mean, Relation::Within, exact, 3.0 * se);
            }
        }
    }

    // the same statistic along a longer Hecke walk at the same level
    let walk = default_walk_steps(n, p);
    if walk != steps {
        let diag = counts(walk)?;
        r.stat("diagnostic walk steps", walk as f64);
        for (i, &v) in volumes.iter().enumerate() {
            let col: Vec<f64> = diag.iter().map(|row| row[i]).collect();
            let (mean, se) = mean_and_se(&col)?;
            r.stat(format!("walk mean N(V={v})"), mean);
            r.check(None, format!("Siegel mean N(V={v}), {walk}-step Hecke walk"), mean, Relation::Within, v, 3.0 * se);
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------------
// criterion 5

fn variance_bound(cfg: &ExperimentConfig, r: &mut ExperimentReport) -> Result<()> {
    record_params(cfg, r);
    let mut worst: f64 = 0.0;
    for n in 3..=12u32 {
        for a in [0.0, 1.0, 10.0, 100.0] {
            for delta in [0.5, 1.0, 5.0] {
                worst = worst.max(rogers_second_moment(n, a, delta)? / (5.0 * delta));
            }
        }
    }
    r.check(Some(5), "max rogers_second_moment / (5 delta) on the grid", worst, Relation::Less, 1.0, 0.0);

    let n = cfg.n.as_ref().unwrap().to_vec()[0];
    let a = cfg.a.unwrap();
    let delta = cfg.delta.unwrap();
    check_range("n", n >= 3)?;
    check_range("A and delta", a >= 0.0 && delta > 0.0)?;
    let lattices = draw_lattices(cfg, n, cfg.trials.unwrap())?;
    let squares: Vec<f64> = lattices
        .par_iter()
        .map(|l| {
            let vl = VectorLengthList::enumerate(l, a + delta)?;
            let (hi, _) = vl.counting_functions(a + delta)?;
            let lo = if a > 0.0 { vl.counting_functions(a)?.0 } else { 0 };
            Ok((hi as f64 - lo as f64 - delta).powi(2))
        })
        .collect::<Result<_>>()?;
    let (mean, se) = mean_and_se(&squares)?;
    let exact = rogers_second_moment(n as u32, a, delta)?;
    r.stat("exact second moment", exact);
    r.stat("MC second moment", mean);
    r.stat("MC SE", se);
    r.check(Some(5), format!("MC E[(R(A+D)-R(A))^2] vs exact, n={n} A={a} D={delta}"), mean, Relation::Within, exact, 3.0 * se);
    Ok(())
}

// ---------------------------------------------------------------------------------
// criteria 6–9 and 12

fn sorted_grid(cs: &[f64]) -> Vec<f64> {
    let mut g = cs.to_vec();
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// `trials` joint draws of `H(c)` on the ascending grid `cs`, one row per trial.
fn h_draws(cs: &[f64], a: f64, trials: u64, seed: u64) -> Result<Vec<Vec<f64>>> {
    let tail = GaussianTail::new(cs, a)?;
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, StreamTag::Poisson, t);
            let real = simulate_points(a, &mut rng)?;
            let noise = tail.sample(&mut rng);
            Ok(h_path(&real, cs)?.into_iter().zip(noise).map(|(h, e)| h + e).collect())
        })
        .collect()
}

fn stable_match(cfg: &ExperimentConfig, r: &mut ExperimentReport) -> Result<()> {
    record_params(cfg, r);
    let cs = sorted_grid(cfg.c_grid.as_ref().unwrap());
    check_range("c_grid", cs.iter().all(|&c| c > 0.25 && c < 0.5))?;
    let a = cfg.a.unwrap();
    let draws = h_draws(&cs, a, cfg.trials.unwrap(), cfg.master_seed.unwrap())?;
    for (i, &c) in cs.iter().enumerate() {
        let mut col: Vec<f64> = draws.iter().map(|row| row[i]).collect();
        let ks = ks_against(params_for_h(c)?, &mut col)?;
        r.stat(format!("tail third cumulant c={c}"), tail_cumulant(3, c, a));
        r.check(Some(6), format!("KS H(c) vs stable law, c={c}"), ks, Relation::Less, 0.01, 0.0);
    }
    Ok(())
}

fn z0_match(cfg: &ExperimentConfig, r: &mut ExperimentReport) -> Result<()> {
    record_params(cfg, r);
    let a = cfg.a.unwrap();
    check_range("A", a >= 10.0)?;
    let seed = cfg.master_seed.unwrap();
    let mut draws: Vec<f64> = (0..cfg.trials.unwrap())
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, StreamTag::Poisson, t);
            let real = simulate_points(a, &mut rng)?;
            let g: f64 = rng.sample(StandardNormal);
            Ok(z0_truncated(&real) + g * (2.0 / a).sqrt())
        })
        .collect::<Result<_>>()?;
    let (mean, _) = mean_and_se(&draws)?;
    r.stat("sample mean", mean);
    let ks = ks_against(params_for_z0(), &mut draws)?;
    r.check(Some(7), "KS Z0 vs S_1(pi/2, 1, 1 - log 2 - gamma)", ks, Relation::Less, 0.01, 0.0);
    Ok(())
}

fn moments(cfg: &ExperimentConfig, r: &mut ExperimentReport) -> Result<()> {
    record_params(cfg, r);
    let c = cfg.c_grid.as_ref().unwrap()[0];
    let delta = cfg.delta.unwrap();
    let a = cfg.a.unwrap();
    check_range("c", c > 0.25 && c < 0.5)?;
    let seed = cfg.master_seed.unwrap();
    let sd = tail_variance(c, a).sqrt();
    let draws: Vec<f64> = (0..cfg.trials.unwrap())
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, StreamTag::Poisson, t);
            let real = simulate_points(a, &mut rng)?;
            let g: f64 = rng.sample(StandardNormal);
            Ok(h_truncated_delta(&real, c, delta)? + sd * g)
        })
        .collect::<Result<_>>()?;
    for k in 1..=4u32 {
        let (est, se) = moment_estimator(&draws, k)?;
        let exact = moments_exact(&vec![c; k as usize], delta)?;
        // the Gaussian tail reproduces the tail mean and variance but not κ₃, κ₄
        let bias = if k >= 3 { tail_cumulant(k, c, a).abs() } else { 0.0 };
        r.stat(format!("moment {k} estimate"), est);
        r.stat(format!("moment {k} SE"), se);
        r.check(Some(8), format!("E H(c,delta)^{k} vs exact, c={c} delta={delta}"), est, Relation::Within, exact, 3.0 * se + bias);
    }
    Ok(())
}

fn gaussian_limit(cfg: &ExperimentConfig, r: &mut ExperimentReport) -> Result<()> {
    record_params(cfg, r);
    let order = cfg.c_grid.clone().unwrap();
    check_range("c_grid", order.len() >= 2 && order.iter().all(|&c| c > 0.25 && c < 0.5))?;
    let cs = sorted_grid(&order);
    let a = cfg.a.unwrap();
    let seed = cfg.master_seed.unwrap();
    let draws = h_draws(&cs, a, cfg.trials.unwrap(), seed)?;
    let mut ks = Vec::new();
    for &c in &order {
        let i = cs.iter().position(|&x| x == c).unwrap();
        let scale = (2.0 * c - 0.5).sqrt();
        let mut col: Vec<f64> = draws.iter().map(|row| scale * row[i]).collect();
        col.sort_by(f64::total_cmp);
        let d = ks_sorted(&col, normal_cdf);
        r.stat(format!("KS rescaled H vs N(0,1), c={c}"), d);
        ks.push(d);
    }
    let last = order.len() - 1;
    for i in 1..last {
        r.check(
            Some(9),
            format!("KS decreasing: c={} below c={}", order[i], order[i - 1]),
            ks[i],
            Relation::Less,
            ks[i - 1],
            0.0,
        );
    }
    r.check(Some(9), format!("KS at c={} below pilot threshold", order[last]), ks[last], Relation::Less, cfg.threshold.unwrap(), 0.0);

    // near-independence of well separated values; the variables have infinite
    // variance, so this is only a diagnostic
    let pair = [0.2505, 0.30];
    let joint = h_draws(&pair, a, cfg.trials.unwrap(), seed ^ 0x5EED)?;
    let x: Vec<f64> = joint.iter().map(|row| (2.0 * pair[0] - 0.5).sqrt() * row[0]).collect();
    let y: Vec<f64> = joint.iter().map(|row| (2.0 * pair[1] - 0.5).sqrt() * row[1]).collect();
    r.stat("correlation of rescaled H at c = 0.2505 and 0.30", correlation(&x, &y)?);
    // the same correlation for the δ = 1 truncation: 2√(η₁η₂)/(η₁ + η₂)
    let (e1, e2) = (pair[0] - 0.25, pair[1] - 0.25);
    r.stat("truncated-moment correlation at c = 0.2505 and 0.30", 2.0 * (e1 * e2).sqrt() / (e1 + e2));
    Ok(())
}

fn negativity(cfg: &ExperimentConfig, r: &mut ExperimentReport) -> Result<()> {
    record_params(cfg, r);
    let c1s = cfg.c_grid.clone().unwrap();
    check_range("c_grid", c1s.len() >= 2)?;
    let opts = NegativityOptions {
        grid_step: cfg.grid_step.unwrap(),
        refine: cfg.refine.unwrap(),
        horizon: cfg.a.unwrap(),
        trials: cfg.trials.unwrap(),
        master_seed: cfg.master_seed.unwrap(),
    };
    let est = negativity_curve(&c1s, 0.5, opts)?;
    for e in &est {
        r.stat(format!("f({}, 1/2)", e.c1), e.estimate);
        r.stat(format!("f({}, 1/2) CI low", e.c1), e.ci95.0);
        r.stat(format!("f({}, 1/2) CI high", e.c1), e.ci95.1);
        r.stat(format!("f({}, 1/2) flipped by refinement", e.c1), e.flipped_by_refinement as f64);
    }
    let mid = est.iter().find(|e| (e.c1 - 0.30).abs() < 1e-12).unwrap_or(&est[est.len() / 2]);
    r.check(Some(12), format!("f({}, 1/2) CI low above 0", mid.c1), mid.ci95.0, Relation::Greater, 0.0, 0.0);
    r.check(Some(12), format!("f({}, 1/2) CI high below 1", mid.c1), mid.ci95.1, Relation::Less, 1.0, 0.0);
    for w in est.windows(2) {
        r.check(
            Some(12),
            format!("f({}, 1/2) <= f({}, 1/2) within CI overlap", w[1].c1, w[0].c1),
            w[1].ci95.0,
            Relation::AtMost,
            w[0].ci95.1,
            0.0,
        );
    }

    // discretization sensitivity on a subset of the trials: the same trials on a grid
    // of half the step
    let sub = NegativityOptions { trials: (opts.trials / 10).max(1), ..opts };
    let base = negativity_curve(&c1s, 0.5, sub)?;
    let fine = negativity_curve(&c1s, 0.5, NegativityOptions { grid_step: 0.5 * opts.grid_step, ..sub })?;
    for (b, f) in base.iter().zip(&fine) {
        r.stat(format!("f({}, 1/2) half-step minus default step, first {} trials", b.c1, sub.trials), f.estimate - b.estimate);
    }
    Ok(())
}

// ---------------------------------------------------------------------------------
// criteria 10–11

/// Per-lattice functionals shared by `epstein-vs-limit` and `height-limit`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeFunctionals {
    pub e_normalized: f64,
    /// Standard deviation of the omitted part beyond the volume cutoff.
    pub e_normalized_sd: f64,
    pub height: f64,
    pub height_sd: f64,
}

#[derive(Serialize, Deserialize)]
struct FunctionalCache {
    values: Vec<LatticeFunctionals>,
}

fn lattice_functionals(cfg: &ExperimentConfig, n: usize) -> Result<Vec<LatticeFunctionals>> {
    let p = cfg.p.unwrap();
    let steps = walk_steps(cfg, n);
    let seed = cfg.master_seed.unwrap();
    let a = cfg.a.unwrap();
    let c = cfg.c_grid.as_ref().unwrap()[0];
    let trials = cfg.trials.unwrap() as usize;
    check_range("c", c > 0.0 && c < 0.5)?;
    check_range("A", a > 0.0)?;

    let path = cfg
        .cache_dir
        .as_ref()
        .map(|d| d.join(format!("functionals-n{n}-p{p}-steps{steps}-seed{seed}-A{a}-c{c}.json")));
    let mut values: Vec<LatticeFunctionals> = path
        .as_ref()
        .and_then(|p| std::fs::read_to_string(p).ok())
        .and_then(|s| serde_json::from_str::<FunctionalCache>(&s).ok())
        .map_or_else(Vec::new, |c| c.values);
    if values.len() >= trials {
        values.truncate(trials);
        return Ok(values);
    }
    let fresh: Vec<LatticeFunctionals> = (values.len() as u64..trials as u64)
        .into_par_iter()
        .map(|t| {
            let l = sample_lattice(n, p, steps, seed, t)?;
            let ev = EpsteinEvaluator::new(&l, Cutoff::Volume { a })?;
            let e = ev.e_normalized(c)?;
            let h = ev.height()?;
            Ok(LatticeFunctionals { e_normalized: e.value, e_normalized_sd: e.tail_bound, height: h.value, height_sd: h.tail_bound })
        })
        .collect::<Result<_>>()?;
    values.extend(fresh);
    if let Some(path) = path {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(&path, serde_json::to_string(&FunctionalCache { values: values.clone() })?)?;
    }
    Ok(values)
}

/// Functionals with the omitted tail replaced by an independent Gaussian draw of
/// matching standard deviation: `(V_n^{-2c} E_n(L, cn), h_n(L))` per lattice.
fn surrogate_draws(cfg: &ExperimentConfig, n: usize) -> Result<Vec<(f64, f64)>> {
    let seed = cfg.master_seed.unwrap();
    Ok(lattice_functionals(cfg, n)?
        .into_iter()
        .enumerate()
        .map(|(t, f)| {
            let mut rng = trial_rng(seed, StreamTag::Gaussian, ((n as u64) << 40) | t as u64);
            let g1: f64 = rng.sample(StandardNormal);
            let g2: f64 = rng.sample(StandardNormal);
            (f.e_normalized + f.e_normalized_sd * g1, f.height + f.height_sd * g2)
        })
        .collect())
}

fn trend_checks(r: &mut ExperimentReport, criterion: u32, dims: &[usize], ks: &[f64]) {
    for i in 1..dims.len() {
        r.check(
            Some(criterion),
            format!("KS decreasing: n={} below n={}", dims[i], dims[i - 1]),
            ks[i],
            Relation::Less,
            ks[i - 1],
            0.0,
        );
    }
}

fn epstein_vs_limit(cfg: &ExperimentConfig, r: &mut ExperimentReport) -> Result<()> {
    record_params(cfg, r);
    let dims = cfg.n.as_ref().unwrap().to_vec();
    let c = cfg.c_grid.as_ref().unwrap()[0];
    check_range("c", c > 0.25 && c < 0.5)?;
    let law = params_for_h(c)?;
    let mut ks = Vec::new();
    for &n in &dims {
        let mut e: Vec<f64> = surrogate_draws(cfg, n)?.into_iter().map(|x| x.0).collect();
        let d = ks_against(law, &mut e)?;
        r.stat(format!("KS V^-2c E_n(L,cn) vs stable law, n={n}"), d);
        ks.push(d);
    }
    trend_checks(r, 10, &dims, &ks);
    Ok(())
}

fn height_limit_experiment(cfg: &ExperimentConfig, r: &mut ExperimentReport) -> Result<()> {
    record_params(cfg, r);
    let dims = cfg.n.as_ref().unwrap().to_vec();
    let law = affine(params_for_z0(), 2.0, -std::f64::consts::PI.ln() - 1.0)?;
    let mut ks = Vec::new();
    let mut last_mean = f64::NAN;
    for &n in &dims {
        let heights: Vec<f64> = surrogate_draws(cfg, n)?.into_iter().map(|x| x.1).collect();
        let (mean, se) = mean_and_se(&heights)?;
        let mut stats: Vec<f64> = heights.iter().map(|&h| height_statistic_from(n, h)).collect();
        let d = ks_against(law, &mut stats)?;
        r.stat(format!("mean h_n, n={n}"), mean);
        r.stat(format!("SE h_n, n={n}"), se);
        let mut sorted = heights.clone();
        sorted.sort_by(f64::total_cmp);
        r.stat(format!("median h_n, n={n}"), sorted[sorted.len() / 2]);
        r.stat(format!("KS height statistic vs 2Z0 - log pi - 1, n={n}"), d);
        ks.push(d);
        last_mean = mean;
    }
    trend_checks(r, 11, &dims, &ks);
    r.check(
        Some(11),
        format!("mean h_n at n={} vs log(4 pi) - gamma + 1", dims[dims.len() - 1]),
        last_mean,
        Relation::Within,
        height_limit(),
        0.15,
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::hecke::{projective_point_list, sublattice_basis};

    #[test]
    fn exact_hecke_mean_matches_enumeration_over_all_sublattices() {
        for &(n, p) in &[(2usize, 3u64), (2, 5), (3, 2)] {
            let points = projective_point_list(n, p);
            for v in [0.5, 2.0, 7.0] {
                let mut total = 0.0;
                for a in &points {
                    let b = sublattice_basis(a, p);
                    let scale = (p as f64).powf(-1.0 / n as f64);
                    let flat: Vec<f64> = b.iter().map(|&x| x as f64 * scale).collect();
                    let l = Lattice::from_flat(n, flat).unwrap();
                    total += VectorLengthList::enumerate(&l, v).unwrap().counting_functions(v).unwrap().0 as f64;
                }
                let mc = total / points.len() as f64;
                let exact = hecke_expected_count(n, p, v).unwrap();
                assert!((mc - exact).abs() < 1e-9, "n={n} p={p} V={v}: {mc} {exact}");
            }
        }
    }

    #[test]
    fn kernel_integral_small_case() {
        let (v, _) = gaussian_kernel_integral(3, 0.6).unwrap();
        assert!((v - 1.0 / 0.9).abs() < 1e-9, "{v}");
    }

    #[test]
    fn config_parsing_and_schema() {
        let flat = ExperimentConfig::from_json_for(r#"{"trials": 10, "A": 100.0}"#, "z0-match").unwrap();
        assert_eq!(flat.trials, Some(10));
        assert_eq!(flat.a, Some(100.0));
        let keyed = ExperimentConfig::from_json_for(r#"{"z0-match": {"trials": 5}, "moments": {"trials": 7}}"#, "moments").unwrap();
        assert_eq!(keyed.trials, Some(7));
        assert!(ExperimentConfig::from_json_for(r#"{"bogus": 1}"#, "z0-match").is_err());
        let n_list = ExperimentConfig::from_json_for(r#"{"n": [8, 16]}"#, "height-limit").unwrap();
        assert_eq!(n_list.n.unwrap().to_vec(), vec![8, 16]);
        let unused = ExperimentConfig { grid_step: Some(0.01), ..Default::default() };
        assert!(matches!(run_experiment("z0-match", &unused), Err(Error::Config(_))));
        assert!(matches!(run_experiment("nope", &ExperimentConfig::default()), Err(Error::UnknownExperiment(_))));
        for name in EXPERIMENTS {
            assert!(default_config(name).is_ok());
        }
    }

    #[test]
    fn small_run_is_deterministic() {
        let cfg = ExperimentConfig { trials: Some(300), a: Some(100.0), master_seed: Some(5), ..Default::default() };
        let a = run_experiment("z0-match", &cfg).unwrap();
        let b = run_experiment("z0-match", &cfg).unwrap();
        assert_eq!(a.to_csv_string().unwrap(), b.to_csv_string().unwrap());
        assert_eq!(a.criterion(7).count(), 1);
    }
}
