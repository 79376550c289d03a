//! The Epstein zeta function `E_n(L,s) = Σ'|m|^{-2s}` in the critical strip, through
//! the incomplete-gamma expansion
//!
//! ```text
//! F_n(L,s) = π^{-s} Γ(s) E_n(L,s) = H_n(L,s) + H_n(L*, n/2 − s),
//! H_n(L,s) = −1/(n/2 − s) + Σ'_{m∈L} G(s, π|m|²),
//! ```
//!
//! together with its normalized forms and the height of the flat torus `R^n/L`.
//!
//! Each lattice sum `Σ'G(s, π|m|²)` is truncated in one of two ways (see [`Cutoff`]):
//! by radius with a tail bound, or at a fixed normalized volume `A` with the exact
//! Siegel mean of the remainder added back and its Poisson-model spread reported.

use serde::{Deserialize, Serialize};

use crate::enumeration::{for_each_within, lll_reduce, VectorLengthList, DEFAULT_NODE_CAP};
use crate::error::{domain, Error, Result};
use crate::lattice::{Lattice, Provenance};
use crate::quad::{integrate_to_inf, QuadOptions};
use crate::scalar::EULER_GAMMA;
use crate::specfun::{ball_geometry, digamma, k_cn, ln_g_unchecked, log_gamma, regularized_upper_gamma};

/// Default absolute tolerance on each truncated lattice sum.
pub const DEFAULT_TOL: f64 = 1e-10;

/// `log(4π) − γ + 1`, the limit of the height as `n → ∞`.
pub fn height_limit() -> f64 {
    (4.0 * std::f64::consts::PI).ln() - EULER_GAMMA + 1.0
}

/// How the infinite lattice sums are truncated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Cutoff {
    /// Grow the radius until the tail bound falls below `tol` (split between sums).
    Certified { tol: f64 },
    /// Sum exactly over normalized volumes `𝒱 ≤ a`; add the exact mean of the rest.
    Volume { a: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailKind {
    /// `tail_bound` bounds the truncation error.
    Bound,
    /// `tail_bound` is the standard deviation of the truncation error when the
    /// remaining normalized volumes are modeled as a Poisson process of intensity ½.
    StdDev,
}

/// A value of `E_n`, `F_n`, `H_n`, or a quantity derived from them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaEvaluation {
    pub n: usize,
    pub s: f64,
    pub value: f64,
    /// Largest normalized volume `V_n r^n` summed exactly.
    pub cutoff_volume: f64,
    pub tail_bound: f64,
    pub tail_kind: TailKind,
    pub lattice_provenance: Option<Provenance>,
}

/// One truncated lattice sum.
#[derive(Clone, Copy, Debug)]
struct Partial {
    value: f64,
    tail: f64,
    cutoff_volume: f64,
}

fn combine(a: Partial, b: Partial, kind: TailKind) -> f64 {
    match kind {
        TailKind::Bound => a.tail + b.tail,
        TailKind::StdDev => a.tail.hypot(b.tail),
    }
}

/// `∫_1^∞ t^{κ−1} Q(b, X t) dt` where `Q` is the regularized upper incomplete gamma.
fn q_moment(kappa: f64, b: f64, x: f64) -> Result<f64> {
    let opts = QuadOptions { abs_tol: 1e-300, rel_tol: 1e-10, max_intervals: 2000 };
    // t = 1 + y/X puts the decay scale of Q at y = O(1)
    let (v, _) = integrate_to_inf(
        |y| {
            let t = 1.0 + y / x;
            t.powf(kappa - 1.0) * regularized_upper_gamma(b, x * t).unwrap_or(0.0)
        },
        0.0,
        opts,
    )?;
    Ok(v / x)
}

fn x_of_volume(n: usize, v: f64) -> f64 {
    let geo = ball_geometry::<f64>(n);
    std::f64::consts::PI * ((v.ln() - geo.log_volume) * 2.0 / n as f64).exp()
}

/// Mean of `Σ'_{𝒱_j > A} G(s, π|m_j|²)` over random lattices: `∫_A^∞ G(s, x(V)) dV`.
pub fn tail_mean(n: usize, s: f64, a: f64) -> Result<f64> {
    let half_n = 0.5 * n as f64;
    if a <= 0.0 {
        if s >= half_n {
            return Err(Error::Pole);
        }
        return Ok(1.0 / (half_n - s));
    }
    q_moment(s - half_n, half_n, x_of_volume(n, a))
}

/// Poisson-model standard deviation of `Σ'_{𝒱_j > A} G(s, π|m_j|²)`:
/// `(2∫_A^∞ G(s, x(V))² dV)^{1/2}`.
pub fn tail_std(n: usize, s: f64, a: f64) -> Result<f64> {
    let half_n = 0.5 * n as f64;
    let xa = x_of_volume(n, a);
    let lg = log_gamma(half_n)?;
    let opts = QuadOptions { abs_tol: 1e-300, rel_tol: 1e-9, max_intervals: 2000 };
    // dV = x^{n/2-1} dx / Γ(n/2)
    let (v, _) = integrate_to_inf(
        |y| {
            let x = xa + y;
            ((half_n - 1.0) * x.ln() - lg + 2.0 * ln_g_unchecked(s, x)).exp()
        },
        0.0,
        opts,
    )?;
    Ok((2.0 * v).sqrt())
}

/// `∫_X^∞ x^{n/2} G(s+1, x) dx / Γ(n/2+1)`, the tail of `Σ' G(s, π|m|²)` beyond
/// `π|m|² = X` for a lattice with point count `V_n r^n`.
fn tail_envelope(n: usize, s: f64, x: f64) -> Result<f64> {
    let half_n = 0.5 * n as f64;
    q_moment(s - half_n, half_n + 1.0, x)
}

fn g_sum(sq_lengths: &[f64], s: f64) -> f64 {
    let pi = std::f64::consts::PI;
    2.0 * sq_lengths.iter().rev().map(|&q| ln_g_unchecked(s, pi * q).exp()).sum::<f64>()
}

/// A lattice and its dual, reduced and ready for repeated zeta evaluations.
#[derive(Clone, Debug)]
pub struct EpsteinEvaluator {
    n: usize,
    cutoff: Cutoff,
    lattice: Lattice<f64>,
    dual: Lattice<f64>,
    enumerated: Option<(VectorLengthList<f64>, VectorLengthList<f64>)>,
    node_cap: u64,
}

impl EpsteinEvaluator {
    pub fn new(lattice: &Lattice<f64>, cutoff: Cutoff) -> Result<Self> {
        Self::with_node_cap(lattice, cutoff, DEFAULT_NODE_CAP)
    }

    pub fn with_node_cap(lattice: &Lattice<f64>, cutoff: Cutoff, node_cap: u64) -> Result<Self> {
        let n = lattice.dim();
        let reduced = lll_reduce(lattice);
        let dual = lll_reduce(&reduced.dual()?);
        let enumerated = match cutoff {
            Cutoff::Certified { tol } => {
                if !(tol > 0.0) {
                    return Err(domain("EpsteinEvaluator", format!("tol = {tol} must be positive")));
                }
                None
            }
            Cutoff::Volume { a } => {
                if !(a > 0.0) {
                    return Err(domain("EpsteinEvaluator", format!("A = {a} must be positive")));
                }
                Some((
                    VectorLengthList::enumerate_capped(&reduced, a, node_cap)?,
                    VectorLengthList::enumerate_capped(&dual, a, node_cap)?,
                ))
            }
        };
        Ok(EpsteinEvaluator { n, cutoff, lattice: reduced, dual, enumerated, node_cap })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    pub fn tail_kind(&self) -> TailKind {
        match self.cutoff {
            Cutoff::Certified { .. } => TailKind::Bound,
            Cutoff::Volume { .. } => TailKind::StdDev,
        }
    }

    /// Enumerated volumes of the lattice and of its dual (volume-cutoff mode only).
    pub fn volume_lists(&self) -> Option<(&VectorLengthList<f64>, &VectorLengthList<f64>)> {
        self.enumerated.as_ref().map(|(a, b)| (a, b))
    }

    fn eval(&self, s: f64, value: f64, tail: f64, cutoff_volume: f64) -> ZetaEvaluation {
        ZetaEvaluation {
            n: self.n,
            s,
            value,
            cutoff_volume,
            tail_bound: tail,
            tail_kind: self.tail_kind(),
            lattice_provenance: self.lattice.provenance().cloned(),
        }
    }

    /// `Σ'_{m} G(s, π|m|²)` over the lattice (`dual = false`) or its dual.
    fn raw_sum(&self, s: f64, dual: bool, tol: f64) -> Result<Partial> {
        match (&self.enumerated, self.cutoff) {
            (Some((lat, dua)), Cutoff::Volume { a }) => {
                let list = if dual { dua } else { lat };
                Ok(Partial {
                    value: g_sum(&list.sq_lengths, s) + tail_mean(self.n, s, a)?,
                    tail: tail_std(self.n, s, a)?,
                    cutoff_volume: a,
                })
            }
            _ => self.raw_sum_certified(s, if dual { &self.dual } else { &self.lattice }, tol),
        }
    }

    fn raw_sum_certified(&self, s: f64, lattice: &Lattice<f64>, tol: f64) -> Result<Partial> {
        let n = self.n;
        let geo = ball_geometry::<f64>(n);
        let pi = std::f64::consts::PI;
        let half_n = 0.5 * n as f64;
        // start past the maximum of x^{n/2} G(s+1,x) and grow until the envelope is small
        let mut x = s.max(half_n - s).max(1.0) + 3.0;
        while 4.0 * tail_envelope(n, s, x)? > 0.5 * tol {
            x *= 1.1;
        }
        loop {
            let r = (x / pi).sqrt();
            let outer = 1.1 * r;
            let mut sq = Vec::new();
            for_each_within(lattice, outer, self.node_cap, |_, q| sq.push(q))?;
            sq.sort_by(f64::total_cmp);
            let inner_count = sq.partition_point(|&q| q <= r * r);
            let outer_x = pi * outer * outer;
            let count = 2.0 * sq.len() as f64;
            let density = (count / (geo.volume * outer.powi(n as i32))).max(4.0);
            let bound = density * tail_envelope(n, s, outer_x)?;
            let total = g_sum(&sq, s);
            let shell = g_sum(&sq[inner_count..], s);
            if bound <= 0.5 * tol && shell < 0.25 * tol {
                return Ok(Partial { value: total, tail: bound, cutoff_volume: geo.volume * outer.powi(n as i32) });
            }
            if geo.volume * (1.1 * outer).powi(n as i32) * 2.0 > self.node_cap as f64 {
                return Err(Error::Tolerance { achieved: bound.max(shell), tol });
            }
            x *= 1.21;
        }
    }

    fn sum_tol(&self) -> f64 {
        match self.cutoff {
            Cutoff::Certified { tol } => tol,
            Cutoff::Volume { .. } => f64::INFINITY,
        }
    }

    fn h_parts(&self, s: f64, dual: bool) -> Result<Partial> {
        let half_n = 0.5 * self.n as f64;
        if s == half_n {
            return Err(Error::Pole);
        }
        let mut p = self.raw_sum(s, dual, self.sum_tol())?;
        p.value -= 1.0 / (half_n - s);
        Ok(p)
    }

    /// `H_n(L, s) = −1/(n/2 − s) + Σ' G(s, π|m|²)` for `0 ≤ s < n/2`.
    pub fn h(&self, s: f64) -> Result<ZetaEvaluation> {
        let half_n = 0.5 * self.n as f64;
        if !(0.0..half_n).contains(&s) {
            return Err(domain("H_n", format!("s = {s} outside [0, n/2)")));
        }
        let p = self.h_parts(s, false)?;
        Ok(self.eval(s, p.value, p.tail, p.cutoff_volume))
    }

    /// `F_n(L,s) = H_n(L,s) + H_n(L*, n/2 − s)`, any `s ≠ 0, n/2`.
    pub fn f(&self, s: f64) -> Result<ZetaEvaluation> {
        let half_n = 0.5 * self.n as f64;
        if s == half_n || s == 0.0 {
            return Err(Error::Pole);
        }
        let a = self.h_parts(s, false)?;
        let b = self.h_parts(half_n - s, true)?;
        let kind = self.tail_kind();
        Ok(self.eval(s, a.value + b.value, combine(a, b, kind), a.cutoff_volume.min(b.cutoff_volume)))
    }

    /// `E_n(L,s) = π^s Γ(s)^{-1} F_n(L,s)` for `s ≥ 0`, `s ≠ n/2`.
    pub fn e(&self, s: f64) -> Result<ZetaEvaluation> {
        if s < 0.0 {
            return Err(domain("E_n", format!("s = {s} must be non-negative")));
        }
        if s == 0.0 {
            return Ok(self.eval(0.0, -1.0, 0.0, f64::INFINITY));
        }
        let f = self.f(s)?;
        let scale = (s * std::f64::consts::PI.ln() - log_gamma(s)?).exp();
        Ok(ZetaEvaluation { value: scale * f.value, tail_bound: scale * f.tail_bound, ..f })
    }

    /// `V_n^{-2c} E_n(L, cn)`, computed as `K_{c,n}^{-1} F_n(L, cn)`.
    pub fn e_normalized(&self, c: f64) -> Result<ZetaEvaluation> {
        if !(c > 0.0 && c < 0.5) {
            return Err(domain("E_n_normalized", format!("c = {c} outside (0, 1/2)")));
        }
        let s = c * self.n as f64;
        let f = self.f(s)?;
        let inv_k = (-k_cn(c, self.n)?.log_abs).exp();
        Ok(ZetaEvaluation { s, value: inv_k * f.value, tail_bound: inv_k * f.tail_bound, ..f })
    }

    /// `Ê_n(L,c) = V_n^{-2c} E_n(L,cn) + 1/(1 − 2c)`, continued to `c = 1/2` through the height.
    pub fn e_hat(&self, c: f64) -> Result<ZetaEvaluation> {
        if !(c > 0.0 && c <= 0.5) {
            return Err(domain("E_hat", format!("c = {c} outside (0, 1/2]")));
        }
        if c < 0.5 {
            let e = self.e_normalized(c)?;
            return Ok(ZetaEvaluation { value: e.value + 1.0 / (1.0 - 2.0 * c), ..e });
        }
        let nf = self.n as f64;
        let h = self.height()?;
        let geo = ball_geometry::<f64>(self.n);
        let value = nf.ln() - geo.log_surface
            + 0.5 * nf * (h.value + EULER_GAMMA - 2.0 * std::f64::consts::LN_2 - digamma(0.5 * nf)?);
        Ok(ZetaEvaluation { s: 0.5 * nf, value, tail_bound: 0.5 * nf * h.tail_bound, ..h })
    }

    /// Height `h_n(L) = log(4π) − γ − 2/n + Σ'_{L*} G(0, π|m|²) + Σ'_L G(n/2, π|m|²)`.
    pub fn height(&self) -> Result<ZetaEvaluation> {
        if self.n < 2 {
            return Err(domain("height", "n must be at least 2"));
        }
        let nf = self.n as f64;
        let tol = self.sum_tol();
        let j = self.raw_sum(0.0, true, tol)?;
        let g = self.raw_sum(0.5 * nf, false, tol)?;
        let value = (4.0 * std::f64::consts::PI).ln() - EULER_GAMMA - 2.0 / nf + j.value + g.value;
        Ok(self.eval(0.0, value, combine(j, g, self.tail_kind()), j.cutoff_volume.min(g.cutoff_volume)))
    }

    /// `n (h_n(L) − (log(4π) − γ + 1)) + log n`.
    pub fn height_statistic(&self) -> Result<ZetaEvaluation> {
        let h = self.height()?;
        let nf = self.n as f64;
        Ok(ZetaEvaluation {
            value: height_statistic_from(self.n, h.value),
            tail_bound: nf * h.tail_bound,
            ..h
        })
    }

    /// The mean-zero part `Σ'_{L*} G(0, π|m|²)` of the height, with its tail.
    pub fn height_dual_sum(&self) -> Result<(f64, f64)> {
        let p = self.raw_sum(0.0, true, self.sum_tol())?;
        Ok((p.value, p.tail))
    }
}

/// `n (h − (log(4π) − γ + 1)) + log n`.
pub fn height_statistic_from(n: usize, h: f64) -> f64 {
    let nf = n as f64;
    nf * (h - height_limit()) + nf.ln()
}

fn certified(lattice: &Lattice<f64>, tol: f64) -> Result<EpsteinEvaluator> {
    EpsteinEvaluator::new(lattice, Cutoff::Certified { tol })
}

/// `H_n(L,s)` with each lattice sum certified to `tol`.
pub fn h_n_eval(lattice: &Lattice<f64>, s: f64, tol: f64) -> Result<ZetaEvaluation> {
    certified(lattice, tol)?.h(s)
}

/// `F_n(L,s) = π^{-s}Γ(s)E_n(L,s)`.
pub fn f_n_eval(lattice: &Lattice<f64>, s: f64, tol: f64) -> Result<ZetaEvaluation> {
    certified(lattice, tol)?.f(s)
}

/// `E_n(L,s)`, exactly `−1` at `s = 0`.
pub fn e_n_eval(lattice: &Lattice<f64>, s: f64, tol: f64) -> Result<ZetaEvaluation> {
    certified(lattice, tol)?.e(s)
}

/// `V_n^{-2c} E_n(L, cn)` for `0 < c < 1/2`.
pub fn e_n_normalized(lattice: &Lattice<f64>, c: f64, tol: f64) -> Result<f64> {
    Ok(certified(lattice, tol)?.e_normalized(c)?.value)
}

/// `Ê_n(L,c)` for `0 < c ≤ 1/2`.
pub fn e_hat(lattice: &Lattice<f64>, c: f64, tol: f64) -> Result<f64> {
    Ok(certified(lattice, tol)?.e_hat(c)?.value)
}

/// Height of the flat torus `R^n/L`.
pub fn height(lattice: &Lattice<f64>, tol: f64) -> Result<ZetaEvaluation> {
    certified(lattice, 0.5 * tol)?.height()
}

/// `n (h_n(L) − (log(4π) − γ + 1)) + log n` with the default tolerance.
pub fn height_statistic(lattice: &Lattice<f64>) -> Result<f64> {
    Ok(certified(lattice, DEFAULT_TOL)?.height_statistic()?.value)
}

/// `E_n(L,s) = Σ'|m|^{-2s}` for `s > n/2` by direct summation over `|m| ≤ radius`.
///
/// The remainder `Σ_{|m|>R}|m|^{-2s}` is bracketed with the point-count bounds
/// `V_n(ρ − d)^n ≤ N(ρ) ≤ V_n(ρ + d)^n`, `d` the diameter of the reduced fundamental
/// parallelepiped. The radius is doubled (starting from `cutoff_radius`) until the
/// half-width of the bracket is at most `tol`; the midpoint is added to the sum.
pub fn direct_epstein_sum(lattice: &Lattice<f64>, s: f64, cutoff_radius: f64, tol: f64) -> Result<ZetaEvaluation> {
    let n = lattice.dim();
    let half_n = 0.5 * n as f64;
    if s <= half_n {
        return Err(domain("direct_epstein_sum", format!("s = {s} must exceed n/2 = {half_n}")));
    }
    if !(cutoff_radius > 0.0) {
        return Err(domain("direct_epstein_sum", format!("radius = {cutoff_radius}")));
    }
    let reduced = lll_reduce(lattice);
    let d: f64 = reduced.rows().map(|r| r.iter().map(|x| x * x).sum::<f64>().sqrt()).sum();
    let geo = ball_geometry::<f64>(n);
    let opts = QuadOptions { abs_tol: 1e-300, rel_tol: 1e-10, max_intervals: 2000 };
    let mut radius = cutoff_radius;
    loop {
        let mut sq = Vec::new();
        for_each_within(&reduced, radius, DEFAULT_NODE_CAP, |_, q| sq.push(q))?;
        sq.sort_by(f64::total_cmp);
        let inside = 2.0 * sq.len() as f64;
        let partial = 2.0 * sq.iter().rev().map(|&q| q.powf(-s)).sum::<f64>();
        // tail = ∫_R^∞ 2s ρ^{-2s-1} (N(ρ) − N(R)) dρ
        let bracket = |sign: f64| -> Result<f64> {
            integrate_to_inf(
                |rho| {
                    let count = geo.volume * (rho + sign * d).max(0.0).powi(n as i32) - inside;
                    2.0 * s * rho.powf(-2.0 * s - 1.0) * count.max(0.0)
                },
                radius,
                opts,
            )
            .map(|(v, _)| v)
        };
        let upper = bracket(1.0)?;
        let lower = bracket(-1.0)?;
        let half_width = 0.5 * (upper - lower);
        if half_width <= tol {
            return Ok(ZetaEvaluation {
                n,
                s,
                value: partial + 0.5 * (upper + lower),
                cutoff_volume: geo.volume * radius.powi(n as i32),
                tail_bound: half_width,
                tail_kind: TailKind::Bound,
                lattice_provenance: lattice.provenance().cloned(),
            });
        }
        if 2.0 * geo.volume * (2.0 * radius).powi(n as i32) > DEFAULT_NODE_CAP as f64 {
            return Err(Error::Tolerance { achieved: half_width, tol });
        }
        radius *= 2.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn e_at_zero_is_minus_one() {
        let z = Lattice::<f64>::integer(3);
        assert_eq!(e_n_eval(&z, 0.0, 1e-10).unwrap().value, -1.0);
    }

    #[test]
    fn integers_at_one_give_twice_zeta_two() {
        let z = Lattice::<f64>::integer(1);
        let e = e_n_eval(&z, 1.0, 1e-13).unwrap();
        assert!((e.value - PI * PI / 3.0).abs() < 1e-10, "{}", e.value);
    }

    #[test]
    fn h_for_z1_matches_direct_sum() {
        let z = Lattice::<f64>::integer(1);
        let s = 0.3;
        let h = h_n_eval(&z, s, 1e-13).unwrap();
        let mut direct = -1.0 / (0.5 - s);
        for m in (1..=12).rev() {
            direct += 2.0 * crate::specfun::g_incomplete(s, PI * (m * m) as f64).unwrap();
        }
        assert!((h.value - direct).abs() < 1e-12);
    }

    #[test]
    fn z2_functional_symmetry() {
        let z = Lattice::<f64>::integer(2);
        let a = f_n_eval(&z, 0.3, 1e-12).unwrap();
        let b = f_n_eval(&z, 0.7, 1e-12).unwrap();
        assert!((a.value - b.value).abs() <= a.tail_bound + b.tail_bound + 1e-13);
    }

    #[test]
    fn z2_beyond_the_pole_matches_direct_sum() {
        let z = Lattice::<f64>::integer(2);
        let s = 1.8;
        let via_g = f_n_eval(&z, s, 1e-12).unwrap();
        let direct = direct_epstein_sum(&z, s, 50.0, 1e-5).unwrap();
        let scale = (-s * PI.ln() + log_gamma(s).unwrap()).exp();
        assert!((via_g.value - scale * direct.value).abs() < scale * direct.tail_bound + 1e-10);
    }

    #[test]
    fn z2_at_two_is_four_zeta_two_beta_two() {
        // Catalan's constant β(2)
        let catalan = 0.915_965_594_177_219_015_054_6;
        let want = 4.0 * PI * PI / 6.0 * catalan;
        let direct = direct_epstein_sum(&Lattice::<f64>::integer(2), 2.0, 100.0, 1e-6).unwrap();
        assert!((direct.value - want).abs() <= direct.tail_bound + 1e-12);
        let via_g = e_n_eval(&Lattice::<f64>::integer(2), 2.0, 1e-13).unwrap();
        assert!((via_g.value - want).abs() < 1e-10);
    }

    #[test]
    fn direct_sum_rejects_strip() {
        assert!(direct_epstein_sum(&Lattice::<f64>::integer(2), 0.9, 10.0, 1e-6).is_err());
    }

    #[test]
    fn pole_and_domain_errors() {
        let z = Lattice::<f64>::integer(2);
        assert!(matches!(e_n_eval(&z, 1.0, 1e-10), Err(Error::Pole)));
        assert!(h_n_eval(&z, 1.2, 1e-10).is_err());
        assert!(e_n_normalized(&z, 0.5, 1e-10).is_err());
    }

    #[test]
    fn tail_mean_at_zero_volume_is_the_pole_term() {
        assert!((tail_mean(8, 2.8, 0.0).unwrap() - 1.0 / 1.2).abs() < 1e-15);
        // ∫_A^∞ = 1/(n/2−s) − ∫_0^A, checked against direct quadrature of ∫_0^A G dV
        let (n, s, a) = (4usize, 1.4f64, 30.0f64);
        let geo = ball_geometry::<f64>(n);
        let (head, _) = crate::quad::integrate(
            |v: f64| {
                if v == 0.0 {
                    return 0.0;
                }
                let x = PI * (v / geo.volume).powf(2.0 / n as f64);
                ln_g_unchecked(s, x).exp()
            },
            0.0,
            a,
            QuadOptions::default(),
        )
        .unwrap();
        let want = 1.0 / (0.5 * n as f64 - s) - head;
        assert!((tail_mean(n, s, a).unwrap() - want).abs() < 1e-9);
    }

    #[test]
    fn volume_cutoff_agrees_with_certified_on_z4() {
        let z = Lattice::<f64>::integer(4);
        let cert = EpsteinEvaluator::new(&z, Cutoff::Certified { tol: 1e-12 }).unwrap();
        let vol = EpsteinEvaluator::new(&z, Cutoff::Volume { a: 2000.0 }).unwrap();
        let a = cert.e_normalized(0.3).unwrap();
        let b = vol.e_normalized(0.3).unwrap();
        assert_eq!(b.tail_kind, TailKind::StdDev);
        assert!((a.value - b.value).abs() < 5.0 * b.tail_bound + 1e-9, "{} {} {}", a.value, b.value, b.tail_bound);
    }

    #[test]
    fn e_hat_is_continuous_at_one_half() {
        let z = Lattice::<f64>::integer(6);
        let ev = EpsteinEvaluator::new(&z, Cutoff::Certified { tol: 1e-12 }).unwrap();
        let at_half = ev.e_hat(0.5).unwrap().value;
        let d3 = (ev.e_hat(0.5 - 1e-3).unwrap().value - at_half).abs();
        let d4 = (ev.e_hat(0.5 - 1e-4).unwrap().value - at_half).abs();
        assert!(d4 < d3 && d4 < 1e-2, "{d3} {d4}");
    }

    fn skew3() -> Lattice<f64> {
        Lattice::from_rows_normalized(vec![vec![1.0, 0.2, -0.3], vec![0.1, 1.3, 0.4], vec![-0.2, 0.5, 0.9]]).unwrap()
    }

    #[test]
    fn height_matches_derivative_of_dual_zeta_at_zero() {
        let l = skew3();
        let dual = EpsteinEvaluator::new(&l.dual().unwrap(), Cutoff::Certified { tol: 1e-13 }).unwrap();
        let step = 1e-3;
        let e1 = dual.e(step).unwrap().value;
        let e2 = dual.e(2.0 * step).unwrap().value;
        let e3 = dual.e(3.0 * step).unwrap().value;
        // third-order one-sided difference with E(0) = −1
        let deriv = (11.0 + 18.0 * e1 - 9.0 * e2 + 2.0 * e3) / (6.0 * step);
        let h = height(&l, 1e-12).unwrap().value;
        let want = 2.0 * (2.0 * PI).ln() + deriv;
        assert!((h - want).abs() < 1e-6, "{h} {want}");
    }

    #[test]
    fn residue_at_the_pole() {
        let l = skew3();
        let ev = EpsteinEvaluator::new(&l, Cutoff::Certified { tol: 1e-13 }).unwrap();
        let a = 1.5;
        let step = 1e-3;
        let avg = 0.5 * (step * ev.e(a + step).unwrap().value - step * ev.e(a - step).unwrap().value);
        let residue = PI.powf(a) / log_gamma(a).unwrap().exp();
        assert!((avg - residue).abs() < 1e-5, "{avg} {residue}");
    }
}
