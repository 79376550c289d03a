//! The exact second moment of lattice-count increments from Rogers' formula:
//!
//! ```text
//! E[(R_n(A+Δ) − R_n(A))²]
//!   = 2Δ + (4/ζ(n)) Σ_{1≤d₁<d₂<ρd₁} d₁^{-n} ((d₁/d₂)^n (A+Δ) − A),   ρ = (1+Δ/A)^{1/n}.
//! ```
//!
//! Counting the `d₂` for each `d₁` and the `d₁` for each `d₂` turns the double sum into
//!
//! ```text
//! ζ(n−1)·u(Δ − Au)/(1+u) − Δζ(n) + (A+Δ) Σ_d {d/ρ} d^{-n} − A Σ_d (⌈ρd⌉ − ρd) d^{-n},
//! ```
//!
//! `u = ρ − 1`. The two remaining sums have terms in `[0, d^{-n})`.

use crate::error::{domain, Result};
use crate::specfun::zeta_int;

/// Relative size of the truncated tail of the fractional-part sums.
const TAIL_REL: f64 = 1e-12;

/// `E[(R_n(A+Δ) − R_n(A))²]` over random lattices of dimension `n ≥ 3`.
pub fn rogers_second_moment(n: u32, a: f64, delta: f64) -> Result<f64> {
    if n < 3 {
        return Err(domain("rogers_second_moment", format!("n = {n} must be at least 3")));
    }
    if !(a >= 0.0) || !(delta > 0.0) || !a.is_finite() || !delta.is_finite() {
        return Err(domain("rogers_second_moment", format!("A = {a}, Δ = {delta}")));
    }
    let zn: f64 = zeta_int(n)?;
    let zn1: f64 = zeta_int(n - 1)?;
    if a == 0.0 {
        return Ok(delta * (2.0 + 4.0 * (zn1 - zn) / zn));
    }
    let u = ((delta / a).ln_1p() / n as f64).exp_m1();
    let rho = 1.0 + u;
    let nf = n as f64;
    // both fractional sums are bounded by Σ_{d>D} d^{-n} < D^{1-n}/(n-1)
    let scale = (a + delta).max(1.0);
    let d_max = ((scale / (TAIL_REL * delta * (nf - 1.0))).powf(1.0 / (nf - 1.0))).ceil().max(16.0) as u64;
    let (mut frac_down, mut frac_up) = (0.0, 0.0);
    for d in (1..=d_max).rev() {
        let df = d as f64;
        let w = df.powi(-(n as i32));
        let down = df / rho;
        frac_down += (down - down.floor()) * w;
        let up = rho * df;
        frac_up += (up.ceil() - up) * w;
    }
    let double_sum = zn1 * u * (delta - a * u) / rho - delta * zn + (a + delta) * frac_down - a * frac_up;
    Ok(2.0 * delta + 4.0 / zn * double_sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(n: u32, a: f64, delta: f64, d1_max: u64) -> f64 {
        let rho = (1.0 + delta / a).powf(1.0 / n as f64);
        let mut s = 0.0;
        for d1 in 1..=d1_max {
            let mut d2 = d1 + 1;
            while (d2 as f64) < rho * d1 as f64 {
                s += (d1 as f64).powi(-(n as i32)) * ((d1 as f64 / d2 as f64).powi(n as i32) * (a + delta) - a);
                d2 += 1;
            }
        }
        2.0 * delta + 4.0 / zeta_int::<f64>(n).unwrap() * s
    }

    #[test]
    fn agrees_with_direct_double_sum() {
        for &(n, a, delta) in &[(8u32, 10.0, 2.0), (6, 1.0, 5.0), (10, 0.3, 0.5), (5, 100.0, 1.0)] {
            let got = rogers_second_moment(n, a, delta).unwrap();
            let want = direct(n, a, delta, 3000);
            assert!((got - want).abs() < 1e-9 * want, "n={n} A={a} Δ={delta}: {got} {want}");
        }
    }

    #[test]
    fn zero_start_closed_form() {
        let n = 7;
        let got = rogers_second_moment(n, 0.0, 3.0).unwrap();
        let want = direct(n, 1e-12, 3.0, 2000);
        assert!((got - want).abs() < 1e-6 * got, "{got} {want}");
    }

    #[test]
    fn large_start_is_close_to_poisson_value() {
        let (n, a, delta) = (6u32, 1e6, 0.5);
        let v = rogers_second_moment(n, a, delta).unwrap();
        assert!((v - 2.0 * delta).abs() < 1e-9, "{v}");
    }

    #[test]
    fn bounded_by_five_delta_on_grid() {
        for n in 3..=12 {
            for a in [0.0, 1.0, 10.0, 100.0] {
                for delta in [0.5, 1.0, 5.0] {
                    let v = rogers_second_moment(n, a, delta).unwrap();
                    assert!(v > 0.0 && v < 5.0 * delta, "n={n} A={a} Δ={delta}: {v}");
                }
            }
        }
    }
}
