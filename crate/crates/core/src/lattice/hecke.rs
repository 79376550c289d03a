//! Random lattices from Hecke points: a uniformly chosen index-`p` sublattice of
//! `Z^n`, rescaled to covolume one.

use rand::Rng;

use super::{Lattice, Provenance};
use crate::enumeration::lll::{lll_reduce_integer, LLL_DELTA};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// The Mersenne prime `2^31 − 1`.
pub const DEFAULT_PRIME: u64 = 2_147_483_647;

/// Largest prime accepted; keeps every Gram entry of the integer basis inside `i128`.
const MAX_PRIME: u64 = 1 << 40;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin, exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Uniform point of `P^{n-1}(F_p)`, normalized so its last nonzero entry is 1.
pub(crate) fn projective_point<R: Rng + ?Sized>(n: usize, p: u64, rng: &mut R) -> Vec<u64> {
    loop {
        let a: Vec<u64> = (0..n).map(|_| rng.random_range(0..p)).collect();
        let Some(k) = a.iter().rposition(|&x| x != 0) else { continue };
        let inv = pow_mod(a[k], p - 2, p);
        return a.iter().map(|&x| mul_mod(x, inv, p)).collect();
    }
}

/// Every normalized point of `P^{n-1}(F_p)`, for exhaustive checks at tiny `p`.
#[cfg(test)]
pub(crate) fn projective_point_list(n: usize, p: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for k in 0..n {
        let free = p.pow(k as u32);
        for code in 0..free {
            let mut a = vec![0u64; n];
            let mut c = code;
            for x in a.iter_mut().take(k) {
                *x = c % p;
                c /= p;
            }
            a[k] = 1;
            out.push(a);
        }
    }
    out
}

/// Hermite normal form basis of `{x ∈ Z^n : a·x ≡ 0 mod p}` for normalized `a`.
pub(crate) fn sublattice_basis(a: &[u64], p: u64) -> Vec<i64> {
    let n = a.len();
    let k = a.iter().rposition(|&x| x != 0).expect("nonzero projective point");
    let mut b = vec![0i64; n * n];
    for i in 0..n {
        if i < k {
            b[i * n + i] = 1;
            b[i * n + k] = ((p - a[i]) % p) as i64;
        } else if i == k {
            b[i * n + k] = p as i64;
        } else {
            b[i * n + i] = 1;
        }
    }
    b
}

/// Samples a random covolume-one lattice of dimension `n` from the Hecke points of
/// prime level `p`: a uniform index-`p` sublattice of `Z^n`, rescaled. The returned
/// basis is LLL-reduced.
pub fn hecke_sample<T: Real, R: Rng + ?Sized>(n: usize, p: u64, rng: &mut R) -> Result<Lattice<T>> {
    hecke_walk_sample(n, p, 1, rng)
}

/// Walk length used by the experiments: the longest walk whose integer basis stays
/// below `2^60`, and never below one step.
pub fn default_walk_steps(n: usize, p: u64) -> u32 {
    let lp = (p.max(2) as f64).log2();
    let nf = n.max(1) as f64;
    let fit = ((60.0 - nf.log2()) / lp - 1.0) * nf;
    if fit.is_finite() && fit >= 1.0 {
        fit.floor() as u32
    } else {
        1
    }
}

/// `steps` rounds of the Hecke walk: each round replaces the current integer lattice
/// by a uniform index-`p` sublattice of it. The result, scaled by `p^{-steps/n}`, is
/// a point of the `T_p^{steps}` Hecke orbit of `Z^n`.
///
/// Everything happens on exact integer bases. After LLL the entries of the level-`p^k`
/// basis are of size about `p^{k/n}`, so the walk is limited to
/// `p^{1+steps/n}·n < 2^60`.
pub fn hecke_walk_sample<T: Real, R: Rng + ?Sized>(n: usize, p: u64, steps: u32, rng: &mut R) -> Result<Lattice<T>> {
    if n == 0 {
        return Err(Error::InvalidLattice("dimension must be at least 1".into()));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p > MAX_PRIME {
        return Err(Error::Config(format!("prime {p} exceeds the supported maximum {MAX_PRIME}")));
    }
    if steps == 0 {
        return Err(Error::Config("the Hecke walk needs at least one step".into()));
    }
    let log2_entries = (p as f64).log2() * (1.0 + steps as f64 / n as f64) + (n as f64).log2();
    if steps > 1 && log2_entries > 60.0 {
        return Err(Error::Config(format!(
            "{steps} Hecke steps at p = {p}, n = {n} overflow the integer basis"
        )));
    }
    let mut basis: Vec<i64> = vec![0; n * n];
    for i in 0..n {
        basis[i * n + i] = 1;
    }
    for _ in 0..steps {
        let a = projective_point(n, p, rng);
        let h = sublattice_basis(&a, p);
        let mut next = vec![0i64; n * n];
        for i in 0..n {
            for k in 0..n {
                let hik = h[i * n + k];
                if hik != 0 {
                    for c in 0..n {
                        next[i * n + c] += hik * basis[k * n + c];
                    }
                }
            }
        }
        lll_reduce_integer(&mut next, n, LLL_DELTA);
        basis = next;
    }
    let scale = (p as f64).powf(-(steps as f64) / n as f64);
    let flat = basis.iter().map(|&x| T::lit(x as f64 * scale)).collect();
    let prov = Provenance { prime: Some(p), hecke_steps: Some(steps), ..Provenance::default() };
    Ok(Lattice::from_flat_unchecked(n, flat, Some(prov)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{trial_rng, StreamTag};

    #[test]
    fn default_walk_fits_integer_basis() {
        assert_eq!(default_walk_steps(8, DEFAULT_PRIME), 6);
        assert_eq!(default_walk_steps(24, DEFAULT_PRIME), 18);
        assert_eq!(default_walk_steps(2, DEFAULT_PRIME), 1);
        let mut rng = trial_rng(4, StreamTag::Lattice, 0);
        for n in 1..=12 {
            let steps = default_walk_steps(n, DEFAULT_PRIME);
            assert!(hecke_walk_sample::<f64, _>(n, DEFAULT_PRIME, steps, &mut rng).is_ok(), "n={n}");
        }
    }

    #[test]
    fn primality() {
        assert!(is_prime(2) && is_prime(65537) && is_prime(DEFAULT_PRIME));
        assert!(!is_prime(1) && !is_prime(65535) && !is_prime(3_215_031_751));
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn sublattice_rows_satisfy_congruence() {
        let mut rng = trial_rng(1, StreamTag::Lattice, 0);
        let p = 101;
        for _ in 0..20 {
            let a = projective_point(5, p, &mut rng);
            let b = sublattice_basis(&a, p);
            for row in b.chunks(5) {
                let s: u64 = row.iter().zip(&a).map(|(&x, &y)| x as u64 * y).sum();
                assert_eq!(s % p, 0);
            }
        }
    }

    #[test]
    fn covolume_is_one() {
        let mut rng = trial_rng(2, StreamTag::Lattice, 0);
        for n in [1usize, 2, 5, 12, 24] {
            let l: Lattice<f64> = hecke_sample(n, DEFAULT_PRIME, &mut rng).unwrap();
            assert!((l.det().abs() - 1.0).abs() < 1e-9, "n={n}: det {}", l.det());
        }
    }

    #[test]
    fn rejects_composite_and_zero_dimension() {
        let mut rng = trial_rng(3, StreamTag::Lattice, 0);
        assert!(matches!(hecke_sample::<f64, _>(3, 91, &mut rng), Err(Error::NotPrime(91))));
        assert!(hecke_sample::<f64, _>(0, 7, &mut rng).is_err());
    }

    #[test]
    fn walk_keeps_covolume_and_rejects_overflow() {
        let mut rng = trial_rng(4, StreamTag::Lattice, 0);
        for (n, p, steps) in [(2usize, 65537u64, 3u32), (8, DEFAULT_PRIME, 3), (24, DEFAULT_PRIME, 8)] {
            let l: Lattice<f64> = hecke_walk_sample(n, p, steps, &mut rng).unwrap();
            assert!((l.det().abs() - 1.0).abs() < 1e-9, "n={n}");
        }
        assert!(hecke_walk_sample::<f64, _>(4, DEFAULT_PRIME, 10, &mut rng).is_err());
        assert!(hecke_walk_sample::<f64, _>(4, DEFAULT_PRIME, 0, &mut rng).is_err());
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let a: Lattice<f64> = hecke_sample(8, 65537, &mut trial_rng(9, StreamTag::Lattice, 4)).unwrap();
        let b: Lattice<f64> = hecke_sample(8, 65537, &mut trial_rng(9, StreamTag::Lattice, 4)).unwrap();
        assert_eq!(a, b);
    }
}
