//! LLL reduction (Schnorr–Euchner style, floating Gram–Schmidt) for real bases and
//! for exact integer bases.

use crate::error::{Error, Result};
use crate::lattice::{dot, Lattice};
use crate::scalar::Real;

/// Lovász parameter.
pub const LLL_DELTA: f64 = 0.99;

/// Size-reduction threshold on `|μ_ij|`.
pub const LLL_ETA: f64 = 0.51;

/// Row storage the reduction loop works on.
trait Rows {
    fn len(&self) -> usize;
    fn dot(&self, i: usize, j: usize) -> f64;
    /// `b_k ← b_k − q·b_j`
    fn sub_mul(&mut self, k: usize, j: usize, q: i64);
    fn swap(&mut self, i: usize, j: usize);
}

struct IntRows<'a> {
    n: usize,
    rows: &'a mut [i64],
}

impl Rows for IntRows<'_> {
    fn len(&self) -> usize {
        self.rows.len() / self.n
    }
    fn dot(&self, i: usize, j: usize) -> f64 {
        let n = self.n;
        let a = &self.rows[i * n..(i + 1) * n];
        let b = &self.rows[j * n..(j + 1) * n];
        a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum::<i128>() as f64
    }
    fn sub_mul(&mut self, k: usize, j: usize, q: i64) {
        let n = self.n;
        for c in 0..n {
            self.rows[k * n + c] -= q * self.rows[j * n + c];
        }
    }
    fn swap(&mut self, i: usize, j: usize) {
        let n = self.n;
        for c in 0..n {
            self.rows.swap(i * n + c, j * n + c);
        }
    }
}

struct RealRows<'a, T> {
    n: usize,
    rows: &'a mut [T],
    transform: &'a mut [i64],
}

impl<T: Real> Rows for RealRows<'_, T> {
    fn len(&self) -> usize {
        self.rows.len() / self.n
    }
    fn dot(&self, i: usize, j: usize) -> f64 {
        let n = self.n;
        let a = &self.rows[i * n..(i + 1) * n];
        let b = &self.rows[j * n..(j + 1) * n];
        a.iter().zip(b).map(|(&x, &y)| x.to_f64_lossy() * y.to_f64_lossy()).sum()
    }
    fn sub_mul(&mut self, k: usize, j: usize, q: i64) {
        let n = self.n;
        let qt = T::from_i64(q).unwrap();
        for c in 0..n {
            self.rows[k * n + c] = self.rows[k * n + c] - qt * self.rows[j * n + c];
            self.transform[k * n + c] -= q * self.transform[j * n + c];
        }
    }
    fn swap(&mut self, i: usize, j: usize) {
        let n = self.n;
        for c in 0..n {
            self.rows.swap(i * n + c, j * n + c);
            self.transform.swap(i * n + c, j * n + c);
        }
    }
}

fn reduce<R: Rows>(b: &mut R, delta: f64) {
    let d = b.len();
    if d < 2 {
        return;
    }
    let mut mu = vec![0.0f64; d * d];
    let mut r = vec![0.0f64; d * d];
    // r[k][j] = <b_k, b*_j>, r[j][j] = |b*_j|^2
    let gso_row = |b: &R, mu: &mut [f64], r: &mut [f64], k: usize| {
        for j in 0..=k {
            let mut v = b.dot(k, j);
            for i in 0..j {
                v -= mu[j * d + i] * r[k * d + i];
            }
            r[k * d + j] = v;
            if j < k {
                mu[k * d + j] = v / r[j * d + j];
            }
        }
    };
    gso_row(b, &mut mu, &mut r, 0);
    let mut k = 1;
    let mut guard = 0usize;
    while k < d {
        guard += 1;
        if guard > 10_000_000 {
            break;
        }
        loop {
            gso_row(b, &mut mu, &mut r, k);
            let mut changed = false;
            for j in (0..k).rev() {
                let m = mu[k * d + j];
                if m.abs() > LLL_ETA {
                    let q = m.round();
                    b.sub_mul(k, j, q as i64);
                    for i in 0..j {
                        mu[k * d + i] -= q * mu[j * d + i];
                    }
                    mu[k * d + j] -= q;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let m = mu[k * d + k - 1];
        if r[k * d + k] < (delta - m * m) * r[(k - 1) * d + k - 1] {
            b.swap(k, k - 1);
            if k == 1 {
                gso_row(b, &mut mu, &mut r, 0);
            } else {
                k -= 1;
            }
        } else {
            k += 1;
        }
    }
}

/// LLL-reduces an integer basis in place (row-major, `n` columns). Rows are
/// combined exactly; only the Gram–Schmidt data is floating point.
pub fn lll_reduce_integer(rows: &mut [i64], n: usize, delta: f64) {
    reduce(&mut IntRows { n, rows }, delta);
}

/// Result of reducing a real lattice: the reduced lattice and the unimodular
/// integer matrix `U` with `B_reduced = U · B_input`.
#[derive(Clone, Debug)]
pub struct LllOutput<T> {
    pub lattice: Lattice<T>,
    pub transform: Vec<i64>,
}

/// LLL reduction with Lovász parameter 0.99.
pub fn lll_reduce<T: Real>(lattice: &Lattice<T>) -> Lattice<T> {
    lll_reduce_with_transform(lattice).lattice
}

pub fn lll_reduce_with_transform<T: Real>(lattice: &Lattice<T>) -> LllOutput<T> {
    let n = lattice.dim();
    let mut rows = lattice.basis().to_vec();
    let mut transform = vec![0i64; n * n];
    for i in 0..n {
        transform[i * n + i] = 1;
    }
    reduce(&mut RealRows { n, rows: &mut rows, transform: &mut transform }, LLL_DELTA);
    // rebuild from the exact transform so rounding does not accumulate across steps
    let mut basis = vec![T::zero(); n * n];
    for i in 0..n {
        for c in 0..n {
            let v: f64 = (0..n)
                .map(|k| transform[i * n + k] as f64 * lattice.basis()[k * n + c].to_f64_lossy())
                .sum();
            basis[i * n + c] = T::lit(v);
        }
    }
    let reduced = Lattice::from_flat_unchecked(n, basis, lattice.provenance().cloned());
    LllOutput { lattice: reduced, transform }
}

/// Checks size reduction and the Lovász condition for a real basis.
pub fn is_lll_reduced<T: Real>(lattice: &Lattice<T>, delta: f64) -> Result<bool> {
    let n = lattice.dim();
    let mut bstar: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut norms: Vec<f64> = Vec::with_capacity(n);
    for i in 0..n {
        let bi: Vec<f64> = lattice.row(i).iter().map(|x| x.to_f64_lossy()).collect();
        let mut v = bi.clone();
        let mut last_mu = 0.0;
        for j in 0..i {
            let m = dot(&bi, &bstar[j]) / norms[j];
            if m.abs() > LLL_ETA + 1e-9 {
                return Ok(false);
            }
            for (vc, bc) in v.iter_mut().zip(&bstar[j]) {
                *vc -= m * bc;
            }
            last_mu = m;
        }
        let nv = dot(&v, &v);
        if nv <= 0.0 {
            return Err(Error::InvalidLattice("dependent rows".into()));
        }
        if i > 0 && nv < (delta - last_mu * last_mu) * norms[i - 1] * (1.0 - 1e-9) {
            return Ok(false);
        }
        bstar.push(v);
        norms.push(nv);
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_lattice_stays_put_up_to_signs() {
        let z = Lattice::<f64>::integer(6);
        let out = lll_reduce_with_transform(&z);
        for i in 0..6 {
            let nonzero: Vec<f64> = out.lattice.row(i).iter().copied().filter(|&x| x != 0.0).collect();
            assert_eq!(nonzero.len(), 1);
            assert_eq!(nonzero[0].abs(), 1.0);
        }
    }

    #[test]
    fn skewed_two_dimensional_basis() {
        let l = Lattice::from_rows(vec![vec![1.0f64, 0.0], vec![1000.3, 1.0]]).unwrap();
        let red = lll_reduce(&l);
        assert!(is_lll_reduced(&red, LLL_DELTA).unwrap());
        assert!((red.det().abs() - 1.0).abs() < 1e-9);
        let shortest = red.row(0).iter().map(|x| x * x).sum::<f64>();
        assert!(shortest <= 1.0 + 1e-12);
    }

    #[test]
    fn integer_reduction_of_index_p_sublattice() {
        // {x : x0 + 5 x1 + 7 x2 = 0 mod 101}; scaled by 7^{-1} = 29 so the last entry is 1
        let a = [29i64, (5 * 29) % 101, 1];
        let mut b = vec![1, 0, 101 - a[0], 0, 1, 101 - a[1], 0, 0, 101];
        let before = b.clone();
        lll_reduce_integer(&mut b, 3, LLL_DELTA);
        for r in b.chunks(3) {
            assert_eq!((a[0] * r[0] + a[1] * r[1] + a[2] * r[2]).rem_euclid(101), 0);
        }
        let det = |m: &[i64]| {
            m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) + m[2] * (m[3] * m[7] - m[4] * m[6])
        };
        assert_eq!(det(&b).abs(), det(&before).abs());
        let norm0: i64 = b[0..3].iter().map(|x| x * x).sum();
        assert!(norm0 < 101 * 101);
    }
}
