//! Short-vector enumeration (Fincke–Pohst over an LLL-reduced basis) and the
//! counting functions `N_n(V)`, `R_n(V)` of normalized volumes.

pub mod lll;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::scalar::Real;
use crate::specfun::ball_geometry;

pub use lll::{is_lll_reduced, lll_reduce, lll_reduce_with_transform, LllOutput, LLL_DELTA};

/// Default bound on search-tree nodes visited by one enumeration.
pub const DEFAULT_NODE_CAP: u64 = 50_000_000;

/// Absolute slack on squared lengths when testing `|v|² ≤ r²`.
pub const LENGTH_SLACK: f64 = 1e-9;

/// One representative of a `±v` pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortVector<T = f64> {
    /// Coefficients with respect to the basis of the lattice passed in.
    pub coeffs: Vec<i64>,
    pub sq_length: T,
}

/// Gram–Schmidt data of a basis: `|Σ x_i b_i|² = Σ_i r_i (x_i + Σ_{j>i} μ_{ji} x_j)²`.
struct Gso<T> {
    n: usize,
    mu: Vec<T>,
    r: Vec<T>,
}

impl<T: Real> Gso<T> {
    fn new(l: &Lattice<T>) -> Self {
        let n = l.dim();
        let g = l.gram();
        let mut mu = vec![T::zero(); n * n];
        let mut r = vec![T::zero(); n];
        for i in 0..n {
            for j in 0..i {
                let mut v = g[i * n + j];
                for k in 0..j {
                    v = v - mu[j * n + k] * mu[i * n + k] * r[k];
                }
                mu[i * n + j] = v / r[j];
            }
            let mut v = g[i * n + i];
            for k in 0..i {
                v = v - mu[i * n + k] * mu[i * n + k] * r[k];
            }
            r[i] = v;
        }
        Gso { n, mu, r }
    }
}

struct Search<'a, T, F> {
    gso: &'a Gso<T>,
    bound: T,
    x: Vec<i64>,
    nodes: u64,
    cap: u64,
    radius: f64,
    visit: F,
}

impl<T: Real, F: FnMut(&[i64], T)> Search<'_, T, F> {
    /// Enumerates level `i` given `x_{i+1..n}` and the partial squared length above it.
    fn level(&mut self, i: usize, partial: T, all_zero_above: bool) -> Result<()> {
        let n = self.gso.n;
        let mut center = T::zero();
        for j in i + 1..n {
            if self.x[j] != 0 {
                center = center - self.gso.mu[j * n + i] * T::from_i64(self.x[j]).unwrap();
            }
        }
        let ri = self.gso.r[i];
        let budget = self.bound - partial;
        if budget < T::zero() {
            return Ok(());
        }
        let half_width = (budget / ri).sqrt();
        let mut lo = (center - half_width).ceil().to_i64().unwrap();
        let hi = (center + half_width).floor().to_i64().unwrap();
        if all_zero_above {
            lo = lo.max(if i == 0 { 1 } else { 0 });
        }
        for xi in lo..=hi {
            self.nodes += 1;
            if self.nodes > self.cap {
                return Err(Error::ResourceCap { cap: self.cap, radius: self.radius });
            }
            let d = T::from_i64(xi).unwrap() - center;
            let p = partial + ri * d * d;
            if p > self.bound {
                continue;
            }
            self.x[i] = xi;
            if i == 0 {
                (self.visit)(&self.x, p);
            } else {
                self.level(i - 1, p, all_zero_above && xi == 0)?;
            }
        }
        self.x[i] = 0;
        Ok(())
    }
}

fn check_radius<T: Real>(n: usize, radius: T, cap: u64) -> Result<()> {
    if !(radius > T::zero()) || !radius.is_finite() {
        return Err(crate::error::domain("vectors_within", format!("radius = {radius} must be positive")));
    }
    let geo = ball_geometry::<f64>(n);
    let r = radius.to_f64_lossy();
    let predicted = 2.0 * (geo.log_volume + n as f64 * r.ln()).exp();
    if predicted > cap as f64 {
        return Err(Error::ResourceCap { cap, radius: r });
    }
    Ok(())
}

/// Calls `visit(x, |v|²)` for one representative `x` (coefficients in the
/// LLL-reduced basis `reduced`) of every pair `±v` with `0 < |v| ≤ radius`.
pub(crate) fn for_each_within<T: Real, F: FnMut(&[i64], T)>(
    reduced: &Lattice<T>,
    radius: T,
    cap: u64,
    visit: F,
) -> Result<u64> {
    let n = reduced.dim();
    check_radius(n, radius, cap)?;
    let gso = Gso::new(reduced);
    let mut search = Search {
        gso: &gso,
        bound: radius * radius + T::lit(LENGTH_SLACK),
        x: vec![0; n],
        nodes: 0,
        cap,
        radius: radius.to_f64_lossy(),
        visit,
    };
    search.level(n - 1, T::zero(), true)?;
    Ok(search.nodes)
}

/// Every nonzero lattice vector with `|v| ≤ radius`, one per `±` pair, sorted by
/// squared length with ties broken by lexicographic coefficient order.
pub fn vectors_within<T: Real>(lattice: &Lattice<T>, radius: T) -> Result<Vec<ShortVector<T>>> {
    vectors_within_capped(lattice, radius, DEFAULT_NODE_CAP)
}

pub fn vectors_within_capped<T: Real>(lattice: &Lattice<T>, radius: T, cap: u64) -> Result<Vec<ShortVector<T>>> {
    let n = lattice.dim();
    let LllOutput { lattice: reduced, transform } = lll_reduce_with_transform(lattice);
    let mut out = Vec::new();
    for_each_within(&reduced, radius, cap, |x, sq| {
        let mut coeffs = vec![0i64; n];
        for (i, &xi) in x.iter().enumerate() {
            if xi != 0 {
                for (c, &u) in coeffs.iter_mut().zip(&transform[i * n..(i + 1) * n]) {
                    *c += xi * u;
                }
            }
        }
        // canonical sign: first nonzero coefficient positive
        if coeffs.iter().find(|&&c| c != 0).is_some_and(|&c| c < 0) {
            coeffs.iter_mut().for_each(|c| *c = -*c);
        }
        out.push(ShortVector { coeffs, sq_length: sq });
    })?;
    out.sort_by(|a, b| a.sq_length.partial_cmp(&b.sq_length).unwrap().then_with(|| a.coeffs.cmp(&b.coeffs)));
    Ok(out)
}

/// Exhaustive search over the coefficient box `|x_i| ≤ radius·|b_i^*|`, where `b_i^*`
/// are the dual basis vectors. Independent of the tree search; exponential cost.
pub fn brute_force_within<T: Real>(lattice: &Lattice<T>, radius: T) -> Result<Vec<ShortVector<T>>> {
    let n = lattice.dim();
    let dual = lattice.dual()?;
    let bounds: Vec<i64> = dual
        .rows()
        .map(|d| (radius * crate::lattice::dot(d, d).sqrt()).floor().to_i64().unwrap())
        .collect();
    let bound = radius * radius + T::lit(LENGTH_SLACK);
    let mut out = Vec::new();
    let mut x: Vec<i64> = bounds.iter().map(|b| -b).collect();
    loop {
        if x.iter().any(|&c| c != 0) && x.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0) {
            let v = lattice.combination(&x);
            let sq = crate::lattice::dot(&v, &v);
            if sq <= bound {
                out.push(ShortVector { coeffs: x.clone(), sq_length: sq });
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                out.sort_by(|a, b| {
                    a.sq_length.partial_cmp(&b.sq_length).unwrap().then_with(|| a.coeffs.cmp(&b.coeffs))
                });
                return Ok(out);
            }
            if x[i] < bounds[i] {
                x[i] += 1;
                break;
            }
            x[i] = -bounds[i];
            i += 1;
        }
    }
}

/// Ascending normalized volumes `𝒱_j = V_n ℓ_j^n` of the `±` pairs with `𝒱_j ≤ vmax`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorLengthList<T = f64> {
    pub dim: usize,
    pub vmax: T,
    pub volumes: Vec<T>,
    pub sq_lengths: Vec<T>,
}

impl<T: Real> VectorLengthList<T> {
    /// Enumerates all pairs with normalized volume at most `vmax`.
    pub fn enumerate(lattice: &Lattice<T>, vmax: T) -> Result<Self> {
        Self::enumerate_capped(lattice, vmax, DEFAULT_NODE_CAP)
    }

    pub fn enumerate_capped(lattice: &Lattice<T>, vmax: T, cap: u64) -> Result<Self> {
        let n = lattice.dim();
        if !(vmax > T::zero()) {
            return Err(crate::error::domain("VectorLengthList::enumerate", format!("vmax = {vmax}")));
        }
        let geo = ball_geometry::<T>(n);
        let nt = T::from_usize_lossy(n);
        let radius = ((vmax.ln() - geo.log_volume) / nt).exp();
        let reduced = lll_reduce(lattice);
        let mut sq_lengths = Vec::new();
        for_each_within(&reduced, radius, cap, |_, sq| sq_lengths.push(sq))?;
        sq_lengths.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let half_n = nt * T::lit(0.5);
        let mut volumes: Vec<T> = sq_lengths.iter().map(|&q| (geo.log_volume + half_n * q.ln()).exp()).collect();
        // the slack may admit points a hair beyond vmax
        let keep = volumes.partition_point(|&v| v <= vmax);
        volumes.truncate(keep);
        sq_lengths.truncate(keep);
        Ok(VectorLengthList { dim: n, vmax, volumes, sq_lengths })
    }

    /// `N_n(V)` (counting both `±v`) and `R_n(V) = N_n(V) − V`.
    pub fn counting_functions(&self, v: T) -> Result<(u64, T)> {
        if v > self.vmax {
            return Err(Error::CutoffExceeded { requested: v.to_f64_lossy(), vmax: self.vmax.to_f64_lossy() });
        }
        if v < T::zero() {
            return Err(crate::error::domain("counting_functions", format!("V = {v} is negative")));
        }
        let count = 2 * self.volumes.partition_point(|&x| x <= v) as u64;
        Ok((count, T::from_u64(count).unwrap() - v))
    }

    /// CSV with columns `j, volume_Vj, sq_length` (1-based `j`).
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["j", "volume_Vj", "sq_length"])?;
        for (j, (v, q)) in self.volumes.iter().zip(&self.sq_lengths).enumerate() {
            wr.write_record([
                (j + 1).to_string(),
                format!("{:.16e}", v.to_f64_lossy()),
                format!("{:.16e}", q.to_f64_lossy()),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Free-function form of [`VectorLengthList::counting_functions`].
pub fn counting_functions<T: Real>(vl: &VectorLengthList<T>, v: T) -> Result<(u64, T)> {
    vl.counting_functions(v)
}
