//! Covolume-one lattices in `R^n`, their duals and Gram matrices, and random sampling.

pub(crate) mod hecke;
mod io;
pub(crate) mod linalg;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use hecke::{default_walk_steps, hecke_sample, hecke_walk_sample, is_prime, DEFAULT_PRIME};
pub use io::{format_lattice, parse_lattice, read_lattice, write_lattice};

/// Lattice number `trial` of dimension `n` under `master_seed`, drawn with `steps`
/// Hecke steps at level `p` (one step is [`hecke_sample`]). Each `(n, trial)` pair
/// owns its own random stream, so experiments and the CLI reproduce the same lattice.
pub fn sample_lattice(n: usize, p: u64, steps: u32, master_seed: u64, trial: u64) -> Result<Lattice<f64>> {
    let mut rng = crate::rng::trial_rng(master_seed, crate::rng::StreamTag::Lattice, ((n as u64) << 40) | trial);
    let l: Lattice<f64> = hecke_walk_sample(n, p, steps, &mut rng)?;
    let prov = Provenance { prime: Some(p), hecke_steps: Some(steps), seed: Some(master_seed), trial: Some(trial) };
    Ok(l.with_provenance(prov))
}

/// Absolute slack allowed on `|det(basis)| = 1`.
pub const COVOLUME_TOL: f64 = 1e-9;

/// Where a sampled lattice came from.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub prime: Option<u64>,
    pub hecke_steps: Option<u32>,
    pub seed: Option<u64>,
    pub trial: Option<u64>,
}

impl Provenance {
    pub fn is_empty(&self) -> bool {
        self.prime.is_none() && self.hecke_steps.is_none() && self.seed.is_none() && self.trial.is_none()
    }
}

/// A lattice of covolume one, stored by a basis whose rows are the basis vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lattice<T = f64> {
    dim: usize,
    basis: Vec<T>,
    provenance: Option<Provenance>,
}

impl<T: Real> Lattice<T> {
    /// Builds a lattice from basis rows, enforcing `|det| = 1`.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidLattice("dimension must be at least 1".into()));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::InvalidLattice(format!("row {i} has {} entries, expected {n}", r.len())));
        }
        let basis: Vec<T> = rows.into_iter().flatten().collect();
        Self::from_flat(n, basis)
    }

    /// Builds a lattice from a row-major `n × n` basis, enforcing `|det| = 1`.
    pub fn from_flat(dim: usize, basis: Vec<T>) -> Result<Self> {
        if dim == 0 || basis.len() != dim * dim {
            return Err(Error::InvalidLattice(format!("basis of length {} is not {dim}×{dim}", basis.len())));
        }
        if basis.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidLattice("non-finite basis entry".into()));
        }
        let lat = Lattice { dim, basis, provenance: None };
        let det = lat.det().to_f64_lossy();
        if (det.abs() - 1.0).abs() > Self::covolume_tol() {
            return Err(Error::Covolume { det });
        }
        Ok(lat)
    }

    fn covolume_tol() -> f64 {
        COVOLUME_TOL.max(T::epsilon().to_f64_lossy() * 64.0)
    }

    /// Builds a lattice from any nonsingular basis, rescaled to covolume one.
    pub fn from_rows_normalized(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidLattice("basis must be square and nonempty".into()));
        }
        let flat: Vec<T> = rows.into_iter().flatten().collect();
        let det = linalg::det(&flat, n).abs();
        if !(det > T::zero()) || !det.is_finite() {
            return Err(Error::InvalidLattice("singular basis".into()));
        }
        let s = det.powf(-T::from_usize_lossy(n).recip());
        Self::from_flat(n, flat.into_iter().map(|x| x * s).collect())
    }

    /// The standard lattice `Z^n`.
    pub fn integer(n: usize) -> Self {
        assert!(n >= 1, "dimension must be at least 1");
        let mut basis = vec![T::zero(); n * n];
        for i in 0..n {
            basis[i * n + i] = T::one();
        }
        Lattice { dim: n, basis, provenance: None }
    }

    pub(crate) fn from_flat_unchecked(dim: usize, basis: Vec<T>, provenance: Option<Provenance>) -> Self {
        Lattice { dim, basis, provenance }
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    /// Row-major basis entries.
    pub fn basis(&self) -> &[T] {
        &self.basis
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.basis[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.basis.chunks_exact(self.dim)
    }

    pub fn det(&self) -> T {
        linalg::det(&self.basis, self.dim)
    }

    /// Gram matrix `B Bᵀ`, row-major.
    pub fn gram(&self) -> Vec<T> {
        let n = self.dim;
        let mut g = vec![T::zero(); n * n];
        for i in 0..n {
            for j in i..n {
                let v = dot(self.row(i), self.row(j));
                g[i * n + j] = v;
                g[j * n + i] = v;
            }
        }
        g
    }

    /// The dual lattice, with basis the inverse-transpose of this one.
    pub fn dual(&self) -> Result<Self> {
        let n = self.dim;
        let inv = linalg::inverse(&self.basis, n).ok_or_else(|| Error::InvalidLattice("singular basis".into()))?;
        let mut basis = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                basis[i * n + j] = inv[j * n + i];
            }
        }
        Ok(Lattice { dim: n, basis, provenance: self.provenance.clone() })
    }

    /// The vector `Σ coeffs[i] · b_i`.
    pub fn combination(&self, coeffs: &[i64]) -> Vec<T> {
        let n = self.dim;
        let mut v = vec![T::zero(); n];
        for (i, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                let ct = T::from_i64(c).unwrap();
                for (vk, &bk) in v.iter_mut().zip(self.row(i)) {
                    *vk = *vk + ct * bk;
                }
            }
        }
        v
    }

    /// Converts the scalar type.
    pub fn cast<U: Real>(&self) -> Lattice<U> {
        Lattice {
            dim: self.dim,
            basis: self.basis.iter().map(|&x| U::lit(x.to_f64_lossy())).collect(),
            provenance: self.provenance.clone(),
        }
    }
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}
