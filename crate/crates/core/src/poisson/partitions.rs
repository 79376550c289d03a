//! Set partitions without singleton blocks and the exact mixed moments they produce.

use crate::error::{domain, Result};

/// Largest `k` accepted by [`partitions_no_singletons`].
pub const MAX_PARTITION_SIZE: usize = 16;

/// Iterator over the partitions of `{0, …, k−1}` with every block of size at least two.
///
/// Partitions are produced as restricted growth strings in lexicographic order and
/// returned as lists of blocks, each block ascending, blocks ordered by least element.
#[derive(Clone, Debug)]
pub struct NoSingletonPartitions {
    k: usize,
    labels: Vec<usize>,
    started: bool,
    done: bool,
}

pub fn partitions_no_singletons(k: usize) -> Result<NoSingletonPartitions> {
    if k > MAX_PARTITION_SIZE {
        return Err(domain("partitions_no_singletons", format!("k = {k} exceeds {MAX_PARTITION_SIZE}")));
    }
    Ok(NoSingletonPartitions { k, labels: vec![0; k], started: false, done: false })
}

impl NoSingletonPartitions {
    /// Next restricted growth string; `false` once exhausted.
    fn advance(&mut self) -> bool {
        let k = self.k;
        let mut i = k;
        while i > 1 {
            i -= 1;
            let max_before = self.labels[..i].iter().copied().max().unwrap_or(0);
            if self.labels[i] <= max_before {
                self.labels[i] += 1;
                for l in &mut self.labels[i + 1..] {
                    *l = 0;
                }
                return true;
            }
        }
        false
    }

    fn has_singleton(&self) -> bool {
        let blocks = self.labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut sizes = vec![0usize; blocks];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes.contains(&1)
    }

    fn blocks(&self) -> Vec<Vec<usize>> {
        let count = self.labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut out = vec![Vec::new(); count];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }
}

impl Iterator for NoSingletonPartitions {
    type Item = Vec<Vec<usize>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if self.k == 0 {
            self.done = true;
            return Some(Vec::new());
        }
        loop {
            if self.started {
                if !self.advance() {
                    self.done = true;
                    return None;
                }
            } else {
                self.started = true;
            }
            if !self.has_singleton() {
                return Some(self.blocks());
            }
        }
    }
}

/// `E(∏_j H(c_j, δ))` for `H(c,δ) = ∫_δ^∞ V^{-2c} dR(V)`:
///
/// `Σ_P 2^{k−#P} δ^{#P − 2Σc_j} ∏_{B∈P} (2Σ_{j∈B} c_j − 1)^{-1}`,
/// the sum running over partitions of the index set with no singleton block.
pub fn moments_exact(c_list: &[f64], delta: f64) -> Result<f64> {
    if c_list.is_empty() {
        return Err(domain("moments_exact", "need at least one c"));
    }
    if let Some(c) = c_list.iter().find(|&&c| !(c > 0.25 && c < 0.5)) {
        return Err(domain("moments_exact", format!("c = {c} outside (1/4, 1/2)")));
    }
    if !(delta > 0.0) {
        return Err(domain("moments_exact", format!("delta = {delta} must be positive")));
    }
    let k = c_list.len();
    let total_c: f64 = c_list.iter().sum();
    let mut sum = 0.0;
    for p in partitions_no_singletons(k)? {
        let blocks = p.len() as i32;
        let prod: f64 = p.iter().map(|b| 1.0 / (2.0 * b.iter().map(|&j| c_list[j]).sum::<f64>() - 1.0)).product();
        sum += 2f64.powi(k as i32 - blocks) * delta.powf(blocks as f64 - 2.0 * total_c) * prod;
    }
    Ok(sum)
}
