//! Accuracy point estimates with binomial confidence intervals.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Normal quantile for a two-sided 95% interval.
pub const Z95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CiMethod {
    Wilson,
    BootstrapPercentile,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccuracyEstimate {
    pub k: usize,
    pub n: usize,
    pub acc: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub method: CiMethod,
}

impl AccuracyEstimate {
    pub fn overlaps(&self, other: &AccuracyEstimate) -> bool {
        self.ci_low <= other.ci_high && other.ci_low <= self.ci_high
    }
}

/// Wilson score interval for `k` successes out of `n`.
pub fn wilson(k: usize, n: usize, z: f64) -> (f64, f64) {
    let n_f = n as f64;
    let p = k as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let centre = (p + z2 / (2.0 * n_f)) / denom;
    let half = z / denom * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt();
    ((centre - half).clamp(0.0, p), (centre + half).clamp(p, 1.0))
}

fn count(bits: &[bool]) -> Result<(usize, usize)> {
    if bits.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok((bits.iter().filter(|&&b| b).count(), bits.len()))
}

/// Accuracy with a 95% Wilson interval.
pub fn accuracy(bits: &[bool]) -> Result<AccuracyEstimate> {
    accuracy_z(bits, Z95)
}

pub fn accuracy_z(bits: &[bool], z: f64) -> Result<AccuracyEstimate> {
    let (k, n) = count(bits)?;
    let (ci_low, ci_high) = wilson(k, n, z);
    Ok(AccuracyEstimate { k, n, acc: k as f64 / n as f64, ci_low, ci_high, method: CiMethod::Wilson })
}

/// Linear-interpolation percentile of sorted data (`q` in [0, 1]).
pub fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Accuracy of each bootstrap replicate. Replicate `b` draws its `n` indices
/// from the stream keyed by `(seed, b)`, the same indices
/// [`paired_bootstrap`](super::paired_bootstrap) uses for that seed.
pub fn bootstrap_accuracies(bits: &[bool], replicates: usize, seed: u64) -> Result<Vec<f64>> {
    let (_, n) = count(bits)?;
    Ok(super::bootstrap::replicate_means(n, replicates, seed, |i| f64::from(u8::from(bits[i]))))
}

/// Accuracy with a 95% percentile-bootstrap interval.
pub fn bootstrap_accuracy(bits: &[bool], replicates: usize, seed: u64) -> Result<AccuracyEstimate> {
    let (k, n) = count(bits)?;
    let mut accs = bootstrap_accuracies(bits, replicates.max(1), seed)?;
    accs.sort_by(f64::total_cmp);
    let acc = k as f64 / n as f64;
    Ok(AccuracyEstimate {
        k,
        n,
        acc,
        ci_low: percentile_sorted(&accs, 0.025).min(acc),
        ci_high: percentile_sorted(&accs, 0.975).max(acc),
        method: CiMethod::BootstrapPercentile,
    })
}

/// Draws `n` indices uniformly with replacement from `0..n`.
pub(crate) fn resample(n: usize, seed: u64, replicate: usize) -> impl Iterator<Item = usize> {
    let mut g = rng::stream(seed, "bootstrap", &[replicate as u64]);
    (0..n).map(move |_| g.gen_range(0..n))
}
