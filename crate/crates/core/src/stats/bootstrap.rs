//! Paired bootstrap of marker effects and the variance ratio.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::accuracy::{percentile_sorted, resample};
use crate::error::{Error, Result};

/// Default replicate count.
pub const DEFAULT_REPLICATES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub model_id: String,
    pub variant: String,
    #[serde(rename = "B")]
    pub replicates: usize,
    /// Replicate deltas, default minus variant, by replicate index.
    #[serde(skip)]
    pub deltas: Vec<f64>,
    pub point_delta: f64,
    pub replicate_sd: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub significant: bool,
}

/// Mean of `value(i)` over resampled indices, for each replicate.
pub(crate) fn replicate_means(n: usize, replicates: usize, seed: u64, value: impl Fn(usize) -> f64 + Sync) -> Vec<f64> {
    (0..replicates)
        .into_par_iter()
        .map(|b| resample(n, seed, b).map(&value).sum::<f64>() / n as f64)
        .collect()
}

/// Sample variance (n - 1 denominator); 0 for fewer than two values.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Paired bootstrap of `acc(default) - acc(variant)` over shared item resamples.
pub fn paired_bootstrap(default_bits: &[bool], variant_bits: &[bool], replicates: usize, seed: u64) -> Result<BootstrapResult> {
    if default_bits.len() != variant_bits.len() {
        return Err(Error::LengthMismatch { left: default_bits.len(), right: variant_bits.len() });
    }
    let n = default_bits.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if replicates == 0 {
        return Err(Error::ConfigInvalid("bootstrap needs at least one replicate".into()));
    }
    let diff: Vec<f64> = default_bits
        .iter()
        .zip(variant_bits)
        .map(|(&a, &b)| f64::from(u8::from(a)) - f64::from(u8::from(b)))
        .collect();
    let point_delta = diff.iter().sum::<f64>() / n as f64;
    let deltas = replicate_means(n, replicates, seed, |i| diff[i]);
    let mut sorted = deltas.clone();
    sorted.sort_by(f64::total_cmp);
    let ci_low = percentile_sorted(&sorted, 0.025);
    let ci_high = percentile_sorted(&sorted, 0.975);
    Ok(BootstrapResult {
        model_id: String::new(),
        variant: String::new(),
        replicates,
        replicate_sd: variance(&deltas).sqrt(),
        deltas,
        point_delta,
        ci_low,
        ci_high,
        significant: !(ci_low <= 0.0 && 0.0 <= ci_high),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceRatioReport {
    pub model_id: String,
    pub numerator: f64,
    pub denominator: f64,
    /// `None` when the denominator is zero.
    #[serde(rename = "R")]
    pub r: Option<f64>,
}

/// Mean variance of the variant deltas over the resampling variance of
/// default accuracy. All inputs must share one replicate count.
pub fn variance_ratio(results: &[BootstrapResult], default_accs: &[f64]) -> Result<VarianceRatioReport> {
    if results.is_empty() {
        return Err(Error::EmptyInput);
    }
    let b = default_accs.len();
    for r in results {
        if r.deltas.len() != b {
            return Err(Error::InconsistentB { expected: b, found: r.deltas.len() });
        }
    }
    let numerator = results.iter().map(|r| variance(&r.deltas)).sum::<f64>() / results.len() as f64;
    let denominator = variance(default_accs);
    Ok(VarianceRatioReport {
        model_id: results[0].model_id.clone(),
        numerator,
        denominator,
        r: (denominator > 0.0).then(|| numerator / denominator),
    })
}
