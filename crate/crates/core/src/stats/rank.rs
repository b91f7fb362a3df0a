//! Rankings, split volatility and mean absolute accuracy shifts.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bootstrap::variance;
use super::splits::SplitPlan;
use crate::error::{Error, Result};

/// Competition ranking, 1 = best. Exact ties are broken by model id, so
/// ranks are always a permutation of `1..=M`.
pub fn rank_models(accs: &BTreeMap<String, f64>) -> BTreeMap<String, usize> {
    let mut order: Vec<(&String, f64)> = accs.iter().map(|(m, &a)| (m, a)).collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    order.into_iter().enumerate().map(|(i, (m, _))| (m.clone(), i + 1)).collect()
}

/// Same as [`rank_models`] over parallel slices; `ids` decides ties.
pub fn rank_slice(ids: &[String], accs: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..ids.len()).collect();
    order.sort_by(|&a, &b| accs[b].total_cmp(&accs[a]).then_with(|| ids[a].cmp(&ids[b])));
    let mut ranks = vec![0; ids.len()];
    for (pos, &m) in order.iter().enumerate() {
        ranks[m] = pos + 1;
    }
    ranks
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelVolatility {
    pub model_id: String,
    pub acc_mean: f64,
    pub acc_std: f64,
    pub rank_mean: f64,
    pub rank_std: f64,
    pub rank_min: usize,
    pub rank_max: usize,
}

impl ModelVolatility {
    pub fn rank_range(&self) -> usize {
        self.rank_max - self.rank_min
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolatilityReport {
    pub models: Vec<ModelVolatility>,
    /// Mean over models of each model's accuracy std across splits.
    pub mean_acc_std: f64,
    /// Std across splits of the model-averaged accuracy.
    pub std_of_mean_acc: f64,
    /// `[split][model]` accuracy, model order as in `models`.
    #[serde(skip)]
    pub split_accs: Vec<Vec<f64>>,
    /// `[split][model]` rank.
    #[serde(skip)]
    pub split_ranks: Vec<Vec<usize>>,
}

impl VolatilityReport {
    /// Fraction of splits where model `a` ranks below (worse than) model `b`.
    pub fn below_frequency(&self, a: usize, b: usize) -> f64 {
        let n = self.split_ranks.iter().filter(|r| r[a] > r[b]).count();
        n as f64 / self.split_ranks.len().max(1) as f64
    }
}

/// Accuracy and rank dispersion across the splits of `plan`.
///
/// `rows[m]` holds model `m`'s correctness over the pool. Standard deviations
/// use the n - 1 denominator.
pub fn volatility(model_ids: &[String], rows: &[&[bool]], plan: &SplitPlan) -> Result<VolatilityReport> {
    if model_ids.len() != rows.len() {
        return Err(Error::LengthMismatch { left: model_ids.len(), right: rows.len() });
    }
    if let Some(r) = rows.iter().find(|r| r.len() != plan.pool_size) {
        return Err(Error::LengthMismatch { left: r.len(), right: plan.pool_size });
    }
    if plan.split_size == 0 || plan.indices.is_empty() || rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    let split_accs: Vec<Vec<f64>> = plan
        .indices
        .par_iter()
        .map(|idx| {
            rows.iter()
                .map(|row| idx.iter().filter(|&&i| row[i]).count() as f64 / idx.len() as f64)
                .collect()
        })
        .collect();
    let split_ranks: Vec<Vec<usize>> = split_accs.iter().map(|a| rank_slice(model_ids, a)).collect();
    let models: Vec<ModelVolatility> = model_ids
        .iter()
        .enumerate()
        .map(|(m, id)| {
            let accs: Vec<f64> = split_accs.iter().map(|a| a[m]).collect();
            let ranks: Vec<f64> = split_ranks.iter().map(|r| r[m] as f64).collect();
            ModelVolatility {
                model_id: id.clone(),
                acc_mean: accs.iter().sum::<f64>() / accs.len() as f64,
                acc_std: variance(&accs).sqrt(),
                rank_mean: ranks.iter().sum::<f64>() / ranks.len() as f64,
                rank_std: variance(&ranks).sqrt(),
                rank_min: split_ranks.iter().map(|r| r[m]).min().unwrap_or(1),
                rank_max: split_ranks.iter().map(|r| r[m]).max().unwrap_or(1),
            }
        })
        .collect();
    let mean_acc_std = models.iter().map(|m| m.acc_std).sum::<f64>() / models.len() as f64;
    let averaged: Vec<f64> = split_accs.iter().map(|a| a.iter().sum::<f64>() / a.len() as f64).collect();
    Ok(VolatilityReport { models, mean_acc_std, std_of_mean_acc: variance(&averaged).sqrt(), split_accs, split_ranks })
}

/// Mean over models of |acc(variant) - acc(default)|, per variant.
pub fn mean_abs_shift(
    default: &BTreeMap<String, f64>,
    variants: &BTreeMap<String, BTreeMap<String, f64>>,
) -> Result<BTreeMap<String, f64>> {
    if default.is_empty() {
        return Err(Error::EmptyInput);
    }
    variants
        .iter()
        .map(|(variant, accs)| {
            let mut total = 0.0;
            for (model, base) in default {
                let v = accs
                    .get(model)
                    .ok_or_else(|| Error::IncompleteMatrix(format!("variant {variant} lacks model {model}")))?;
                total += (v - base).abs();
            }
            Ok((variant.clone(), total / default.len() as f64))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::make_splits;
    use proptest::prelude::*;

    fn map(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn ranking_examples() {
        let r = rank_models(&map(&[("A", 0.9), ("B", 0.7), ("C", 0.8)]));
        assert_eq!(r, [("A".to_string(), 1), ("B".to_string(), 3), ("C".to_string(), 2)].into());
        let r = rank_models(&map(&[("A", 0.8), ("B", 0.8)]));
        assert_eq!((r["A"], r["B"]), (1, 2));
        assert_eq!(rank_models(&map(&[("solo", 0.1)]))["solo"], 1);
    }

    #[test]
    fn shift_examples() {
        let d = map(&[("m", 0.5)]);
        let v: BTreeMap<_, _> = [("x".to_string(), map(&[("m", 0.63)]))].into();
        assert!((mean_abs_shift(&d, &v).unwrap()["x"] - 0.13).abs() < 1e-12);
        let d = map(&[("a", 0.5), ("b", 0.5)]);
        let v: BTreeMap<_, _> = [("x".to_string(), map(&[("a", 0.55), ("b", 0.43)]))].into();
        assert!((mean_abs_shift(&d, &v).unwrap()["x"] - 0.06).abs() < 1e-12);
        let v: BTreeMap<_, _> = [("same".to_string(), d.clone())].into();
        assert_eq!(mean_abs_shift(&d, &v).unwrap()["same"], 0.0);
    }

    #[test]
    fn constant_model_is_still() {
        let row = vec![true; 50];
        let plan = make_splits(50, 10, 100, 1).unwrap();
        let v = volatility(&["m".into()], &[&row], &plan).unwrap();
        assert_eq!(v.models[0].acc_std, 0.0);
        assert_eq!(v.models[0].rank_range(), 0);
    }

    #[test]
    fn identical_models_keep_tie_order() {
        let row: Vec<bool> = (0..80).map(|i| i % 3 == 0).collect();
        let plan = make_splits(80, 20, 200, 2).unwrap();
        let v = volatility(&["a".into(), "b".into()], &[&row, &row], &plan).unwrap();
        assert!(v.split_accs.iter().all(|s| s[0] == s[1]));
        assert!(v.split_ranks.iter().all(|r| r == &vec![1, 2]));
    }

    proptest! {
        #[test]
        fn ranks_invariant_under_monotone_maps(accs in proptest::collection::vec(0.0f64..1.0, 1..8)) {
            let m: BTreeMap<String, f64> = accs.iter().enumerate().map(|(i, &a)| (format!("m{i}"), a)).collect();
            let t: BTreeMap<String, f64> = m.iter().map(|(k, &a)| (k.clone(), (3.0 * a).exp() + 1.0)).collect();
            let r = rank_models(&m);
            prop_assert_eq!(&r, &rank_models(&t));
            let mut ranks: Vec<usize> = r.values().copied().collect();
            ranks.sort_unstable();
            prop_assert_eq!(ranks, (1..=accs.len()).collect::<Vec<_>>());
        }
    }
}
