//! Accuracy intervals, paired bootstrap, variance ratio, splits and rank volatility.
//!
//! Every operation here is a pure function of its inputs and an explicit
//! seed. Bootstrap replicate `b` always resamples with the stream keyed by
//! `(seed, b)`, so two calls with the same seed see the same item draws and
//! their replicates are paired.

mod accuracy;
mod bootstrap;
mod rank;
mod splits;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use accuracy::{
    accuracy, accuracy_z, bootstrap_accuracies, bootstrap_accuracy, percentile_sorted, wilson, AccuracyEstimate,
    CiMethod, Z95,
};
pub use bootstrap::{paired_bootstrap, variance, variance_ratio, BootstrapResult, VarianceRatioReport, DEFAULT_REPLICATES};
pub use rank::{mean_abs_shift, rank_models, rank_slice, volatility, ModelVolatility, VolatilityReport};
pub use splits::{make_splits, SplitPlan};

use crate::error::{Error, Result};
use crate::model::{Compression, Condition, CorrectnessMatrix};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub replicates: usize,
    pub split_size: usize,
    pub split_count: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellStat {
    pub model_id: String,
    pub style_id: String,
    pub jpeg_quality: Compression,
    pub accuracy: AccuracyEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkerEffect {
    pub jpeg_quality: Compression,
    #[serde(flatten)]
    pub result: BootstrapResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioStat {
    pub jpeg_quality: Compression,
    #[serde(flatten)]
    pub report: VarianceRatioReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolatilityStat {
    pub style_id: String,
    pub jpeg_quality: Compression,
    #[serde(flatten)]
    pub report: VolatilityReport,
    /// Per-split ranks `[split][model]`, kept for default-style conditions only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_trajectory: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftStat {
    pub jpeg_quality: Compression,
    pub shifts: BTreeMap<String, f64>,
}

/// Everything `analyze` computes for one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub dataset: String,
    pub default_style: String,
    pub config: AnalysisConfig,
    pub models: Vec<String>,
    pub cells: Vec<CellStat>,
    pub marker_effects: Vec<MarkerEffect>,
    pub variance_ratios: Vec<RatioStat>,
    pub volatility: Vec<VolatilityStat>,
    pub mean_abs_shift: Vec<ShiftStat>,
}

impl StatsReport {
    pub fn cell(&self, model: &str, c: &Condition) -> Option<&CellStat> {
        self.cells
            .iter()
            .find(|s| s.model_id == model && s.style_id == c.style_id && s.jpeg_quality == c.jpeg_quality)
    }

    /// Accuracy of every model under `c`.
    pub fn accuracies(&self, c: &Condition) -> BTreeMap<String, f64> {
        self.cells
            .iter()
            .filter(|s| s.style_id == c.style_id && s.jpeg_quality == c.jpeg_quality)
            .map(|s| (s.model_id.clone(), s.accuracy.acc))
            .collect()
    }
}

fn quality_key(q: Compression) -> u64 {
    match q {
        Compression::Passthrough => 0,
        Compression::Jpeg(q) => u64::from(q),
    }
}

/// Seed shared by all bootstrap calls for one model at one quality, so the
/// default and every variant are resampled on the same items.
pub fn bootstrap_seed(seed: u64, model: &str, q: Compression) -> u64 {
    rng::derive_key(seed, "bootstrap.model", &[rng::key_str(model), quality_key(q)])
}

/// Runs the full statistical analysis over a complete matrix.
///
/// Marker effects compare each style against `default_style` at the same
/// quality. Volatility uses one split plan for every condition.
pub fn analyze(matrix: &CorrectnessMatrix, dataset: &str, default_style: &str, cfg: AnalysisConfig) -> Result<StatsReport> {
    let models = matrix.models().to_vec();
    let pool = matrix.items().len();
    if models.is_empty() || pool == 0 {
        return Err(Error::EmptyInput);
    }
    let plan = make_splits(pool, cfg.split_size, cfg.split_count, rng::derive_key(cfg.seed, "splits", &[]))?;

    let mut cells = Vec::new();
    for (m, model) in models.iter().enumerate() {
        for (c, cond) in matrix.conditions().iter().enumerate() {
            cells.push(CellStat {
                model_id: model.clone(),
                style_id: cond.style_id.clone(),
                jpeg_quality: cond.jpeg_quality,
                accuracy: accuracy(matrix.row(m, c))?,
            });
        }
    }

    let mut qualities: Vec<Compression> = matrix.conditions().iter().map(|c| c.jpeg_quality).collect();
    qualities.sort();
    qualities.dedup();

    let mut marker_effects = Vec::new();
    let mut variance_ratios = Vec::new();
    let mut mean_abs = Vec::new();
    for &q in &qualities {
        let Some(d) = matrix.condition_index(&Condition::new(default_style, q)) else {
            continue;
        };
        let variants: Vec<usize> = (0..matrix.conditions().len())
            .filter(|&c| c != d && matrix.conditions()[c].jpeg_quality == q)
            .collect();
        if variants.is_empty() {
            continue;
        }
        let mut default_accs = BTreeMap::new();
        let mut variant_accs: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
        for (m, model) in models.iter().enumerate() {
            let seed = bootstrap_seed(cfg.seed, model, q);
            let base = matrix.row(m, d);
            let mut results = Vec::new();
            for &v in &variants {
                let style = &matrix.conditions()[v].style_id;
                let mut r = paired_bootstrap(base, matrix.row(m, v), cfg.replicates, seed)?;
                r.model_id = model.clone();
                r.variant = style.clone();
                variant_accs
                    .entry(style.clone())
                    .or_default()
                    .insert(model.clone(), accuracy(matrix.row(m, v))?.acc);
                results.push(r);
            }
            let accs = bootstrap_accuracies(base, cfg.replicates, seed)?;
            variance_ratios.push(RatioStat { jpeg_quality: q, report: variance_ratio(&results, &accs)? });
            default_accs.insert(model.clone(), accuracy(base)?.acc);
            marker_effects.extend(results.into_iter().map(|result| MarkerEffect { jpeg_quality: q, result }));
        }
        mean_abs.push(ShiftStat { jpeg_quality: q, shifts: mean_abs_shift(&default_accs, &variant_accs)? });
    }

    let mut vol = Vec::new();
    for (c, cond) in matrix.conditions().iter().enumerate() {
        let rows: Vec<&[bool]> = (0..models.len()).map(|m| matrix.row(m, c)).collect();
        let report = volatility(&models, &rows, &plan)?;
        let rank_trajectory = (cond.style_id == default_style).then(|| report.split_ranks.clone());
        vol.push(VolatilityStat { style_id: cond.style_id.clone(), jpeg_quality: cond.jpeg_quality, report, rank_trajectory });
    }

    Ok(StatsReport {
        dataset: dataset.into(),
        default_style: default_style.into(),
        config: cfg,
        models,
        cells,
        marker_effects,
        variance_ratios,
        volatility: vol,
        mean_abs_shift: mean_abs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_matrix;
    use crate::model::EvalRecord;

    fn rec(model: &str, style: &str, item: usize, correct: bool) -> EvalRecord {
        EvalRecord {
            model_id: model.into(),
            item_id: format!("i{item:03}"),
            style_id: style.into(),
            jpeg_quality: Compression::Passthrough,
            raw_response: String::new(),
            parsed_answer: None,
            correct,
            latency_ms: 0,
            cached: false,
            prompt_hash: String::new(),
            error: None,
        }
    }

    #[test]
    fn analysis_shapes() {
        let mut records = Vec::new();
        for i in 0..60 {
            records.push(rec("a", "default", i, i % 2 == 0));
            records.push(rec("a", "blue", i, i % 3 == 0));
            records.push(rec("b", "default", i, i % 5 != 0));
            records.push(rec("b", "blue", i, i % 5 != 0));
        }
        let models = vec!["a".to_string(), "b".to_string()];
        let conds = vec![Condition::new("default", Compression::Passthrough), Condition::new("blue", Compression::Passthrough)];
        let items: Vec<String> = (0..60).map(|i| format!("i{i:03}")).collect();
        let m = build_matrix(&records, &models, &conds, &items).unwrap();
        let cfg = AnalysisConfig { replicates: 500, split_size: 20, split_count: 50, seed: 3 };
        let r = analyze(&m, "toy", "default", cfg).unwrap();
        assert_eq!(r.cells.len(), 4);
        assert_eq!(r.marker_effects.len(), 2);
        assert_eq!(r.variance_ratios.len(), 2);
        let b = r.variance_ratios.iter().find(|v| v.report.model_id == "b").unwrap();
        assert_eq!(b.report.r, Some(0.0));
        assert!((r.mean_abs_shift[0].shifts["blue"] - ((0.5 - 20.0 / 60.0) / 2.0)).abs() < 1e-12);
        assert!(r.volatility[0].rank_trajectory.is_some() && r.volatility[1].rank_trajectory.is_none());
        assert_eq!(analyze(&m, "toy", "default", cfg).unwrap(), r);
        let too_big = AnalysisConfig { split_size: 61, ..cfg };
        assert!(matches!(analyze(&m, "toy", "default", too_big), Err(Error::SplitTooLarge { .. })));
    }
}
