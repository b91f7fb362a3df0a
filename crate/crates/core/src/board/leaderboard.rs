//! Per-condition leaderboards with "effectively tied" flags.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Condition, CorrectnessMatrix};
use crate::stats::{accuracy, rank_slice, AccuracyEstimate, StatsReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardEntry {
    pub model_id: String,
    pub condition: Condition,
    pub accuracy: AccuracyEstimate,
    pub rank: usize,
    /// Models whose 95% interval overlaps this one's.
    pub tied_with: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_std: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub significant_vs_default: Option<bool>,
}

impl LeaderboardEntry {
    pub fn effectively_tied(&self) -> bool {
        !self.tied_with.is_empty()
    }
}

/// Entries for `condition`, sorted by rank.
///
/// Ties are a heuristic: two models are flagged when their Wilson intervals
/// overlap, not after a formal two-proportion test.
pub fn build_leaderboard(matrix: &CorrectnessMatrix, condition: &Condition) -> Result<Vec<LeaderboardEntry>> {
    let c = matrix
        .condition_index(condition)
        .ok_or_else(|| Error::IncompleteMatrix(format!("no records for condition {condition}")))?;
    if matrix.items().is_empty() || matrix.models().is_empty() {
        return Err(Error::IncompleteMatrix(format!("condition {condition} has no cells")));
    }
    let estimates = (0..matrix.models().len())
        .map(|m| accuracy(matrix.row(m, c)))
        .collect::<Result<Vec<_>>>()?;
    let accs: Vec<f64> = estimates.iter().map(|e| e.acc).collect();
    let ranks = rank_slice(matrix.models(), &accs);
    let mut entries: Vec<LeaderboardEntry> = matrix
        .models()
        .iter()
        .enumerate()
        .map(|(m, id)| LeaderboardEntry {
            model_id: id.clone(),
            condition: condition.clone(),
            accuracy: estimates[m],
            rank: ranks[m],
            tied_with: matrix
                .models()
                .iter()
                .enumerate()
                .filter(|&(o, _)| o != m && estimates[m].overlaps(&estimates[o]))
                .map(|(_, other)| other.clone())
                .collect(),
            rank_std: None,
            significant_vs_default: None,
        })
        .collect();
    entries.sort_by_key(|e| e.rank);
    Ok(entries)
}

/// Fills split rank std and significance against the default style from `stats`.
pub fn annotate(entries: &mut [LeaderboardEntry], stats: &StatsReport) {
    for e in entries.iter_mut() {
        let c = &e.condition;
        e.rank_std = stats
            .volatility
            .iter()
            .find(|v| v.style_id == c.style_id && v.jpeg_quality == c.jpeg_quality)
            .and_then(|v| v.report.models.iter().find(|m| m.model_id == e.model_id))
            .map(|m| m.rank_std);
        e.significant_vs_default = if c.style_id == stats.default_style {
            None
        } else {
            stats
                .marker_effects
                .iter()
                .find(|f| f.jpeg_quality == c.jpeg_quality && f.result.variant == c.style_id && f.result.model_id == e.model_id)
                .map(|f| f.result.significant)
        };
    }
}
