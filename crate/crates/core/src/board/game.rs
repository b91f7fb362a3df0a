//! Exhaustive search for evaluation conditions that move a model's rank.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Condition, CorrectnessMatrix};
use crate::stats::{rank_slice, SplitPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Best achievable position (smallest rank number).
    MaximizeRank,
    /// Worst achievable position (largest rank number).
    MinimizeRank,
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::MaximizeRank => "maximize_rank",
            Objective::MinimizeRank => "minimize_rank",
        })
    }
}

/// Conditions to try, optionally crossed with every split of a plan.
///
/// Split selection is off unless `adversarial_splits` is provided.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    pub conditions: Vec<Condition>,
    pub adversarial_splits: Option<SplitPlan>,
}

impl SearchSpace {
    pub fn conditions(conditions: Vec<Condition>) -> Self {
        SearchSpace { conditions, adversarial_splits: None }
    }

    pub fn describe(&self) -> String {
        let mut s = format!("{} condition(s)", self.conditions.len());
        if let Some(p) = &self.adversarial_splits {
            s.push_str(&format!(" x {} adversarial split(s) of {} items", p.split_count, p.split_size));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManipulationFinding {
    pub target: String,
    pub objective: Objective,
    pub condition: Condition,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split_index: Option<usize>,
    /// Rank under the first condition of the search space on the full pool.
    pub baseline_condition: Condition,
    pub baseline_rank: usize,
    pub achieved_rank: usize,
    pub achieved_accuracy: f64,
    pub evaluated: usize,
    pub search_space: String,
}

/// Rank of `target` under `condition`, restricted to `subset` if given.
pub fn rank_under(matrix: &CorrectnessMatrix, target: &str, condition: &Condition, subset: Option<&[usize]>) -> Result<(usize, f64)> {
    let t = matrix.model_index(target).ok_or_else(|| Error::UnknownModel(target.into()))?;
    let c = matrix
        .condition_index(condition)
        .ok_or_else(|| Error::IncompleteMatrix(format!("no records for condition {condition}")))?;
    let accs: Vec<f64> = (0..matrix.models().len())
        .map(|m| {
            let row = matrix.row(m, c);
            match subset {
                Some(idx) => idx.iter().filter(|&&i| row[i]).count() as f64 / idx.len().max(1) as f64,
                None => row.iter().filter(|&&b| b).count() as f64 / row.len().max(1) as f64,
            }
        })
        .collect();
    Ok((rank_slice(matrix.models(), &accs)[t], accs[t]))
}

/// Evaluates every point of `space` and returns the best one for
/// `objective`; ties go to the first point in enumeration order.
pub fn manipulation_search(
    matrix: &CorrectnessMatrix,
    target: &str,
    objective: Objective,
    space: &SearchSpace,
) -> Result<ManipulationFinding> {
    let Some(baseline_condition) = space.conditions.first() else {
        return Err(Error::EmptySearchSpace);
    };
    if space.adversarial_splits.as_ref().is_some_and(|p| p.indices.is_empty()) {
        return Err(Error::EmptySearchSpace);
    }
    let (baseline_rank, _) = rank_under(matrix, target, baseline_condition, None)?;
    let mut points: Vec<(usize, f64, &Condition, Option<usize>)> = Vec::new();
    for c in &space.conditions {
        match &space.adversarial_splits {
            None => {
                let (rank, acc) = rank_under(matrix, target, c, None)?;
                points.push((rank, acc, c, None));
            }
            Some(plan) => {
                for (s, idx) in plan.indices.iter().enumerate() {
                    let (rank, acc) = rank_under(matrix, target, c, Some(idx))?;
                    points.push((rank, acc, c, Some(s)));
                }
            }
        }
    }
    let evaluated = points.len();
    let mut best = points[0];
    for &p in &points[1..] {
        let better = match objective {
            Objective::MaximizeRank => p.0 < best.0,
            Objective::MinimizeRank => p.0 > best.0,
        };
        if better {
            best = p;
        }
    }
    let (achieved_rank, achieved_accuracy, condition, split_index) = best;
    Ok(ManipulationFinding {
        target: target.into(),
        objective,
        condition: condition.clone(),
        split_index,
        baseline_condition: baseline_condition.clone(),
        baseline_rank,
        achieved_rank,
        achieved_accuracy,
        evaluated,
        search_space: space.describe(),
    })
}
