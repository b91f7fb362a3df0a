//! Deterministic stand-in for a model endpoint.
//!
//! Correctness for a cell is `u < p(condition)` where `u` is uniform. With
//! probability `shared_difficulty` the draw `u` is the item's own latent
//! difficulty (shared across conditions), otherwise a fresh per-condition
//! draw. Marginal accuracy is exactly `p` either way; sharing only controls
//! how correlated paired conditions are.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Compression, Condition, TaskItem};
use crate::rng;

fn default_shared() -> f64 {
    0.8
}

fn default_base() -> f64 {
    0.5
}

/// An explicit accuracy for one (style, quality) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellAccuracy {
    pub style_id: String,
    pub jpeg_quality: Compression,
    pub p: f64,
}

/// Per-condition accuracy map of a synthetic model.
///
/// `p(style, quality)` is the matching override if any, otherwise
/// `base + style_delta[style] + quality_delta[quality]` clamped to [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticProfile {
    #[serde(default = "default_base")]
    pub base: f64,
    #[serde(default)]
    pub style_delta: BTreeMap<String, f64>,
    #[serde(default)]
    pub quality_delta: BTreeMap<Compression, f64>,
    #[serde(default)]
    pub overrides: Vec<CellAccuracy>,
    #[serde(default = "default_shared")]
    pub shared_difficulty: f64,
    /// Overrides the run seed for this model's draws.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for SyntheticProfile {
    fn default() -> Self {
        SyntheticProfile::constant(default_base())
    }
}

impl SyntheticProfile {
    pub fn constant(p: f64) -> Self {
        SyntheticProfile {
            base: p,
            style_delta: BTreeMap::new(),
            quality_delta: BTreeMap::new(),
            overrides: Vec::new(),
            shared_difficulty: default_shared(),
            seed: None,
        }
    }

    pub fn with_style(mut self, style_id: &str, delta: f64) -> Self {
        self.style_delta.insert(style_id.into(), delta);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::ConfigInvalid(format!("synthetic profile {name} = {v} outside [0, 1]")))
            }
        };
        unit("base", self.base)?;
        unit("shared_difficulty", self.shared_difficulty)?;
        for o in &self.overrides {
            unit(&format!("p for {}@{}", o.style_id, o.jpeg_quality), o.p)?;
        }
        for (k, v) in self.style_delta.iter().map(|(k, v)| (k.clone(), v)).chain(self.quality_delta.iter().map(|(k, v)| (k.to_string(), v))) {
            if !v.is_finite() || v.abs() > 1.0 {
                return Err(Error::ConfigInvalid(format!("synthetic delta for {k} = {v} outside [-1, 1]")));
            }
        }
        Ok(())
    }

    pub fn accuracy(&self, c: &Condition) -> f64 {
        if let Some(o) = self.overrides.iter().find(|o| o.style_id == c.style_id && o.jpeg_quality == c.jpeg_quality) {
            return o.p;
        }
        let p = self.base
            + self.style_delta.get(&c.style_id).copied().unwrap_or(0.0)
            + self.quality_delta.get(&c.jpeg_quality).copied().unwrap_or(0.0);
        p.clamp(0.0, 1.0)
    }
}

fn quality_key(q: Compression) -> u64 {
    match q {
        Compression::Passthrough => 0,
        Compression::Jpeg(q) => u64::from(q),
    }
}

/// Choice id the synthetic model gives for `item` under `c`.
pub fn synthetic_choice(profile: &SyntheticProfile, model_id: &str, item: &TaskItem, c: &Condition, run_seed: u64) -> String {
    let seed = profile.seed.unwrap_or(run_seed);
    let (m, i, s, q) = (
        rng::key_str(model_id),
        rng::key_str(&item.id),
        rng::key_str(&c.style_id),
        quality_key(c.jpeg_quality),
    );
    let shared = rng::unit(seed, "synthetic.share", &[m, i, s, q]) < profile.shared_difficulty;
    let u = if shared {
        rng::unit(seed, "synthetic.difficulty", &[m, i])
    } else {
        rng::unit(seed, "synthetic.cell", &[m, i, s, q])
    };
    if u < profile.accuracy(c) {
        return item.gold_label.clone();
    }
    let wrong: Vec<&String> = item.choice_labels.iter().filter(|l| **l != item.gold_label).collect();
    if wrong.is_empty() {
        return item.gold_label.clone();
    }
    let k = rng::stream(seed, "synthetic.wrong", &[m, i, s, q]).gen_range(0..wrong.len());
    wrong[k].clone()
}
