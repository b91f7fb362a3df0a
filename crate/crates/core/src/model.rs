//! Shared domain types: task items, datasets, evaluation records and the
//! correctness matrix that every statistic is computed from.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::store::ImageStore;

/// Smallest and largest number of candidate points a correspondence item may carry.
pub const MIN_CANDIDATES: usize = 2;
pub const MAX_CANDIDATES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    RelativeDepth,
    SemanticCorrespondence,
}

impl TaskKind {
    pub fn image_count(self) -> usize {
        match self {
            TaskKind::RelativeDepth => 1,
            TaskKind::SemanticCorrespondence => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotatedPoint {
    pub image_index: usize,
    pub x: f64,
    pub y: f64,
    pub label: String,
    #[serde(default)]
    pub is_reference: bool,
}

/// One visually prompted multiple-choice question over clean images.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskItem {
    pub id: String,
    pub task_kind: TaskKind,
    pub images: Vec<String>,
    pub points: Vec<AnnotatedPoint>,
    pub gold_label: String,
    pub choice_labels: Vec<String>,
}

impl TaskItem {
    /// Non-reference points in declaration order.
    pub fn candidates(&self) -> impl Iterator<Item = &AnnotatedPoint> {
        self.points.iter().filter(|p| !p.is_reference)
    }

    pub fn reference(&self) -> Option<&AnnotatedPoint> {
        self.points.iter().find(|p| p.is_reference)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalDataset {
    pub name: String,
    pub items: Vec<TaskItem>,
}

impl EvalDataset {
    pub fn pool_size(&self) -> usize {
        self.items.len()
    }

    pub fn item_ids(&self) -> Vec<String> {
        self.items.iter().map(|i| i.id.clone()).collect()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::UnreadableSource {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        serde_json::from_str(&text).map_err(|e| Error::UnreadableSource {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::unwritable(path, e))
    }
}

/// A dataset invariant that does not hold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub item_id: Option<String>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.item_id {
            Some(id) => write!(f, "item {id}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// Structural checks that need no pixels.
pub fn validate_dataset(d: &EvalDataset) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for item in &d.items {
        if !seen.insert(item.id.as_str()) {
            out.push(Violation {
                item_id: Some(item.id.clone()),
                message: "duplicate item id".into(),
            });
        }
        for message in item_violations(item) {
            out.push(Violation {
                item_id: Some(item.id.clone()),
                message,
            });
        }
    }
    out
}

/// [`validate_dataset`] plus image loadability and coordinate bounds.
pub fn validate_dataset_with_images(d: &EvalDataset, store: &dyn ImageStore) -> Vec<Violation> {
    let mut out = validate_dataset(d);
    let mut dims: HashMap<&str, Option<(u32, u32)>> = HashMap::new();
    for item in &d.items {
        for p in &item.points {
            let Some(path) = item.images.get(p.image_index) else {
                continue;
            };
            let size = *dims
                .entry(path.as_str())
                .or_insert_with(|| store.dimensions(path).ok());
            match size {
                None => out.push(Violation {
                    item_id: Some(item.id.clone()),
                    message: format!("image {path} cannot be loaded"),
                }),
                Some((w, h)) => {
                    if p.x >= f64::from(w) || p.y >= f64::from(h) {
                        out.push(Violation {
                            item_id: Some(item.id.clone()),
                            message: format!(
                                "point {} at ({}, {}) outside {w}x{h} image {path}",
                                p.label, p.x, p.y
                            ),
                        });
                    }
                }
            }
        }
    }
    out
}

fn item_violations(item: &TaskItem) -> Vec<String> {
    let mut v = Vec::new();
    let kind = item.task_kind;
    if item.images.len() != kind.image_count() {
        v.push(format!(
            "{kind:?} needs {} image(s), found {}",
            kind.image_count(),
            item.images.len()
        ));
    }
    for p in &item.points {
        if p.label.is_empty() {
            v.push("point with empty label".into());
        }
        if !(p.x >= 0.0 && p.y >= 0.0) || !p.x.is_finite() || !p.y.is_finite() {
            v.push(format!("point {} has negative or non-finite coordinates", p.label));
        }
        if p.image_index >= item.images.len() {
            v.push(format!("point {} refers to missing image {}", p.label, p.image_index));
        }
    }
    let candidates: Vec<&AnnotatedPoint> = item.candidates().collect();
    let labels: BTreeSet<&str> = candidates.iter().map(|p| p.label.as_str()).collect();
    if labels.len() != candidates.len() {
        v.push("candidate labels are not distinct".into());
    }
    match kind {
        TaskKind::RelativeDepth => {
            if item.points.len() != 2 {
                v.push(format!("relative depth needs exactly 2 points, found {}", item.points.len()));
            }
            if item.points.iter().any(|p| p.is_reference) {
                v.push("relative depth items carry no reference point".into());
            }
        }
        TaskKind::SemanticCorrespondence => {
            let refs: Vec<&AnnotatedPoint> = item.points.iter().filter(|p| p.is_reference).collect();
            if refs.len() != 1 {
                v.push(format!("correspondence needs exactly 1 reference point, found {}", refs.len()));
            }
            if refs.iter().any(|p| p.image_index != 0) {
                v.push("reference point must be on image 0".into());
            }
            if candidates.iter().any(|p| p.image_index != 1) {
                v.push("candidate points must be on image 1".into());
            }
            if !(MIN_CANDIDATES..=MAX_CANDIDATES).contains(&candidates.len()) {
                v.push(format!(
                    "correspondence needs {MIN_CANDIDATES}..={MAX_CANDIDATES} candidates, found {}",
                    candidates.len()
                ));
            }
        }
    }
    let choices: BTreeSet<&str> = item.choice_labels.iter().map(String::as_str).collect();
    if choices.len() != item.choice_labels.len() {
        v.push("choice labels are not distinct".into());
    }
    if !choices.contains(item.gold_label.as_str()) {
        v.push(format!("gold label {:?} is not a choice", item.gold_label));
    }
    if labels != choices {
        v.push("candidate point labels do not match choice labels".into());
    }
    v
}

/// Re-encoding applied to a stimulus before inference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Compression {
    /// Bytes are forwarded untouched (stand-in for a provider's own pipeline).
    Passthrough,
    /// Baseline JPEG at the given quality, 1..=100.
    Jpeg(u8),
}

impl Compression {
    /// Passthrough followed by JPEG 70, 80 and 90.
    pub fn standard_levels() -> Vec<Compression> {
        vec![
            Compression::Passthrough,
            Compression::Jpeg(70),
            Compression::Jpeg(80),
            Compression::Jpeg(90),
        ]
    }

    pub fn jpeg(quality: u8) -> Result<Self> {
        if (1..=100).contains(&quality) {
            Ok(Compression::Jpeg(quality))
        } else {
            Err(Error::ConfigInvalid(format!("JPEG quality {quality} outside 1..=100")))
        }
    }

    /// Short tag used in file names.
    pub fn suffix(self) -> String {
        match self {
            Compression::Passthrough => "passthrough".into(),
            Compression::Jpeg(q) => format!("q{q}"),
        }
    }
}

impl fmt::Display for Compression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.suffix())
    }
}

impl FromStr for Compression {
    type Err = Error;

    /// Accepts `default`, `passthrough`, `q70`, `70` and `custom:70`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "default" || s == "passthrough" {
            return Ok(Compression::Passthrough);
        }
        let digits = s
            .strip_prefix("custom:")
            .or_else(|| s.strip_prefix('q'))
            .unwrap_or(s);
        let q: u8 = digits
            .parse()
            .map_err(|_| Error::ConfigInvalid(format!("unrecognised compression setting {s:?}")))?;
        Compression::jpeg(q)
    }
}

impl Serialize for Compression {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.suffix())
    }
}

impl<'de> Deserialize<'de> for Compression {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A (marker style, compression) pair under which every item is evaluated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Condition {
    pub style_id: String,
    pub jpeg_quality: Compression,
}

impl Condition {
    pub fn new(style_id: impl Into<String>, jpeg_quality: Compression) -> Self {
        Condition {
            style_id: style_id.into(),
            jpeg_quality,
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.style_id, self.jpeg_quality)
    }
}

/// Outcome of one inference call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalRecord {
    pub model_id: String,
    pub item_id: String,
    pub style_id: String,
    pub jpeg_quality: Compression,
    pub raw_response: String,
    /// `None` means the response could not be parsed.
    pub parsed_answer: Option<String>,
    pub correct: bool,
    pub latency_ms: u64,
    pub cached: bool,
    #[serde(default)]
    pub prompt_hash: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl EvalRecord {
    pub fn condition(&self) -> Condition {
        Condition::new(self.style_id.clone(), self.jpeg_quality)
    }
}

pub fn read_records_jsonl(path: &Path) -> Result<Vec<EvalRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::UnreadableSource {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(n, line)| {
            serde_json::from_str(line).map_err(|e| Error::UnreadableSource {
                path: path.to_path_buf(),
                reason: format!("line {}: {e}", n + 1),
            })
        })
        .collect()
}

pub fn write_records_jsonl(path: &Path, records: &[EvalRecord]) -> Result<()> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::unwritable(path, e))
}

/// Dense model × condition × item table of correctness bits.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectnessMatrix {
    models: Vec<String>,
    conditions: Vec<Condition>,
    items: Vec<String>,
    bits: Vec<bool>,
}

impl CorrectnessMatrix {
    pub fn models(&self) -> &[String] {
        &self.models
    }

    pub fn conditions(&self) -> &[Condition] {
        &self.conditions
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn model_index(&self, model: &str) -> Option<usize> {
        self.models.iter().position(|m| m == model)
    }

    pub fn condition_index(&self, c: &Condition) -> Option<usize> {
        self.conditions.iter().position(|x| x == c)
    }

    /// Correctness over all items for one (model, condition).
    pub fn row(&self, model: usize, condition: usize) -> &[bool] {
        let n = self.items.len();
        let start = (model * self.conditions.len() + condition) * n;
        &self.bits[start..start + n]
    }

    pub fn get(&self, model: usize, condition: usize, item: usize) -> bool {
        self.row(model, condition)[item]
    }

    /// Every cell as a minimal record; inverse of [`build_matrix`].
    pub fn to_records(&self) -> Vec<EvalRecord> {
        let mut out = Vec::with_capacity(self.bits.len());
        for (mi, m) in self.models.iter().enumerate() {
            for (ci, c) in self.conditions.iter().enumerate() {
                for (ii, item) in self.items.iter().enumerate() {
                    let correct = self.get(mi, ci, ii);
                    out.push(EvalRecord {
                        model_id: m.clone(),
                        item_id: item.clone(),
                        style_id: c.style_id.clone(),
                        jpeg_quality: c.jpeg_quality,
                        raw_response: String::new(),
                        parsed_answer: None,
                        correct,
                        latency_ms: 0,
                        cached: false,
                        prompt_hash: String::new(),
                        error: None,
                    });
                }
            }
        }
        out
    }
}

/// Builds the matrix, requiring exactly one record per declared cell.
///
/// Records for models, conditions or items outside the declared axes are ignored.
pub fn build_matrix(
    records: &[EvalRecord],
    models: &[String],
    conditions: &[Condition],
    items: &[String],
) -> Result<CorrectnessMatrix> {
    let mi: HashMap<&str, usize> = models.iter().enumerate().map(|(i, m)| (m.as_str(), i)).collect();
    let ci: HashMap<&Condition, usize> = conditions.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let ii: HashMap<&str, usize> = items.iter().enumerate().map(|(i, x)| (x.as_str(), i)).collect();
    let total = models.len() * conditions.len() * items.len();
    let mut bits = vec![false; total];
    let mut filled = vec![false; total];
    for r in records {
        let cond = r.condition();
        let (Some(&m), Some(&c), Some(&i)) =
            (mi.get(r.model_id.as_str()), ci.get(&cond), ii.get(r.item_id.as_str()))
        else {
            continue;
        };
        let k = (m * conditions.len() + c) * items.len() + i;
        if filled[k] {
            return Err(Error::DuplicateCell {
                model: r.model_id.clone(),
                condition: cond.to_string(),
                item: r.item_id.clone(),
            });
        }
        filled[k] = true;
        bits[k] = r.correct;
    }
    if let Some(k) = filled.iter().position(|f| !f) {
        let i = k % items.len();
        let c = (k / items.len()) % conditions.len();
        let m = k / (items.len() * conditions.len());
        return Err(Error::MissingCell {
            model: models[m].clone(),
            condition: conditions[c].to_string(),
            item: items[i].clone(),
        });
    }
    Ok(CorrectnessMatrix {
        models: models.to_vec(),
        conditions: conditions.to_vec(),
        items: items.to_vec(),
        bits,
    })
}

/// Matrix over every model, condition and item present in `records`.
///
/// Models and items are sorted; conditions are sorted with `default_style`
/// conditions first.
pub fn matrix_from_records(records: &[EvalRecord], default_style: &str) -> Result<CorrectnessMatrix> {
    let models: BTreeSet<&str> = records.iter().map(|r| r.model_id.as_str()).collect();
    let items: BTreeSet<&str> = records.iter().map(|r| r.item_id.as_str()).collect();
    let mut conditions: Vec<Condition> = records
        .iter()
        .map(EvalRecord::condition)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    conditions.sort_by_key(|c| c.style_id != default_style);
    build_matrix(
        records,
        &models.into_iter().map(str::to_owned).collect::<Vec<_>>(),
        &conditions,
        &items.into_iter().map(str::to_owned).collect::<Vec<_>>(),
    )
}
