//! Conversion of raw depth and keypoint corpora into visually prompted items.
//!
//! Ingestion is two-stage: a corpus-specific reader produces normalised raw
//! records (JSON lines, one annotation per line), and the builders here turn
//! those into [`TaskItem`]s. Adding a corpus only needs a new reader.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::marker::{encode_png, LabelScheme};
use crate::model::{AnnotatedPoint, EvalDataset, TaskItem, TaskKind, MAX_CANDIDATES};
use crate::rng;
use crate::store::{DirStore, ImageStore};

/// Relative depth gap below which a pair is treated as a tie.
pub const DEFAULT_MARGIN: f64 = 0.05;
pub const DEFAULT_DISTRACTORS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDepthRecord {
    pub source_id: String,
    pub image: String,
    /// `[width, height]` of `image`.
    pub image_size: [u32; 2],
    pub point_a: [f64; 2],
    pub point_b: [f64; 2],
    pub depth_a: f64,
    pub depth_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Keypoint {
    pub name: String,
    pub source: [f64; 2],
    pub target: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCorrespondenceRecord {
    pub source_id: String,
    pub source_image: String,
    pub source_size: [u32; 2],
    pub target_image: String,
    pub target_size: [u32; 2],
    pub keypoints: Vec<Keypoint>,
}

fn in_bounds(p: [f64; 2], size: [u32; 2]) -> bool {
    p[0] >= 0.0 && p[1] >= 0.0 && p[0] < f64::from(size[0]) && p[1] < f64::from(size[1])
}

impl RawDepthRecord {
    pub fn check(&self) -> std::result::Result<(), String> {
        if !in_bounds(self.point_a, self.image_size) || !in_bounds(self.point_b, self.image_size) {
            return Err("point outside image".into());
        }
        for d in [self.depth_a, self.depth_b] {
            if !(d.is_finite() && d > 0.0) {
                return Err(format!("depth {d} is not finite and positive"));
            }
        }
        Ok(())
    }
}

impl RawCorrespondenceRecord {
    pub fn check(&self) -> std::result::Result<(), String> {
        if self.keypoints.len() < 2 {
            return Err(format!("{} keypoint(s), need at least 2", self.keypoints.len()));
        }
        for k in &self.keypoints {
            if !in_bounds(k.source, self.source_size) || !in_bounds(k.target, self.target_size) {
                return Err(format!("keypoint {} outside image", k.name));
            }
        }
        Ok(())
    }
}

/// Why a raw record produced no item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejected {
    pub source_id: String,
    pub reason: String,
}

/// A malformed corpus entry that was skipped during import.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipEntry {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Import<T> {
    pub records: Vec<T>,
    pub skipped: Vec<SkipEntry>,
}

/// Reader for one corpus layout.
pub trait CorpusReader {
    type Record;
    fn read(&self, path: &Path) -> Result<Import<Self::Record>>;
}

/// Reader for the normalised JSON-lines layout.
#[derive(Debug, Clone, Copy, Default)]
pub struct JsonLines;

fn read_jsonl<T: DeserializeOwned>(path: &Path, check: impl Fn(&T) -> std::result::Result<(), String>) -> Result<Import<T>> {
    let text = fs::read_to_string(path).map_err(|e| Error::UnreadableSource {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str::<T>(line)
            .map_err(|e| e.to_string())
            .and_then(|r| check(&r).map(|_| r));
        match parsed {
            Ok(r) => records.push(r),
            Err(reason) => skipped.push(SkipEntry { line: n + 1, reason }),
        }
    }
    Ok(Import { records, skipped })
}

pub fn import_depth_corpus(path: &Path) -> Result<Import<RawDepthRecord>> {
    read_jsonl(path, RawDepthRecord::check)
}

pub fn import_correspondence_corpus(path: &Path) -> Result<Import<RawCorrespondenceRecord>> {
    read_jsonl(path, RawCorrespondenceRecord::check)
}

impl CorpusReader for JsonLines {
    type Record = RawDepthRecord;
    fn read(&self, path: &Path) -> Result<Import<RawDepthRecord>> {
        import_depth_corpus(path)
    }
}

fn letters(n: usize) -> Vec<String> {
    (0..n).map(|k| LabelScheme::Letters.candidate_text(k)).collect()
}

/// Two-point "which is closer" item; the gold point has the smaller depth.
pub fn build_rd_item(r: &RawDepthRecord, margin: f64) -> std::result::Result<TaskItem, Rejected> {
    let reject = |reason: String| Rejected { source_id: r.source_id.clone(), reason };
    r.check().map_err(reject)?;
    let gap = (r.depth_a - r.depth_b).abs() / r.depth_a.max(r.depth_b);
    if r.depth_a == r.depth_b || gap < margin {
        return Err(reject("ambiguous depth".into()));
    }
    let labels = letters(2);
    let gold = if r.depth_a < r.depth_b { &labels[0] } else { &labels[1] };
    let point = |p: [f64; 2], label: &str| AnnotatedPoint {
        image_index: 0,
        x: p[0],
        y: p[1],
        label: label.into(),
        is_reference: false,
    };
    Ok(TaskItem {
        id: r.source_id.clone(),
        task_kind: TaskKind::RelativeDepth,
        images: vec![r.image.clone()],
        points: vec![point(r.point_a, &labels[0]), point(r.point_b, &labels[1])],
        gold_label: gold.clone(),
        choice_labels: labels,
    })
}

/// Reference keypoint on the source image; its true match plus up to
/// `n_distractors` other keypoints' targets as candidates, shuffled by `seed`.
pub fn build_sc_item(
    r: &RawCorrespondenceRecord,
    ref_index: usize,
    n_distractors: usize,
    seed: u64,
) -> std::result::Result<TaskItem, Rejected> {
    let reject = |reason: &str| Rejected { source_id: r.source_id.clone(), reason: reason.into() };
    if ref_index >= r.keypoints.len() {
        return Err(reject("reference index out of range"));
    }
    if n_distractors == 0 || n_distractors + 1 > MAX_CANDIDATES {
        return Err(reject("distractor count outside 1..=7"));
    }
    let truth = &r.keypoints[ref_index];
    if !in_bounds(truth.source, r.source_size) || !in_bounds(truth.target, r.target_size) {
        return Err(reject("keypoint outside image"));
    }
    let mut pool: Vec<[f64; 2]> = Vec::new();
    for (k, kp) in r.keypoints.iter().enumerate() {
        if k != ref_index && kp.target != truth.target && !pool.contains(&kp.target) && in_bounds(kp.target, r.target_size) {
            pool.push(kp.target);
        }
    }
    if pool.is_empty() {
        return Err(reject("insufficient keypoints"));
    }
    let mut g = rng::stream(seed, "forge.sc", &[rng::key_str(&r.source_id), ref_index as u64]);
    pool.shuffle(&mut g);
    pool.truncate(n_distractors);
    let mut candidates: Vec<([f64; 2], bool)> = pool.into_iter().map(|p| (p, false)).collect();
    candidates.push((truth.target, true));
    candidates.shuffle(&mut g);

    let labels = letters(candidates.len());
    let mut points = vec![AnnotatedPoint {
        image_index: 0,
        x: truth.source[0],
        y: truth.source[1],
        label: LabelScheme::Letters.reference_text().into(),
        is_reference: true,
    }];
    let mut gold = String::new();
    for ((p, is_truth), label) in candidates.iter().zip(&labels) {
        if *is_truth {
            gold = label.clone();
        }
        points.push(AnnotatedPoint {
            image_index: 1,
            x: p[0],
            y: p[1],
            label: label.clone(),
            is_reference: false,
        });
    }
    Ok(TaskItem {
        id: format!("{}#{}", r.source_id, ref_index),
        task_kind: TaskKind::SemanticCorrespondence,
        images: vec![r.source_image.clone(), r.target_image.clone()],
        points,
        gold_label: gold,
        choice_labels: labels,
    })
}

/// Items plus everything that was filtered out on the way.
#[derive(Debug, Clone, PartialEq)]
pub struct ForgeOutcome {
    pub dataset: EvalDataset,
    pub rejected: Vec<Rejected>,
}

fn split_outcomes(name: &str, results: Vec<std::result::Result<TaskItem, Rejected>>) -> ForgeOutcome {
    let mut items = Vec::new();
    let mut rejected = Vec::new();
    for r in results {
        match r {
            Ok(i) => items.push(i),
            Err(e) => rejected.push(e),
        }
    }
    ForgeOutcome { dataset: EvalDataset { name: name.into(), items }, rejected }
}

pub fn forge_rd(name: &str, records: &[RawDepthRecord], margin: f64) -> ForgeOutcome {
    let results = records.par_iter().map(|r| build_rd_item(r, margin)).collect();
    split_outcomes(name, results)
}

/// One item per record; the reference keypoint is drawn uniformly with `seed`.
pub fn forge_sc(name: &str, records: &[RawCorrespondenceRecord], n_distractors: usize, seed: u64) -> ForgeOutcome {
    let results = records
        .par_iter()
        .map(|r| {
            if r.keypoints.is_empty() {
                return Err(Rejected { source_id: r.source_id.clone(), reason: "insufficient keypoints".into() });
            }
            let mut g = rng::stream(seed, "forge.ref", &[rng::key_str(&r.source_id)]);
            let ref_index = g.gen_range(0..r.keypoints.len() as u64) as usize;
            build_sc_item(r, ref_index, n_distractors, seed)
        })
        .collect();
    split_outcomes(name, results)
}

/// Copies every referenced image as lossless PNG into `out/images/` and
/// writes `out/manifest.json` pointing at the copies.
pub fn export_dataset(dataset: &EvalDataset, source_root: &Path, out: &Path) -> Result<PathBuf> {
    let images_dir = out.join("images");
    fs::create_dir_all(&images_dir).map_err(|e| Error::unwritable(&images_dir, e))?;
    let store = DirStore::new(source_root);
    let mut renamed: BTreeMap<String, String> = BTreeMap::new();
    for item in &dataset.items {
        for img in &item.images {
            if !renamed.contains_key(img) {
                let stem: String = img
                    .chars()
                    .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
                    .collect();
                renamed.insert(img.clone(), format!("images/{stem}.png"));
            }
        }
    }
    renamed.par_iter().try_for_each(|(src, dst)| -> Result<()> {
        let png = encode_png(&store.load(src)?)?;
        let path = out.join(dst);
        fs::write(&path, png).map_err(|e| Error::unwritable(&path, e))
    })?;
    let mut copy = dataset.clone();
    for item in &mut copy.items {
        for img in &mut item.images {
            *img = renamed[img.as_str()].clone();
        }
    }
    let manifest = out.join("manifest.json");
    copy.save(&manifest)?;
    Ok(manifest)
}
