//! Declarative run configuration and the end-to-end driver.
//!
//! A run is forge (optional), render, compress, infer, stats, report. The
//! whole configuration is validated before anything is written. Relative
//! paths in a config file resolve against the file's directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::board::{
    all_leaderboards, file_entry, manipulation_search, render_reports, FileEntry, ManipulationFinding, Objective,
    SearchSpace,
};
use crate::error::{Error, Result};
use crate::forge::{self, DEFAULT_DISTRACTORS, DEFAULT_MARGIN};
use crate::infer::{run_sweep, stimuli, Cache, ModelEndpoint, SweepPlan, SweepStats, Templates};
use crate::marker::{canonical_style_set, StyleSet};
use crate::model::{
    matrix_from_records, validate_dataset_with_images, write_records_jsonl, Compression, Condition, EvalDataset,
    EvalRecord, TaskKind, Violation,
};
use crate::rng;
use crate::stats::{analyze, make_splits, AnalysisConfig, StatsReport, DEFAULT_REPLICATES};
use crate::store::{DirStore, ImageStore};

pub const SCHEMA_VERSION: u32 = 1;

/// `"canonical"` or a path to a style-set JSON file.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum StyleSource {
    #[default]
    Canonical,
    File(PathBuf),
}

impl Serialize for StyleSource {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            StyleSource::Canonical => s.serialize_str("canonical"),
            StyleSource::File(p) => s.serialize_str(&p.to_string_lossy()),
        }
    }
}

impl<'de> Deserialize<'de> for StyleSource {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(if s == "canonical" { StyleSource::Canonical } else { StyleSource::File(s.into()) })
    }
}


/// Builds the dataset from a raw corpus instead of reading a manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForgeConfig {
    pub task_kind: TaskKind,
    /// JSON-lines corpus of raw records.
    pub corpus: PathBuf,
    /// Directory the corpus's image paths are relative to.
    pub image_root: PathBuf,
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default = "default_margin")]
    pub margin: f64,
    #[serde(default = "default_distractors")]
    pub distractors: usize,
}

fn default_name() -> String {
    "forged".into()
}

fn default_margin() -> f64 {
    DEFAULT_MARGIN
}

fn default_distractors() -> usize {
    DEFAULT_DISTRACTORS
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    pub size: usize,
    pub count: usize,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig { size: 100, count: 1000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BootstrapConfig {
    pub replicates: usize,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig { replicates: DEFAULT_REPLICATES }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameConfig {
    pub target: String,
    pub objective: Objective,
    /// Also search over the run's split plan. Off by default: picking splits
    /// to move a rank is deliberate benchmark gaming.
    #[serde(default)]
    pub adversarial_splits: bool,
}

fn default_compression() -> Vec<Compression> {
    Compression::standard_levels()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forge: Option<ForgeConfig>,
    #[serde(default)]
    pub styles: StyleSource,
    #[serde(default = "default_compression")]
    pub compression: Vec<Compression>,
    pub endpoints: Vec<ModelEndpoint>,
    #[serde(default)]
    pub splits: SplitConfig,
    #[serde(default)]
    pub bootstrap: BootstrapConfig,
    pub output_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub templates: Option<Templates>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game: Option<GameConfig>,
}

/// A parsed config plus the directory its relative paths resolve against.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub base_dir: PathBuf,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::ConfigInvalid(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<LoadedConfig> {
        let text = fs::read_to_string(path).map_err(|e| Error::ConfigInvalid(format!("{}: {e}", path.display())))?;
        Ok(LoadedConfig {
            config: RunConfig::from_json(&text)?,
            base_dir: path.parent().map(Path::to_path_buf).unwrap_or_default(),
        })
    }
}

impl LoadedConfig {
    pub fn new(config: RunConfig, base_dir: impl Into<PathBuf>) -> Self {
        LoadedConfig { config, base_dir: base_dir.into() }
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(&self.config.output_dir)
    }

    /// Checks everything that does not need the dataset's pixels.
    pub fn validate(&self) -> Result<()> {
        let c = &self.config;
        if c.schema_version != SCHEMA_VERSION {
            return Err(Error::ConfigInvalid(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                c.schema_version
            )));
        }
        match (&c.dataset, &c.forge) {
            (Some(_), Some(_)) => return Err(Error::ConfigInvalid("set either dataset or forge, not both".into())),
            (None, None) => return Err(Error::ConfigInvalid("one of dataset or forge is required".into())),
            (Some(d), None) => require_file(&self.resolve(d), "dataset manifest")?,
            (None, Some(f)) => {
                require_file(&self.resolve(&f.corpus), "forge corpus")?;
                if !self.resolve(&f.image_root).is_dir() {
                    return Err(Error::ConfigInvalid(format!("forge image_root {} is not a directory", f.image_root.display())));
                }
                if !(0.0..1.0).contains(&f.margin) {
                    return Err(Error::ConfigInvalid(format!("forge margin {} outside [0, 1)", f.margin)));
                }
            }
        }
        if let StyleSource::File(p) = &c.styles {
            require_file(&self.resolve(p), "style set")?;
        }
        if c.compression.is_empty() {
            return Err(Error::ConfigInvalid("compression list is empty".into()));
        }
        let mut seen = c.compression.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != c.compression.len() {
            return Err(Error::ConfigInvalid("duplicate compression settings".into()));
        }
        if c.endpoints.is_empty() {
            return Err(Error::ConfigInvalid("no endpoints configured".into()));
        }
        let mut ids = std::collections::BTreeSet::new();
        for e in &c.endpoints {
            e.validate()?;
            if !ids.insert(e.model_id.as_str()) {
                return Err(Error::ConfigInvalid(format!("duplicate model_id {}", e.model_id)));
            }
        }
        if c.splits.size == 0 || c.splits.count == 0 {
            return Err(Error::ConfigInvalid("splits.size and splits.count must be positive".into()));
        }
        if c.bootstrap.replicates == 0 {
            return Err(Error::ConfigInvalid("bootstrap.replicates must be positive".into()));
        }
        if let Some(g) = &c.game {
            if !ids.contains(g.target.as_str()) {
                return Err(Error::UnknownModel(g.target.clone()));
            }
        }
        Ok(())
    }

    pub fn style_set(&self) -> Result<StyleSet> {
        match &self.config.styles {
            StyleSource::Canonical => Ok(canonical_style_set()),
            StyleSource::File(p) => StyleSet::load(&self.resolve(p)),
        }
    }
}

fn require_file(p: &Path, what: &str) -> Result<()> {
    if p.is_file() {
        Ok(())
    } else {
        Err(Error::ConfigInvalid(format!("{what} {} does not exist", p.display())))
    }
}

/// Dataset ready for a sweep, with invalid items set aside.
pub struct PreparedDataset {
    pub dataset: EvalDataset,
    pub store: Box<dyn ImageStore>,
    pub excluded: Vec<Violation>,
    /// Forged datasets are exported into the run directory.
    pub forged_from: Option<PathBuf>,
    /// SHA-256 of the manifest bytes (or of the forged dataset's JSON).
    pub content_hash: String,
}

/// Loads or forges the dataset and drops items that fail validation.
pub fn prepare_dataset(cfg: &LoadedConfig) -> Result<PreparedDataset> {
    let c = &cfg.config;
    let (dataset, store, forged_from, content_hash): (EvalDataset, Box<dyn ImageStore>, _, String) =
        if let Some(d) = &c.dataset {
            let path = cfg.resolve(d);
            let bytes = fs::read(&path).map_err(|e| Error::UnreadableSource { path: path.clone(), reason: e.to_string() })?;
            let dataset = EvalDataset::load(&path)?;
            (dataset, Box::new(DirStore::for_manifest(&path)), None, hex::encode(Sha256::digest(&bytes)))
        } else {
            let f = c.forge.as_ref().expect("validated: dataset or forge");
            let corpus = cfg.resolve(&f.corpus);
            let outcome = match f.task_kind {
                TaskKind::RelativeDepth => {
                    let imp = forge::import_depth_corpus(&corpus)?;
                    log_skips(&imp.skipped);
                    forge::forge_rd(&f.name, &imp.records, f.margin)
                }
                TaskKind::SemanticCorrespondence => {
                    let imp = forge::import_correspondence_corpus(&corpus)?;
                    log_skips(&imp.skipped);
                    forge::forge_sc(&f.name, &imp.records, f.distractors, c.seed)
                }
            };
            for r in &outcome.rejected {
                log::info!("forge rejected {}: {}", r.source_id, r.reason);
            }
            let root = cfg.resolve(&f.image_root);
            let hash = hex::encode(Sha256::digest(serde_json::to_vec(&outcome.dataset)?));
            (outcome.dataset, Box::new(DirStore::new(root.clone())), Some(root), hash)
        };
    let violations = validate_dataset_with_images(&dataset, store.as_ref());
    let bad: std::collections::BTreeSet<&str> = violations.iter().filter_map(|v| v.item_id.as_deref()).collect();
    if violations.iter().any(|v| v.item_id.is_none()) {
        return Err(Error::ConfigInvalid(format!("dataset: {}", violations[0])));
    }
    let kept = EvalDataset {
        name: dataset.name.clone(),
        items: dataset.items.iter().filter(|i| !bad.contains(i.id.as_str())).cloned().collect(),
    };
    if kept.items.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(PreparedDataset { dataset: kept, store, excluded: violations, forged_from, content_hash })
}

fn log_skips(skipped: &[forge::SkipEntry]) {
    for s in skipped {
        log::warn!("corpus line {} skipped: {}", s.line, s.reason);
    }
}

/// Config hash: SHA-256 over the config as written plus the dataset content.
pub fn config_hash(config: &RunConfig, dataset_hash: &str) -> Result<String> {
    let mut scrubbed = config.clone();
    scrubbed.output_dir = PathBuf::new();
    scrubbed.cache_dir = None;
    let doc = serde_json::json!({ "config": scrubbed, "dataset_sha256": dataset_hash });
    Ok(hex::encode(Sha256::digest(serde_json::to_vec(&doc)?)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub tool_version: String,
    pub config: RunConfig,
    pub dataset_sha256: String,
    pub config_hash: String,
    pub seeds: BTreeMap<String, u64>,
    pub items_used: usize,
    pub items_excluded: usize,
}

/// What a completed run produced.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub run_dir: PathBuf,
    pub records: Vec<EvalRecord>,
    pub sweep: SweepStats,
    pub stats: StatsReport,
    pub finding: Option<ManipulationFinding>,
    pub manifest: Vec<FileEntry>,
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::unwritable(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::unwritable(path, e))
}

fn json_pretty<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(v)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn collect_files(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let mut entries: Vec<_> = fs::read_dir(dir)?.collect::<std::io::Result<Vec<_>>>()?;
    entries.sort_by_key(|e| e.file_name());
    for e in entries {
        let p = e.path();
        if p.is_dir() {
            collect_files(root, &p, out)?;
        } else {
            out.push(p.strip_prefix(root).expect("walk stays under root").to_path_buf());
        }
    }
    Ok(())
}

/// Executes the configured pipeline and returns the populated run directory.
pub fn run(cfg: &LoadedConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let c = &cfg.config;
    let styles = cfg.style_set()?;
    let prepared = prepare_dataset(cfg)?;
    let dataset = &prepared.dataset;
    if c.splits.size > dataset.pool_size() {
        return Err(Error::SplitTooLarge { split: c.splits.size, pool: dataset.pool_size() });
    }
    let hash = config_hash(c, &prepared.content_hash)?;
    let templates = c.templates.clone().unwrap_or_default();

    let run_dir = cfg.output_dir();
    fs::create_dir_all(&run_dir).map_err(|e| Error::unwritable(&run_dir, e))?;
    let mut seeds = BTreeMap::new();
    seeds.insert("run".to_string(), c.seed);
    seeds.insert("splits".to_string(), rng::derive_key(c.seed, "splits", &[]));
    let resolved = ResolvedConfig {
        tool_version: env!("CARGO_PKG_VERSION").into(),
        config: c.clone(),
        dataset_sha256: prepared.content_hash.clone(),
        config_hash: hash.clone(),
        seeds,
        items_used: dataset.items.len(),
        items_excluded: prepared.excluded.iter().filter_map(|v| v.item_id.as_deref()).collect::<std::collections::BTreeSet<_>>().len(),
    };
    write(&run_dir.join("resolved_config.json"), &json_pretty(&resolved)?)?;
    write(&run_dir.join("excluded.json"), &json_pretty(&prepared.excluded)?)?;

    if prepared.forged_from.is_some() {
        forge::export_dataset(dataset, prepared.forged_from.as_deref().expect("forged"), &run_dir.join("dataset"))?;
    }

    // One rendered preview per style and compression level for the first item.
    let first = &dataset.items[0];
    for style in styles.all() {
        for &q in &c.compression {
            for (k, s) in stimuli(first, style, q, prepared.store.as_ref())?.iter().enumerate() {
                let ext = if s.mime == "image/png" { "png" } else { "jpg" };
                write(&run_dir.join("stimuli").join(format!("{}_{}_{k}.{ext}", style.style_id, q)), &s.bytes)?;
            }
        }
    }

    let cache = match &c.cache_dir {
        Some(d) => Some(Cache::open(cfg.resolve(d))?),
        None => None,
    };
    let plan = SweepPlan {
        dataset,
        styles: &styles,
        compressions: &c.compression,
        store: prepared.store.as_ref(),
        templates: &templates,
        seed: c.seed,
    };
    let (records, sweep) = run_sweep(&c.endpoints, &plan, cache.as_ref())?;
    write_records_jsonl(&run_dir.join("results.jsonl"), &records)?;
    write(&run_dir.join("sweep.json"), &json_pretty(&sweep)?)?;

    let matrix = matrix_from_records(&records, &styles.default.style_id)?;
    let analysis = AnalysisConfig {
        replicates: c.bootstrap.replicates,
        split_size: c.splits.size,
        split_count: c.splits.count,
        seed: c.seed,
    };
    let stats = analyze(&matrix, &dataset.name, &styles.default.style_id, analysis)?;
    write(&run_dir.join("stats.json"), &json_pretty(&stats)?)?;

    let leaderboard = all_leaderboards(&matrix, &stats)?;
    render_reports(&stats, &leaderboard, &run_dir.join("reports"), &hash)?;

    let finding = match &c.game {
        None => None,
        Some(g) => {
            let conditions: Vec<Condition> = styles
                .all()
                .map(|s| Condition::new(s.style_id.clone(), c.compression[0]))
                .collect();
            let adversarial_splits = if g.adversarial_splits {
                Some(make_splits(dataset.pool_size(), c.splits.size, c.splits.count, rng::derive_key(c.seed, "splits", &[]))?)
            } else {
                None
            };
            let f = manipulation_search(&matrix, &g.target, g.objective, &SearchSpace { conditions, adversarial_splits })?;
            write(&run_dir.join("game.json"), &json_pretty(&f)?)?;
            Some(f)
        }
    };

    let mut files = Vec::new();
    collect_files(&run_dir, &run_dir, &mut files)?;
    let manifest: Vec<FileEntry> = files
        .iter()
        .filter(|p| p.as_path() != Path::new("manifest.json"))
        .map(|p| {
            let bytes = fs::read(run_dir.join(p))?;
            Ok(file_entry(&p.to_string_lossy().replace('\\', "/"), &bytes))
        })
        .collect::<Result<_>>()?;
    let doc = serde_json::json!({ "config_hash": hash, "files": manifest });
    write(&run_dir.join("manifest.json"), &json_pretty(&doc)?)?;

    Ok(RunOutcome { run_dir, records, sweep, stats, finding, manifest })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infer::SyntheticProfile;
    use crate::synth::{synthetic_dataset, write_dataset};

    fn config(dataset: &str) -> RunConfig {
        RunConfig {
            schema_version: SCHEMA_VERSION,
            seed: 5,
            dataset: Some(dataset.into()),
            forge: None,
            styles: StyleSource::Canonical,
            compression: vec![Compression::Passthrough, Compression::Jpeg(70)],
            endpoints: vec![
                ModelEndpoint::synthetic("alpha", SyntheticProfile::constant(0.7).with_style("blue", -0.2)),
                ModelEndpoint::synthetic("beta", SyntheticProfile::constant(0.6)),
            ],
            splits: SplitConfig { size: 8, count: 20 },
            bootstrap: BootstrapConfig { replicates: 200 },
            output_dir: "run".into(),
            cache_dir: Some("cache".into()),
            templates: None,
            game: Some(GameConfig { target: "beta".into(), objective: Objective::MaximizeRank, adversarial_splits: false }),
        }
    }

    #[test]
    fn unknown_fields_rejected() {
        let mut v = serde_json::to_value(config("d/manifest.json")).unwrap();
        v["surprise"] = serde_json::json!(1);
        assert!(matches!(RunConfig::from_json(&v.to_string()), Err(Error::ConfigInvalid(_))));
        let mut v = serde_json::to_value(config("d/manifest.json")).unwrap();
        v.as_object_mut().unwrap().remove("seed");
        assert!(RunConfig::from_json(&v.to_string()).is_err());
    }

    #[test]
    fn missing_manifest_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = LoadedConfig::new(config("nope/manifest.json"), dir.path());
        assert!(matches!(run(&cfg), Err(Error::ConfigInvalid(_))));
        assert!(!dir.path().join("run").exists());
    }

    #[test]
    fn small_run_end_to_end() {
        let dir = tempfile::tempdir().unwrap();
        let (d, store) = synthetic_dataset("mini", 12, 64, 3);
        write_dataset(&dir.path().join("data"), &d, &store).unwrap();
        let cfg = LoadedConfig::new(config("data/manifest.json"), dir.path());
        let out = run(&cfg).unwrap();
        assert_eq!(out.records.len(), 2 * 12 * 17 * 2);
        assert_eq!(out.sweep.endpoint_calls, out.records.len() as u64);
        for f in ["resolved_config.json", "results.jsonl", "stats.json", "manifest.json", "game.json", "reports/leaderboard.csv"] {
            assert!(out.run_dir.join(f).is_file(), "{f}");
        }
        let warm = run(&cfg).unwrap();
        assert_eq!(warm.sweep.endpoint_calls, 0);
        assert!(warm.records.iter().all(|r| r.cached));
    }
}
