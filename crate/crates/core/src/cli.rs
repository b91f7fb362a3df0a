//! Command-line interface over the library.
//!
//! Every subcommand is a thin wrapper: argument parsing here, work in the
//! library modules. Failures surface as one `error[Class]: message` line.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::board::{all_leaderboards, build_leaderboard, manipulation_search, render_reports, Objective, SearchSpace};
use crate::error::{Error, Result};
use crate::forge;
use crate::infer::{run_sweep, stimuli, Cache, SweepPlan};
use crate::marker::{canonical_style_set, StyleSet};
use crate::model::{matrix_from_records, read_records_jsonl, write_records_jsonl, Compression, Condition, EvalDataset};
use crate::pipeline::{self, prepare_dataset, LoadedConfig, RunConfig};
use crate::rng;
use crate::stats::{analyze, make_splits, AnalysisConfig, StatsReport, DEFAULT_REPLICATES};
use crate::store::DirStore;

#[derive(Debug, Parser)]
#[command(name = "vpeval", version, about = "Robustness-aware evaluation of visually prompted tasks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ForgeKind {
    /// Relative depth.
    Rd,
    /// Semantic correspondence.
    Sc,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ObjectiveArg {
    MaximizeRank,
    MinimizeRank,
}

#[derive(Debug, clap::Args)]
pub struct AnalysisArgs {
    /// EvalRecord JSON lines.
    #[arg(long)]
    pub records: PathBuf,
    #[arg(long, default_value = "default")]
    pub default_style: String,
    #[arg(long, default_value_t = DEFAULT_REPLICATES)]
    pub replicates: usize,
    #[arg(long, default_value_t = 100)]
    pub split_size: usize,
    #[arg(long, default_value_t = 1000)]
    pub split_count: usize,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a raw JSON-lines corpus into a task manifest plus images.
    Forge {
        #[arg(long, value_enum)]
        task: ForgeKind,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        image_root: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "forged")]
        name: String,
        #[arg(long, default_value_t = forge::DEFAULT_MARGIN)]
        margin: f64,
        #[arg(long, default_value_t = forge::DEFAULT_DISTRACTORS)]
        distractors: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Draw markers on every item under each style and compression level.
    Render {
        #[arg(long)]
        manifest: PathBuf,
        /// "canonical" or a style-set JSON file.
        #[arg(long, default_value = "canonical")]
        styles: String,
        /// Comma-separated: default, 70, 80, 90 or custom:q.
        #[arg(long = "jpeg", value_delimiter = ',', default_value = "default")]
        quality: Vec<Compression>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the inference sweep of a run config and write EvalRecord JSON lines.
    Infer {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Statistical analysis of EvalRecords as JSON.
    Stats {
        #[command(flatten)]
        analysis: AnalysisArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the leaderboard for one condition.
    Leaderboard {
        #[arg(long)]
        records: PathBuf,
        #[arg(long, default_value = "default")]
        style: String,
        #[arg(long = "jpeg", default_value = "default")]
        quality: Compression,
        #[arg(long)]
        json: bool,
    },
    /// Search marker styles (and optionally splits) for the condition that moves a model most.
    Game {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        target: String,
        #[arg(long, value_enum, default_value = "maximize-rank")]
        objective: ObjectiveArg,
        #[arg(long = "jpeg", default_value = "default")]
        quality: Compression,
        /// Also pick the most favourable split. This is benchmark gaming; use it to audit.
        #[arg(long)]
        adversarial_splits: bool,
        #[arg(long, default_value_t = 100)]
        split_size: usize,
        #[arg(long, default_value_t = 1000)]
        split_count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Tables and charts from EvalRecords.
    Report {
        #[command(flatten)]
        analysis: AnalysisArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Execute a full run config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load_styles(arg: &str) -> Result<StyleSet> {
    if arg == "canonical" {
        Ok(canonical_style_set())
    } else {
        StyleSet::load(Path::new(arg))
    }
}

fn stats_from(a: &AnalysisArgs) -> Result<(crate::model::CorrectnessMatrix, StatsReport)> {
    let records = read_records_jsonl(&a.records)?;
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let matrix = matrix_from_records(&records, &a.default_style)?;
    let name = a.records.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let cfg = AnalysisConfig { replicates: a.replicates, split_size: a.split_size, split_count: a.split_count, seed: a.seed };
    let stats = analyze(&matrix, &name, &a.default_style, cfg)?;
    Ok((matrix, stats))
}

fn write_json<T: serde::Serialize>(path: &Path, v: &T) -> Result<()> {
    if let Some(d) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(d).map_err(|e| Error::unwritable(d, e))?;
    }
    fs::write(path, serde_json::to_vec_pretty(v)?).map_err(|e| Error::unwritable(path, e))
}

/// Runs one parsed command; returns text for standard output.
pub fn execute(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Forge { task, corpus, image_root, out, name, margin, distractors, seed } => {
            let (outcome, skipped) = match task {
                ForgeKind::Rd => {
                    let imp = forge::import_depth_corpus(&corpus)?;
                    (forge::forge_rd(&name, &imp.records, margin), imp.skipped)
                }
                ForgeKind::Sc => {
                    let imp = forge::import_correspondence_corpus(&corpus)?;
                    (forge::forge_sc(&name, &imp.records, distractors, seed), imp.skipped)
                }
            };
            let manifest = forge::export_dataset(&outcome.dataset, &image_root, &out)?;
            write_json(&out.join("rejected.json"), &serde_json::json!({ "skipped": skipped, "rejected": outcome.rejected }))?;
            Ok(format!(
                "{} items -> {} ({} rejected, {} malformed lines)",
                outcome.dataset.items.len(),
                manifest.display(),
                outcome.rejected.len(),
                skipped.len()
            ))
        }
        Command::Render { manifest, styles, quality, out } => {
            let dataset = EvalDataset::load(&manifest)?;
            let store = DirStore::for_manifest(&manifest);
            let styles = load_styles(&styles)?;
            let mut n = 0;
            for style in styles.all() {
                let dir = out.join(&style.style_id);
                fs::create_dir_all(&dir).map_err(|e| Error::unwritable(&dir, e))?;
                for item in &dataset.items {
                    for &q in &quality {
                        for (k, s) in stimuli(item, style, q, &store)?.iter().enumerate() {
                            let ext = if s.mime == "image/png" { "png" } else { "jpg" };
                            let safe: String = item.id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect();
                            let path = dir.join(format!("{safe}_{q}_{k}.{ext}"));
                            fs::write(&path, &s.bytes).map_err(|e| Error::unwritable(&path, e))?;
                            n += 1;
                        }
                    }
                }
            }
            Ok(format!("{n} images written to {}", out.display()))
        }
        Command::Infer { config, out } => {
            let cfg = RunConfig::load(&config)?;
            cfg.validate()?;
            let styles = cfg.style_set()?;
            let prepared = prepare_dataset(&cfg)?;
            let templates = cfg.config.templates.clone().unwrap_or_default();
            let cache = match &cfg.config.cache_dir {
                Some(d) => Some(Cache::open(cfg.resolve(d))?),
                None => None,
            };
            let plan = SweepPlan {
                dataset: &prepared.dataset,
                styles: &styles,
                compressions: &cfg.config.compression,
                store: prepared.store.as_ref(),
                templates: &templates,
                seed: cfg.config.seed,
            };
            let (records, s) = run_sweep(&cfg.config.endpoints, &plan, cache.as_ref())?;
            write_records_jsonl(&out, &records)?;
            Ok(format!(
                "{} records ({} endpoint calls, {} cache hits, {} unparsed) -> {}",
                s.cells,
                s.endpoint_calls,
                s.cache_hits,
                s.unparsed,
                out.display()
            ))
        }
        Command::Stats { analysis, out } => {
            let (_, stats) = stats_from(&analysis)?;
            write_json(&out, &stats)?;
            Ok(format!("stats for {} models -> {}", stats.models.len(), out.display()))
        }
        Command::Leaderboard { records, style, quality, json } => {
            let records = read_records_jsonl(&records)?;
            let matrix = matrix_from_records(&records, &style)?;
            let entries = build_leaderboard(&matrix, &Condition::new(style, quality))?;
            if json {
                return Ok(serde_json::to_string_pretty(&entries)?);
            }
            let mut out = String::from("rank  model                 acc     95% CI            tied with\n");
            for e in &entries {
                out.push_str(&format!(
                    "{:>4}  {:<20}  {:.4}  [{:.4}, {:.4}]  {}\n",
                    e.rank,
                    e.model_id,
                    e.accuracy.acc,
                    e.accuracy.ci_low,
                    e.accuracy.ci_high,
                    e.tied_with.join(", ")
                ));
            }
            Ok(out.trim_end().to_string())
        }
        Command::Game { records, target, objective, quality, adversarial_splits, split_size, split_count, seed } => {
            let records = read_records_jsonl(&records)?;
            let matrix = matrix_from_records(&records, "default")?;
            let mut conditions: Vec<Condition> =
                matrix.conditions().iter().filter(|c| c.jpeg_quality == quality).cloned().collect();
            conditions.sort_by_key(|c| c.style_id != "default");
            let splits = if adversarial_splits {
                Some(make_splits(matrix.items().len(), split_size, split_count, rng::derive_key(seed, "splits", &[]))?)
            } else {
                None
            };
            let objective = match objective {
                ObjectiveArg::MaximizeRank => Objective::MaximizeRank,
                ObjectiveArg::MinimizeRank => Objective::MinimizeRank,
            };
            let f = manipulation_search(&matrix, &target, objective, &SearchSpace { conditions, adversarial_splits: splits })?;
            Ok(serde_json::to_string_pretty(&f)?)
        }
        Command::Report { analysis, out } => {
            let (matrix, stats) = stats_from(&analysis)?;
            let leaderboard = all_leaderboards(&matrix, &stats)?;
            let bytes = fs::read(&analysis.records)?;
            let hash = crate::board::file_entry("records", &bytes).sha256;
            let manifest = render_reports(&stats, &leaderboard, &out, &hash)?;
            let listing: BTreeMap<_, _> = manifest.files.iter().map(|f| (f.path.clone(), f.bytes)).collect();
            Ok(format!("{} files -> {}: {:?}", listing.len(), out.display(), listing.keys().collect::<Vec<_>>()))
        }
        Command::Run { config } => {
            let cfg: LoadedConfig = RunConfig::load(&config)?;
            let outcome = pipeline::run(&cfg)?;
            let mut msg = format!(
                "run complete: {} records ({} endpoint calls, {} cache hits) -> {}",
                outcome.records.len(),
                outcome.sweep.endpoint_calls,
                outcome.sweep.cache_hits,
                outcome.run_dir.display()
            );
            if let Some(f) = outcome.finding {
                msg.push_str(&format!(
                    "\ngame: {} {} via {} (rank {} -> {})",
                    f.target, f.objective, f.condition, f.baseline_rank, f.achieved_rank
                ));
            }
            Ok(msg)
        }
    }
}

/// The single-line error form printed on failure.
pub fn error_line(e: &Error) -> String {
    format!("error[{}]: {}", e.class(), e.to_string().replace(['\n', '\r'], " "))
}
