//! Tables, vector charts and the file manifest of a report directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::leaderboard::LeaderboardEntry;
use super::svg::{diverging, Svg, PALETTE};
use crate::error::{Error, Result};
use crate::model::{Compression, Condition};
use crate::stats::{rank_models, StatsReport};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileManifest {
    pub config_hash: String,
    pub files: Vec<FileEntry>,
}

pub fn file_entry(path: &str, bytes: &[u8]) -> FileEntry {
    FileEntry { path: path.into(), sha256: hex::encode(Sha256::digest(bytes)), bytes: bytes.len() as u64 }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn leaderboard_csv(entries: &[LeaderboardEntry]) -> String {
    let mut out = String::from("style_id,jpeg_quality,rank,model_id,acc,ci_low,ci_high,k,n,tied_with,rank_std,significant_vs_default\n");
    for e in entries {
        let a = &e.accuracy;
        out.push_str(&format!(
            "{},{},{},{},{:.6},{:.6},{:.6},{},{},{},{},{}\n",
            csv_field(&e.condition.style_id),
            e.condition.jpeg_quality,
            e.rank,
            csv_field(&e.model_id),
            a.acc,
            a.ci_low,
            a.ci_high,
            a.k,
            a.n,
            csv_field(&e.tied_with.join(";")),
            e.rank_std.map(|v| format!("{v:.6}")).unwrap_or_default(),
            e.significant_vs_default.map(|v| v.to_string()).unwrap_or_default(),
        ));
    }
    out
}

/// Marker-effect heatmap at one quality: one row per model, one column per
/// variant, coloured by Δacc = acc(default) - acc(variant). `*` marks cells
/// whose bootstrap interval excludes zero.
pub fn heatmap_svg(stats: &StatsReport, q: Compression, config_hash: &str) -> String {
    let effects: Vec<_> = stats.marker_effects.iter().filter(|e| e.jpeg_quality == q).collect();
    let mut variants: Vec<&str> = Vec::new();
    for e in &effects {
        if !variants.contains(&e.result.variant.as_str()) {
            variants.push(&e.result.variant);
        }
    }
    let limit = effects.iter().map(|e| e.result.point_delta.abs()).fold(0.05, f64::max);
    let (left, top, cw, ch) = (140.0, 150.0, 44.0, 28.0);
    let width = left + cw * variants.len() as f64 + 20.0;
    let height = top + ch * stats.models.len() as f64 + 60.0;
    let mut svg = Svg::new(width, height);
    svg.text(8.0, 20.0, 13.0, "start", "title", &format!("Δacc (default − variant), {} @ {q}", stats.dataset));
    for (j, v) in variants.iter().enumerate() {
        svg.text_rotated(left + cw * (j as f64 + 0.5), top - 8.0, 10.0, "col-header", v);
    }
    for (i, m) in stats.models.iter().enumerate() {
        let y = top + ch * i as f64;
        svg.text(left - 6.0, y + ch * 0.65, 10.0, "end", "row-header", m);
        for (j, v) in variants.iter().enumerate() {
            let x = left + cw * j as f64;
            if let Some(e) = effects.iter().find(|e| e.result.model_id == *m && e.result.variant == *v) {
                svg.rect(x, y, cw - 1.0, ch - 1.0, &diverging(e.result.point_delta, limit), "cell");
                let mark = if e.result.significant { "*" } else { "" };
                svg.text(x + cw / 2.0, y + ch * 0.65, 9.0, "middle", "cell-value", &format!("{:+.1}{mark}", 100.0 * e.result.point_delta));
            }
        }
    }
    svg.finish(&format!("marker effects {q}"), config_hash)
}

fn rank_axes(svg: &mut Svg, left: f64, top: f64, plot_w: f64, plot_h: f64, models: usize) {
    let step = plot_h / (models.max(2) - 1) as f64;
    for r in 1..=models {
        let y = top + step * (r - 1) as f64;
        svg.line(left, y, left + plot_w, y, "#dddddd");
        svg.text(left - 6.0, y + 3.0, 10.0, "end", "axis", &r.to_string());
    }
}

fn legend(svg: &mut Svg, x: f64, y: f64, models: &[String]) {
    for (i, m) in models.iter().enumerate() {
        let yy = y + 14.0 * i as f64;
        svg.rect(x, yy - 8.0, 10.0, 10.0, PALETTE[i % PALETTE.len()], "legend");
        svg.text(x + 14.0, yy, 10.0, "start", "legend", m);
    }
}

/// Each model's rank on every split of the default condition.
pub fn rank_splits_svg(stats: &StatsReport, q: Compression, config_hash: &str) -> Option<String> {
    let traj = stats
        .volatility
        .iter()
        .find(|v| v.style_id == stats.default_style && v.jpeg_quality == q)?
        .rank_trajectory
        .as_ref()?;
    let models = stats.models.len();
    let (left, top, plot_w, plot_h) = (50.0, 40.0, 640.0, 24.0 * models.max(2) as f64);
    let mut svg = Svg::new(left + plot_w + 160.0, top + plot_h + 60.0);
    svg.text(8.0, 20.0, 13.0, "start", "title", &format!("Rank across {} splits, {}@{q}", traj.len(), stats.default_style));
    rank_axes(&mut svg, left, top, plot_w, plot_h, models);
    let step = plot_h / (models.max(2) - 1) as f64;
    let dx = plot_w / traj.len().max(2).saturating_sub(1) as f64;
    for m in 0..models {
        let pts: Vec<(f64, f64)> = traj.iter().enumerate().map(|(s, r)| (left + dx * s as f64, top + step * (r[m] - 1) as f64)).collect();
        svg.polyline(&pts, PALETTE[m % PALETTE.len()], "trajectory");
    }
    legend(&mut svg, left + plot_w + 16.0, top + 8.0, &stats.models);
    svg.text(left + plot_w / 2.0, top + plot_h + 28.0, 10.0, "middle", "axis", "split");
    Some(svg.finish("rank across splits", config_hash))
}

/// Each model's full-pool rank at every quality level, default style.
pub fn rank_quality_svg(stats: &StatsReport, qualities: &[Compression], config_hash: &str) -> String {
    let models = stats.models.len();
    let (left, top, plot_w, plot_h) = (50.0, 40.0, 120.0 * qualities.len().max(2) as f64, 24.0 * models.max(2) as f64);
    let mut svg = Svg::new(left + plot_w + 160.0, top + plot_h + 60.0);
    svg.text(8.0, 20.0, 13.0, "start", "title", &format!("Rank by compression level, {}", stats.default_style));
    rank_axes(&mut svg, left, top, plot_w, plot_h, models);
    let step = plot_h / (models.max(2) - 1) as f64;
    let dx = plot_w / qualities.len().max(2).saturating_sub(1) as f64;
    let ranks: Vec<BTreeMap<String, usize>> = qualities
        .iter()
        .map(|&q| rank_models(&stats.accuracies(&Condition::new(stats.default_style.clone(), q))))
        .collect();
    for (j, q) in qualities.iter().enumerate() {
        svg.text(left + dx * j as f64, top + plot_h + 20.0, 10.0, "middle", "axis", &q.to_string());
    }
    for (m, id) in stats.models.iter().enumerate() {
        let colour = PALETTE[m % PALETTE.len()];
        let pts: Vec<(f64, f64)> = ranks
            .iter()
            .enumerate()
            .filter_map(|(j, r)| r.get(id).map(|&rank| (left + dx * j as f64, top + step * (rank - 1) as f64)))
            .collect();
        svg.polyline(&pts, colour, "trajectory");
        for &(x, y) in &pts {
            svg.circle(x, y, 3.0, colour);
        }
    }
    legend(&mut svg, left + plot_w + 16.0, top + 8.0, &stats.models);
    svg.finish("rank by compression", config_hash)
}

/// Mean absolute accuracy shift per variant at one quality.
pub fn shift_svg(stats: &StatsReport, q: Compression, config_hash: &str) -> Option<String> {
    let shifts = &stats.mean_abs_shift.iter().find(|s| s.jpeg_quality == q)?.shifts;
    let max = shifts.values().copied().fold(0.01, f64::max);
    let (left, top, row, plot_w) = (150.0, 40.0, 18.0, 400.0);
    let mut svg = Svg::new(left + plot_w + 80.0, top + row * shifts.len() as f64 + 40.0);
    svg.text(8.0, 20.0, 13.0, "start", "title", &format!("Mean |Δacc| over models, {} @ {q}", stats.dataset));
    for (i, (variant, v)) in shifts.iter().enumerate() {
        let y = top + row * i as f64;
        svg.text(left - 6.0, y + row * 0.7, 10.0, "end", "row-header", variant);
        svg.rect(left, y + 2.0, plot_w * v / max, row - 4.0, "#4c72b0", "bar");
        svg.text(left + plot_w * v / max + 4.0, y + row * 0.7, 9.0, "start", "bar-value", &format!("{:.3}", v));
    }
    Some(svg.finish(&format!("mean abs shift {q}"), config_hash))
}

fn write_file(out: &Path, name: &str, bytes: &[u8]) -> Result<FileEntry> {
    let path = out.join(name);
    fs::write(&path, bytes).map_err(|e| Error::unwritable(&path, e))?;
    Ok(file_entry(name, bytes))
}

/// Writes tables, charts and `manifest.json` into `out`.
pub fn render_reports(stats: &StatsReport, leaderboard: &[LeaderboardEntry], out: &Path, config_hash: &str) -> Result<FileManifest> {
    fs::create_dir_all(out).map_err(|e| Error::unwritable(out, e))?;
    let mut qualities: Vec<Compression> = stats.cells.iter().map(|c| c.jpeg_quality).collect();
    qualities.sort();
    qualities.dedup();

    let mut docs: Vec<(String, Vec<u8>)> = vec![
        ("leaderboard.csv".into(), leaderboard_csv(leaderboard).into_bytes()),
        ("leaderboard.json".into(), serde_json::to_vec_pretty(leaderboard)?),
    ];
    let charts: Vec<(String, Option<String>)> = qualities
        .par_iter()
        .flat_map_iter(|&q| {
            let heat = stats
                .marker_effects
                .iter()
                .any(|e| e.jpeg_quality == q)
                .then(|| heatmap_svg(stats, q, config_hash));
            [
                (format!("heatmap_{q}.svg"), heat),
                (format!("rank_splits_{q}.svg"), rank_splits_svg(stats, q, config_hash)),
                (format!("shift_{q}.svg"), shift_svg(stats, q, config_hash)),
            ]
        })
        .collect();
    docs.extend(charts.into_iter().filter_map(|(name, doc)| doc.map(|d| (name, d.into_bytes()))));
    docs.push(("rank_quality.svg".into(), rank_quality_svg(stats, &qualities, config_hash).into_bytes()));
    docs.sort_by(|a, b| a.0.cmp(&b.0));

    let files = docs.iter().map(|(name, bytes)| write_file(out, name, bytes)).collect::<Result<Vec<_>>>()?;
    let manifest = FileManifest { config_hash: config_hash.into(), files };
    let path = out.join("manifest.json");
    fs::write(&path, serde_json::to_vec_pretty(&manifest)?).map_err(|e| Error::unwritable(&path, e))?;
    Ok(manifest)
}
