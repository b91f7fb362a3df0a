//! End-to-end run from a JSON config: sweep, statistics, game and reports.
//!
//! `cargo run --example full_pipeline -- [config.json]` runs the given config;
//! without one, a synthetic dataset and config are written to a temp dir.

use vpeval::pipeline::{run, RunConfig};
use vpeval::synth::{synthetic_dataset, write_dataset};

const CONFIG: &str = r#"{
  "schema_version": 1,
  "seed": 7,
  "dataset": "data/manifest.json",
  "styles": "canonical",
  "endpoints": [
    {"model_id": "syn-a", "transport": {"kind": "synthetic", "profile": {"base": 0.7, "style_delta": {"large": -0.1}}}},
    {"model_id": "syn-b", "transport": {"kind": "synthetic", "profile": {"base": 0.66, "quality_delta": {"q70": -0.05}}}}
  ],
  "splits": {"size": 40, "count": 500},
  "bootstrap": {"replicates": 2000},
  "output_dir": "run",
  "cache_dir": "cache",
  "game": {"target": "syn-b", "objective": "maximize_rank"}
}"#;

fn main() -> vpeval::Result<()> {
    let tmp = tempfile::tempdir().expect("tempdir");
    let path = match std::env::args().nth(1) {
        Some(p) => p.into(),
        None => {
            let (d, store) = synthetic_dataset("pipeline", 80, 96, 7);
            write_dataset(&tmp.path().join("data"), &d, &store)?;
            let p = tmp.path().join("config.json");
            std::fs::write(&p, CONFIG).unwrap();
            p
        }
    };
    let outcome = run(&RunConfig::load(&path)?)?;
    println!("run dir: {}", outcome.run_dir.display());
    println!("{} records, {:?}", outcome.records.len(), outcome.sweep);
    for v in outcome.stats.variance_ratios.iter().take(4) {
        println!("variance ratio {} {}: {:?}", v.report.model_id, v.jpeg_quality.suffix(), v.report.r);
    }
    if let Some(f) = &outcome.finding {
        println!("game: {} best rank {} at {}/{}", f.target, f.achieved_rank, f.condition.style_id, f.condition.jpeg_quality.suffix());
    }
    println!("{} files in manifest", outcome.manifest.len());
    Ok(())
}
