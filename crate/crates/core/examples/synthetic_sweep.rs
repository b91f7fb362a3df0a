//! Runs a cached synthetic sweep over styles and compression levels, then resumes it.

use vpeval::infer::{run_sweep, Cache, ModelEndpoint, SweepPlan, SyntheticProfile, Templates};
use vpeval::marker::canonical_style_set;
use vpeval::synth::synthetic_dataset;
use vpeval::Compression;

fn main() -> vpeval::Result<()> {
    let (dataset, store) = synthetic_dataset("sweep", 30, 96, 1);
    let styles = canonical_style_set();
    let levels = Compression::standard_levels();
    let templates = Templates::default();
    let plan = SweepPlan { dataset: &dataset, styles: &styles, compressions: &levels, store: &store, templates: &templates, seed: 9 };
    let endpoints = [
        ModelEndpoint::synthetic("steady", SyntheticProfile::constant(0.7)),
        ModelEndpoint::synthetic("fragile", SyntheticProfile::constant(0.72).with_style("large", -0.12)),
    ];
    let dir = tempfile::tempdir().expect("tempdir");
    let cache = Cache::open(dir.path())?;
    let (records, cold) = run_sweep(&endpoints, &plan, Some(&cache))?;
    println!("cold: {} records, {:?}", records.len(), cold);
    let (_, warm) = run_sweep(&endpoints, &plan, Some(&cache))?;
    println!("warm: {:?}", warm);
    let r = &records[0];
    println!("first record: {} {} {} -> {:?} correct={}", r.model_id, r.style_id, r.jpeg_quality.suffix(), r.parsed_answer, r.correct);
    Ok(())
}
