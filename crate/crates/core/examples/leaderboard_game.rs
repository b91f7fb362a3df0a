//! Builds per-style leaderboards and searches for the style that flatters one model.

use vpeval::board::{build_leaderboard, manipulation_search, Objective, SearchSpace};
use vpeval::infer::{run_sweep, ModelEndpoint, SweepPlan, SyntheticProfile, Templates};
use vpeval::marker::canonical_style_set;
use vpeval::model::matrix_from_records;
use vpeval::synth::synthetic_dataset;
use vpeval::{Compression, Condition};

fn main() -> vpeval::Result<()> {
    let (dataset, store) = synthetic_dataset("game", 600, 40, 4);
    let styles = canonical_style_set();
    let levels = [Compression::Passthrough];
    let templates = Templates::default();
    let plan = SweepPlan { dataset: &dataset, styles: &styles, compressions: &levels, store: &store, templates: &templates, seed: 4 };
    let endpoints = [
        ModelEndpoint::synthetic("leader", SyntheticProfile::constant(0.72).with_style("large", -0.1)),
        ModelEndpoint::synthetic("runner", SyntheticProfile::constant(0.66)),
        ModelEndpoint::synthetic("underdog", SyntheticProfile::constant(0.60).with_style("large", 0.13)),
    ];
    let (records, _) = run_sweep(&endpoints, &plan, None)?;
    let matrix = matrix_from_records(&records, "default")?;
    for style in ["default", "large"] {
        println!("-- {style}");
        for e in build_leaderboard(&matrix, &Condition::new(style, Compression::Passthrough))? {
            println!("  #{} {:<9} {:.3} [{:.3}, {:.3}]", e.rank, e.model_id, e.accuracy.acc, e.accuracy.ci_low, e.accuracy.ci_high);
        }
    }
    let space = SearchSpace::conditions(matrix.conditions().to_vec());
    let f = manipulation_search(&matrix, "underdog", Objective::MaximizeRank, &space)?;
    println!(
        "underdog: rank {} under {} -> rank {} under {} ({} points searched)",
        f.baseline_rank, f.baseline_condition.style_id, f.achieved_rank, f.condition.style_id, f.evaluated
    );
    Ok(())
}
