//! Rank volatility of close and distant models across random item subsets.

use vpeval::infer::{synthetic_choice, SyntheticProfile};
use vpeval::stats::{make_splits, volatility};
use vpeval::synth::synthetic_dataset;
use vpeval::{Compression, Condition};

fn main() -> vpeval::Result<()> {
    let (dataset, _) = synthetic_dataset("pool", 3000, 40, 2);
    let cond = Condition::new("default", Compression::Passthrough);
    let models = [("alpha", 0.50), ("beta", 0.53), ("gamma", 0.75)];
    let rows: Vec<Vec<bool>> = models
        .iter()
        .map(|(m, p)| {
            let profile = SyntheticProfile::constant(*p);
            dataset.items.iter().map(|it| synthetic_choice(&profile, m, it, &cond, 5) == it.gold_label).collect()
        })
        .collect();
    let ids: Vec<String> = models.iter().map(|(m, _)| m.to_string()).collect();
    let slices: Vec<&[bool]> = rows.iter().map(|r| r.as_slice()).collect();
    let plan = make_splits(dataset.pool_size(), 100, 1000, 5)?;
    let report = volatility(&ids, &slices, &plan)?;
    for m in &report.models {
        println!("{:<6} acc_std {:.4}  rank_std {:.3}  ranks {}..={}", m.model_id, m.acc_std, m.rank_std, m.rank_min, m.rank_max);
    }
    println!("alpha (0.50) outranked beta (0.53) in {:.1}% of splits", 100.0 * report.below_frequency(1, 0));
    Ok(())
}
