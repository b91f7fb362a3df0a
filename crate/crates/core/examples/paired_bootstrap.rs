//! Paired bootstrap, Wilson intervals and the variance ratio on toy vectors.

use vpeval::stats::{bootstrap_accuracies, paired_bootstrap, variance_ratio, wilson};

fn main() -> vpeval::Result<()> {
    let default: Vec<bool> = (0..100).map(|i| i < 60).collect();
    let variant: Vec<bool> = (0..100).map(|i| i < 50).collect();
    let (lo, hi) = wilson(60, 100, 1.96);
    println!("default accuracy 0.60, Wilson 95% [{lo:.4}, {hi:.4}]");

    let r = paired_bootstrap(&default, &variant, 10_000, 42)?;
    println!(
        "delta {:.3}  sd {:.4}  CI [{:.3}, {:.3}]  significant={}",
        r.point_delta, r.replicate_sd, r.ci_low, r.ci_high, r.significant
    );

    let accs = bootstrap_accuracies(&default, 10_000, 42)?;
    let ratio = variance_ratio(&[r], &accs)?;
    println!("variance ratio R = {:?}", ratio.r);
    Ok(())
}
