//! Ten-item smoke test against a live OpenAI-compatible endpoint.
//!
//! Requires `VPEVAL_LIVE_BASE_URL` and `VPEVAL_LIVE_MODEL`; the API key is read
//! from the variable named by `VPEVAL_LIVE_KEY_ENV` (default `OPENAI_API_KEY`).

use vpeval::infer::{run_sweep, HttpChat, ModelEndpoint, RetryPolicy, SweepPlan, Templates, Transport};
use vpeval::marker::canonical_style_set;
use vpeval::synth::synthetic_dataset;
use vpeval::Compression;

fn main() -> vpeval::Result<()> {
    let (Ok(base_url), Ok(model)) = (std::env::var("VPEVAL_LIVE_BASE_URL"), std::env::var("VPEVAL_LIVE_MODEL")) else {
        eprintln!("VPEVAL_LIVE_BASE_URL and VPEVAL_LIVE_MODEL are not set; nothing to do");
        return Ok(());
    };
    let (dataset, store) = synthetic_dataset("live", 10, 256, 3);
    let mut styles = canonical_style_set();
    styles.variants.clear();
    let endpoint = ModelEndpoint {
        model_id: model,
        transport: Transport::HttpChat(HttpChat {
            base_url,
            api_model: None,
            api_key_env: Some(std::env::var("VPEVAL_LIVE_KEY_ENV").unwrap_or_else(|_| "OPENAI_API_KEY".into())),
            max_tokens: 64,
        }),
        max_parallel: 2,
        timeout_s: 60,
        retry: RetryPolicy::default(),
    };
    let levels = [Compression::Passthrough];
    let templates = Templates::default();
    let plan = SweepPlan { dataset: &dataset, styles: &styles, compressions: &levels, store: &store, templates: &templates, seed: 1 };
    let (records, stats) = run_sweep(&[endpoint], &plan, None)?;
    for r in &records {
        println!("{} raw={:?} parsed={:?} error={:?}", r.item_id, r.raw_response, r.parsed_answer, r.error);
    }
    println!("{stats:?}");
    Ok(())
}
