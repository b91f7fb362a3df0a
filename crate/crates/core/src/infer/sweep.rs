//! The model × style × quality × item grid.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use super::{infer, prepare, stimuli, Cache, CacheKey, ModelEndpoint, Templates};
use crate::error::{Error, Result};
use crate::marker::{MarkerStyle, StyleSet};
use crate::model::{Compression, EvalDataset, EvalRecord, TaskItem};
use crate::store::ImageStore;

/// Inputs shared by every endpoint of a sweep.
pub struct SweepPlan<'a> {
    pub dataset: &'a EvalDataset,
    pub styles: &'a StyleSet,
    pub compressions: &'a [Compression],
    pub store: &'a dyn ImageStore,
    pub templates: &'a Templates,
    pub seed: u64,
}

#[derive(Debug, Default)]
struct Counters {
    calls: AtomicU64,
    hits: AtomicU64,
    unparsed: AtomicU64,
    failures: AtomicU64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SweepStats {
    pub cells: u64,
    /// Cells answered by an endpoint (synthetic or remote) rather than the cache.
    pub endpoint_calls: u64,
    pub cache_hits: u64,
    pub unparsed: u64,
    /// Records carrying a transport or rendering error.
    pub failures: u64,
}

/// Grid cells for one model in output order: style (default first), then
/// quality, then item.
pub fn grid_cells<'a>(plan: &SweepPlan<'a>) -> Vec<(&'a MarkerStyle, Compression, &'a TaskItem)> {
    let mut cells = Vec::with_capacity(plan.styles.all().count() * plan.compressions.len() * plan.dataset.items.len());
    for style in plan.styles.all() {
        for &q in plan.compressions {
            for item in &plan.dataset.items {
                cells.push((style, q, item));
            }
        }
    }
    cells
}

fn validate(endpoints: &[ModelEndpoint], plan: &SweepPlan) -> Result<()> {
    if endpoints.is_empty() {
        return Err(Error::ConfigInvalid("no endpoints configured".into()));
    }
    let mut ids = BTreeSet::new();
    for e in endpoints {
        e.validate()?;
        if !ids.insert(e.model_id.as_str()) {
            return Err(Error::ConfigInvalid(format!("duplicate model_id {}", e.model_id)));
        }
    }
    if plan.compressions.is_empty() {
        return Err(Error::ConfigInvalid("no compression settings".into()));
    }
    let unique: BTreeSet<_> = plan.compressions.iter().collect();
    if unique.len() != plan.compressions.len() {
        return Err(Error::ConfigInvalid("duplicate compression settings".into()));
    }
    plan.styles.validate()
}

/// Runs every endpoint over the full grid; exactly one record per cell.
///
/// Cached cells are served without contacting the endpoint. Every fresh
/// record without an error is written to the cache as soon as it completes,
/// so an interrupted sweep resumes where it stopped.
pub fn run_sweep(endpoints: &[ModelEndpoint], plan: &SweepPlan, cache: Option<&Cache>) -> Result<(Vec<EvalRecord>, SweepStats)> {
    validate(endpoints, plan)?;
    let cells = grid_cells(plan);
    let counters = Counters::default();
    let mut records = Vec::with_capacity(cells.len() * endpoints.len());
    for endpoint in endpoints {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(endpoint.max_parallel)
            .build()
            .map_err(|e| Error::ConfigInvalid(format!("thread pool: {e}")))?;
        let batch: Result<Vec<EvalRecord>> = pool.install(|| {
            cells
                .par_iter()
                .map(|&(style, q, item)| run_cell(endpoint, plan, cache, &counters, style, q, item))
                .collect()
        });
        records.extend(batch?);
    }
    let stats = SweepStats {
        cells: records.len() as u64,
        endpoint_calls: counters.calls.into_inner(),
        cache_hits: counters.hits.into_inner(),
        unparsed: counters.unparsed.into_inner(),
        failures: counters.failures.into_inner(),
    };
    Ok((records, stats))
}

fn run_cell(
    endpoint: &ModelEndpoint,
    plan: &SweepPlan,
    cache: Option<&Cache>,
    counters: &Counters,
    style: &MarkerStyle,
    q: Compression,
    item: &TaskItem,
) -> Result<EvalRecord> {
    let prepared = prepare(item, style, q, plan.templates);
    let key = CacheKey {
        model_id: endpoint.model_id.clone(),
        item_id: item.id.clone(),
        style_id: style.style_id.clone(),
        jpeg_quality: q,
        prompt_hash: prepared.prompt.hash.clone(),
    };
    if let Some(c) = cache {
        if let Some(hit) = c.get(&key)? {
            counters.hits.fetch_add(1, Ordering::Relaxed);
            if hit.parsed_answer.is_none() {
                counters.unparsed.fetch_add(1, Ordering::Relaxed);
            }
            return Ok(hit);
        }
    }
    let images = if endpoint.needs_images() {
        match stimuli(item, style, q, plan.store) {
            Ok(images) => images,
            Err(e) => {
                log::warn!("{}: cannot render {} under {}: {e}", endpoint.model_id, item.id, prepared.condition);
                counters.failures.fetch_add(1, Ordering::Relaxed);
                counters.unparsed.fetch_add(1, Ordering::Relaxed);
                let mut r = infer(endpoint, &prepared, &[], plan.seed);
                r.raw_response.clear();
                r.parsed_answer = None;
                r.correct = false;
                r.error = Some(format!("render: {e}"));
                return Ok(r);
            }
        }
    } else {
        Vec::new()
    };
    counters.calls.fetch_add(1, Ordering::Relaxed);
    let record = infer(endpoint, &prepared, &images, plan.seed);
    if record.parsed_answer.is_none() {
        counters.unparsed.fetch_add(1, Ordering::Relaxed);
    }
    if record.error.is_some() {
        counters.failures.fetch_add(1, Ordering::Relaxed);
    } else if let Some(c) = cache {
        c.put(&record)?;
    }
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infer::SyntheticProfile;
    use crate::marker::canonical_style_set;
    use crate::synth::synthetic_dataset;

    #[test]
    fn grid_arithmetic_and_resume() {
        let (d, store) = synthetic_dataset("g", 3, 64, 4);
        let styles = canonical_style_set();
        let levels = Compression::standard_levels();
        let templates = Templates::default();
        let plan = SweepPlan { dataset: &d, styles: &styles, compressions: &levels, store: &store, templates: &templates, seed: 1 };
        let endpoints = vec![
            ModelEndpoint::synthetic("m1", SyntheticProfile::constant(0.7)),
            ModelEndpoint::synthetic("m2", SyntheticProfile::constant(0.6)),
        ];
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        let (first, stats) = run_sweep(&endpoints, &plan, Some(&cache)).unwrap();
        assert_eq!(first.len(), 408);
        assert_eq!(stats.endpoint_calls, 408);
        let (second, stats) = run_sweep(&endpoints, &plan, Some(&cache)).unwrap();
        assert_eq!(stats.endpoint_calls, 0);
        assert_eq!(stats.cache_hits, 408);
        assert!(second.iter().all(|r| r.cached));
        for (a, b) in first.iter().zip(&second) {
            let mut b = b.clone();
            b.cached = false;
            assert_eq!(*a, b);
        }
    }

    #[test]
    fn partial_cache_resumes() {
        let (d, store) = synthetic_dataset("g", 4, 64, 4);
        let mut styles = canonical_style_set();
        styles.variants.truncate(1);
        let levels = [Compression::Passthrough];
        let templates = Templates::default();
        let plan = SweepPlan { dataset: &d, styles: &styles, compressions: &levels, store: &store, templates: &templates, seed: 1 };
        let endpoints = vec![ModelEndpoint::synthetic("m", SyntheticProfile::constant(0.5))];
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        let (all, _) = run_sweep(&endpoints, &plan, None).unwrap();
        for r in &all[..3] {
            cache.put(r).unwrap();
        }
        let (_, stats) = run_sweep(&endpoints, &plan, Some(&cache)).unwrap();
        assert_eq!((stats.cache_hits, stats.endpoint_calls), (3, 5));
    }

    #[test]
    fn rejects_duplicate_models() {
        let (d, store) = synthetic_dataset("g", 2, 64, 4);
        let styles = canonical_style_set();
        let levels = [Compression::Passthrough];
        let templates = Templates::default();
        let plan = SweepPlan { dataset: &d, styles: &styles, compressions: &levels, store: &store, templates: &templates, seed: 1 };
        let e = ModelEndpoint::synthetic("m", SyntheticProfile::constant(0.5));
        assert!(matches!(run_sweep(&[e.clone(), e], &plan, None), Err(Error::ConfigInvalid(_))));
    }
}
