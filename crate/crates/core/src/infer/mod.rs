//! Model endpoints, prompting, answer parsing, caching and grid sweeps.

pub mod cache;
pub mod http;
pub mod parse;
pub mod prompt;
pub mod synthetic;
mod sweep;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use cache::{Cache, CacheKey};
pub use http::{HttpChat, RetryPolicy};
pub use parse::parse_answer;
pub use prompt::{prompt_hash, PromptTemplate, RenderedPrompt};
pub use sweep::{grid_cells, run_sweep, SweepPlan, SweepStats};
pub use synthetic::{synthetic_choice, CellAccuracy, SyntheticProfile};

use crate::error::{Error, Result};
use crate::jpeg::encode_rgb;
use crate::marker::{display_labels, encode_png, render_item, MarkerStyle};
use crate::model::{Compression, Condition, EvalRecord, TaskItem, TaskKind};
use crate::store::ImageStore;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Transport {
    HttpChat(HttpChat),
    Synthetic {
        #[serde(default)]
        profile: SyntheticProfile,
    },
}

fn default_parallel() -> usize {
    1
}

fn default_timeout() -> u64 {
    60
}

/// One model under evaluation and how to reach it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelEndpoint {
    pub model_id: String,
    pub transport: Transport,
    #[serde(default = "default_parallel")]
    pub max_parallel: usize,
    #[serde(default = "default_timeout")]
    pub timeout_s: u64,
    #[serde(default)]
    pub retry: RetryPolicy,
}

impl ModelEndpoint {
    pub fn synthetic(model_id: &str, profile: SyntheticProfile) -> Self {
        ModelEndpoint {
            model_id: model_id.into(),
            transport: Transport::Synthetic { profile },
            max_parallel: 4,
            timeout_s: default_timeout(),
            retry: RetryPolicy::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.model_id.trim().is_empty() {
            return Err(Error::ConfigInvalid("endpoint with empty model_id".into()));
        }
        if self.max_parallel < 1 {
            return Err(Error::ConfigInvalid(format!("{}: max_parallel must be at least 1", self.model_id)));
        }
        match &self.transport {
            Transport::Synthetic { profile } => profile.validate(),
            Transport::HttpChat(h) => {
                if !(h.base_url.starts_with("http://") || h.base_url.starts_with("https://")) {
                    return Err(Error::ConfigInvalid(format!("{}: base_url must be http(s)", self.model_id)));
                }
                Ok(())
            }
        }
    }

    /// Synthetic responders never look at pixels.
    pub fn needs_images(&self) -> bool {
        matches!(self.transport, Transport::HttpChat(_))
    }
}

/// One encoded image as sent to an endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stimulus {
    pub mime: &'static str,
    pub bytes: Vec<u8>,
}

/// Prompt templates per task kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Templates {
    pub relative_depth: PromptTemplate,
    pub semantic_correspondence: PromptTemplate,
}

impl Default for Templates {
    fn default() -> Self {
        Templates {
            relative_depth: PromptTemplate::default_for(TaskKind::RelativeDepth),
            semantic_correspondence: PromptTemplate::default_for(TaskKind::SemanticCorrespondence),
        }
    }
}

impl Templates {
    pub fn for_kind(&self, kind: TaskKind) -> &PromptTemplate {
        match kind {
            TaskKind::RelativeDepth => &self.relative_depth,
            TaskKind::SemanticCorrespondence => &self.semantic_correspondence,
        }
    }
}

/// Everything about a cell that does not depend on the model.
#[derive(Debug, Clone)]
pub struct Prepared<'a> {
    pub item: &'a TaskItem,
    pub condition: Condition,
    /// `(choice id, displayed text)` per candidate.
    pub display: Vec<(String, String)>,
    pub prompt: RenderedPrompt,
}

pub fn prepare<'a>(item: &'a TaskItem, style: &MarkerStyle, quality: Compression, templates: &Templates) -> Prepared<'a> {
    let display = display_labels(item, style.label_scheme);
    let texts: Vec<String> = display.iter().map(|(_, t)| t.clone()).collect();
    let reference = item.reference().map(|_| style.label_scheme.reference_text());
    let prompt = templates.for_kind(item.task_kind).render(&texts, reference);
    Prepared {
        item,
        condition: Condition::new(style.style_id.clone(), quality),
        display,
        prompt,
    }
}

/// Renders `item` with `style` and encodes it per `quality`.
///
/// Passthrough sends lossless PNG; JPEG levels encode the rendered pixels.
pub fn stimuli(item: &TaskItem, style: &MarkerStyle, quality: Compression, store: &dyn ImageStore) -> Result<Vec<Stimulus>> {
    render_item(item, style, store)?
        .iter()
        .map(|img| match quality {
            Compression::Passthrough => Ok(Stimulus { mime: "image/png", bytes: encode_png(img)? }),
            Compression::Jpeg(q) => Ok(Stimulus { mime: "image/jpeg", bytes: encode_rgb(img, q) }),
        })
        .collect()
}

fn finish(endpoint: &ModelEndpoint, p: &Prepared, raw: String, latency_ms: u64, error: Option<String>) -> EvalRecord {
    let texts: Vec<String> = p.display.iter().map(|(_, t)| t.clone()).collect();
    let parsed = parse_answer(&raw, &texts)
        .and_then(|t| p.display.iter().find(|(_, d)| *d == t).map(|(c, _)| c.clone()));
    EvalRecord {
        model_id: endpoint.model_id.clone(),
        item_id: p.item.id.clone(),
        style_id: p.condition.style_id.clone(),
        jpeg_quality: p.condition.jpeg_quality,
        correct: parsed.as_deref() == Some(p.item.gold_label.as_str()),
        parsed_answer: parsed,
        raw_response: raw,
        latency_ms,
        cached: false,
        prompt_hash: p.prompt.hash.clone(),
        error,
    }
}

/// Queries `endpoint` for one prepared cell. Never fails: transport problems
/// become an Unparsed record carrying an error note.
pub fn infer(endpoint: &ModelEndpoint, p: &Prepared, images: &[Stimulus], seed: u64) -> EvalRecord {
    match &endpoint.transport {
        Transport::Synthetic { profile } => {
            let choice = synthetic_choice(profile, &endpoint.model_id, p.item, &p.condition, seed);
            let text = p
                .display
                .iter()
                .find(|(c, _)| *c == choice)
                .map(|(_, t)| t.clone())
                .unwrap_or(choice);
            finish(endpoint, p, format!("The answer is ({text})."), 0, None)
        }
        Transport::HttpChat(chat) => {
            let start = Instant::now();
            let outcome = chat.complete(
                &endpoint.model_id,
                &p.prompt,
                images,
                Duration::from_secs(endpoint.timeout_s),
                &endpoint.retry,
            );
            let ms = start.elapsed().as_millis() as u64;
            match outcome {
                Ok(raw) => finish(endpoint, p, raw, ms, None),
                Err(e) => {
                    log::warn!("{} on {}: {}", endpoint.model_id, p.item.id, e.message());
                    finish(endpoint, p, String::new(), ms, Some(e.message().to_string()))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marker::canonical_style_set;
    use crate::synth::synthetic_dataset;

    #[test]
    fn synthetic_records_follow_profile() {
        let (d, _) = synthetic_dataset("t", 20, 64, 2);
        let styles = canonical_style_set();
        let t = Templates::default();
        let perfect = ModelEndpoint::synthetic("good", SyntheticProfile::constant(1.0));
        let hopeless = ModelEndpoint::synthetic("bad", SyntheticProfile::constant(0.0));
        for style in styles.all() {
            for item in &d.items {
                let p = prepare(item, style, Compression::Jpeg(70), &t);
                let r = infer(&perfect, &p, &[], 9);
                assert!(r.correct, "{} {}", style.style_id, r.raw_response);
                assert_eq!(r.parsed_answer.as_deref(), Some(item.gold_label.as_str()));
                let r = infer(&hopeless, &p, &[], 9);
                assert!(!r.correct);
                assert!(r.parsed_answer.is_some());
            }
        }
    }

    #[test]
    fn endpoint_config_parses() {
        let json = r#"{"model_id": "m", "transport": {"kind": "synthetic", "profile": {"base": 0.7}}, "max_parallel": 2}"#;
        let e: ModelEndpoint = serde_json::from_str(json).unwrap();
        assert_eq!(e.max_parallel, 2);
        e.validate().unwrap();
        let bad = r#"{"model_id": "m", "transport": {"kind": "synthetic"}, "max_paralel": 2}"#;
        assert!(serde_json::from_str::<ModelEndpoint>(bad).is_err());
        let http = r#"{"model_id": "m", "transport": {"kind": "http_chat", "base_url": "http://x", "api_key_env": "K"}}"#;
        assert!(serde_json::from_str::<ModelEndpoint>(http).unwrap().needs_images());
    }

    #[test]
    fn numeric_scheme_maps_back_to_choice_ids() {
        let (d, _) = synthetic_dataset("t", 3, 64, 2);
        let styles = canonical_style_set();
        let p = prepare(&d.items[2], &styles.default, Compression::Passthrough, &Templates::default());
        assert!(p.prompt.user.contains("(1), (2), (3), (4)"));
        assert!(p.prompt.user.contains("labelled 0"));
        let e = ModelEndpoint::synthetic("m", SyntheticProfile::constant(1.0));
        assert_eq!(infer(&e, &p, &[], 1).parsed_answer.as_deref(), Some(d.items[2].gold_label.as_str()));
    }
}
