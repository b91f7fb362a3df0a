//! OpenAI-compatible chat-completions transport with retry.

use std::time::Duration;

use base64::Engine;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::prompt::RenderedPrompt;
use super::Stimulus;

fn default_attempts() -> u32 {
    4
}

fn default_backoff() -> Vec<u64> {
    vec![500, 2_000, 8_000]
}

/// Attempts per call and the wait before each retry.
///
/// The wait before retry `k` (1-based) is `backoff_ms[min(k, len) - 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RetryPolicy {
    #[serde(default = "default_attempts")]
    pub max_attempts: u32,
    #[serde(default = "default_backoff")]
    pub backoff_ms: Vec<u64>,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { max_attempts: default_attempts(), backoff_ms: default_backoff() }
    }
}

impl RetryPolicy {
    pub fn delay_before_retry(&self, retry: u32) -> Duration {
        let idx = (retry.max(1) as usize - 1).min(self.backoff_ms.len().saturating_sub(1));
        Duration::from_millis(self.backoff_ms.get(idx).copied().unwrap_or(0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HttpChat {
    /// Base URL up to but excluding `/chat/completions`.
    pub base_url: String,
    /// Model name sent in the request body; defaults to the endpoint's model id.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub api_model: Option<String>,
    /// Environment variable holding the bearer token.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub api_key_env: Option<String>,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: u32,
}

fn default_max_tokens() -> u32 {
    64
}

/// Why a call produced no usable text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CallError {
    Retryable(String),
    Fatal(String),
}

impl CallError {
    pub fn message(&self) -> &str {
        match self {
            CallError::Retryable(m) | CallError::Fatal(m) => m,
        }
    }
}

pub fn request_body(model: &str, prompt: &RenderedPrompt, images: &[Stimulus], max_tokens: u32) -> Value {
    let mut content = vec![json!({"type": "text", "text": prompt.user})];
    for img in images {
        let data = base64::engine::general_purpose::STANDARD.encode(&img.bytes);
        content.push(json!({
            "type": "image_url",
            "image_url": {"url": format!("data:{};base64,{data}", img.mime)}
        }));
    }
    json!({
        "model": model,
        "temperature": 0,
        "max_tokens": max_tokens,
        "messages": [
            {"role": "system", "content": prompt.system},
            {"role": "user", "content": content}
        ]
    })
}

/// Text of the first choice; accepts string or content-part array forms.
pub fn response_text(body: &Value) -> Option<String> {
    let content = body.get("choices")?.get(0)?.get("message")?.get("content")?;
    match content {
        Value::String(s) => Some(s.clone()),
        Value::Array(parts) => Some(
            parts
                .iter()
                .filter_map(|p| p.get("text").and_then(Value::as_str))
                .collect::<Vec<_>>()
                .join(""),
        ),
        _ => None,
    }
}

impl HttpChat {
    pub fn url(&self) -> String {
        format!("{}/chat/completions", self.base_url.trim_end_matches('/'))
    }

    /// The credential, if one is configured. Missing variables are an error.
    pub fn api_key(&self) -> Result<Option<String>, String> {
        match &self.api_key_env {
            None => Ok(None),
            Some(var) => std::env::var(var)
                .map(Some)
                .map_err(|_| format!("environment variable {var} is not set")),
        }
    }

    fn attempt(&self, agent: &ureq::Agent, key: Option<&str>, body: &[u8]) -> Result<String, CallError> {
        let mut req = agent.post(self.url()).header("Content-Type", "application/json");
        if let Some(k) = key {
            req = req.header("Authorization", format!("Bearer {k}"));
        }
        let mut resp = req.send(body).map_err(|e| CallError::Retryable(e.to_string()))?;
        let status = resp.status().as_u16();
        let text = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| CallError::Retryable(e.to_string()))?;
        if status == 429 || status >= 500 {
            return Err(CallError::Retryable(format!("HTTP {status}")));
        }
        if status >= 400 {
            return Err(CallError::Fatal(format!("HTTP {status}: {}", text.chars().take(200).collect::<String>())));
        }
        let value: Value = serde_json::from_str(&text).map_err(|e| CallError::Fatal(format!("bad JSON: {e}")))?;
        response_text(&value).ok_or_else(|| CallError::Fatal("response has no message content".into()))
    }

    /// Sends one prompt, retrying per `retry`; returns the reply text.
    pub fn complete(
        &self,
        model_id: &str,
        prompt: &RenderedPrompt,
        images: &[Stimulus],
        timeout: Duration,
        retry: &RetryPolicy,
    ) -> Result<String, CallError> {
        let key = self.api_key().map_err(CallError::Fatal)?;
        let model = self.api_model.as_deref().unwrap_or(model_id);
        let body = serde_json::to_vec(&request_body(model, prompt, images, self.max_tokens)).expect("JSON values serialise");
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        let mut last = CallError::Fatal("no attempts configured".into());
        for attempt in 0..retry.max_attempts.max(1) {
            if attempt > 0 {
                std::thread::sleep(retry.delay_before_retry(attempt));
            }
            match self.attempt(&agent, key.as_deref(), &body) {
                Ok(text) => return Ok(text),
                Err(e @ CallError::Fatal(_)) => return Err(e),
                Err(e) => {
                    log::warn!("{model_id}: attempt {} failed: {}", attempt + 1, e.message());
                    last = e;
                }
            }
        }
        Err(last)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::{BufRead, BufReader, Read, Write};
    use std::net::TcpListener;
    use std::sync::{Arc, Mutex};

    /// Serves the canned `(status, body)` responses in order, recording request bodies.
    fn mock(responses: Vec<(u16, String)>) -> (String, Arc<Mutex<Vec<String>>>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}/v1", listener.local_addr().unwrap());
        let seen = Arc::new(Mutex::new(Vec::new()));
        let log = seen.clone();
        std::thread::spawn(move || {
            for (status, body) in responses {
                let (stream, _) = listener.accept().unwrap();
                let mut reader = BufReader::new(stream);
                let mut len = 0usize;
                loop {
                    let mut line = String::new();
                    reader.read_line(&mut line).unwrap();
                    if line == "\r\n" || line.is_empty() {
                        break;
                    }
                    let lower = line.to_ascii_lowercase();
                    if let Some(v) = lower.strip_prefix("content-length:") {
                        len = v.trim().parse().unwrap();
                    }
                }
                let mut buf = vec![0u8; len];
                reader.read_exact(&mut buf).unwrap();
                log.lock().unwrap().push(String::from_utf8(buf).unwrap());
                let mut stream = reader.into_inner();
                write!(
                    stream,
                    "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                    body.len()
                )
                .unwrap();
            }
        });
        (url, seen)
    }

    fn prompt() -> RenderedPrompt {
        RenderedPrompt { system: "sys".into(), user: "Which? Choices: (A), (B).".into(), hash: "h".into() }
    }

    fn ok_body(text: &str) -> String {
        json!({"choices": [{"message": {"role": "assistant", "content": text}}]}).to_string()
    }

    fn fast() -> RetryPolicy {
        RetryPolicy { max_attempts: 3, backoff_ms: vec![1] }
    }

    #[test]
    fn retries_then_succeeds() {
        let (url, seen) = mock(vec![(429, "{}".into()), (503, "{}".into()), (200, ok_body("The answer is (B)."))]);
        let chat = HttpChat { base_url: url, api_model: None, api_key_env: None, max_tokens: 16 };
        let img = Stimulus { mime: "image/png", bytes: vec![1, 2, 3] };
        let text = chat.complete("m", &prompt(), &[img], Duration::from_secs(5), &fast()).unwrap();
        assert_eq!(text, "The answer is (B).");
        let seen = seen.lock().unwrap();
        assert_eq!(seen.len(), 3);
        let body: Value = serde_json::from_str(&seen[2]).unwrap();
        assert_eq!(body["model"], "m");
        assert_eq!(body["temperature"], 0);
        assert_eq!(body["messages"][1]["content"][1]["image_url"]["url"], "data:image/png;base64,AQID");
    }

    #[test]
    fn client_errors_are_not_retried() {
        let (url, seen) = mock(vec![(400, "{\"error\":\"bad\"}".into())]);
        let chat = HttpChat { base_url: url, api_model: Some("x".into()), api_key_env: None, max_tokens: 16 };
        let err = chat.complete("m", &prompt(), &[], Duration::from_secs(5), &fast()).unwrap_err();
        assert!(matches!(err, CallError::Fatal(_)));
        assert_eq!(seen.lock().unwrap().len(), 1);
    }

    #[test]
    fn exhausted_retries() {
        let (url, _) = mock(vec![(500, "{}".into()), (500, "{}".into()), (500, "{}".into())]);
        let chat = HttpChat { base_url: url, api_model: None, api_key_env: None, max_tokens: 16 };
        let err = chat.complete("m", &prompt(), &[], Duration::from_secs(5), &fast()).unwrap_err();
        assert_eq!(err, CallError::Retryable("HTTP 500".into()));
    }

    #[test]
    fn content_part_arrays() {
        let v = json!({"choices": [{"message": {"content": [{"type": "text", "text": "(A)"}]}}]});
        assert_eq!(response_text(&v).as_deref(), Some("(A)"));
        assert_eq!(response_text(&json!({})), None);
    }

    #[test]
    fn backoff_schedule() {
        let p = RetryPolicy { max_attempts: 5, backoff_ms: vec![10, 20] };
        assert_eq!(p.delay_before_retry(1), Duration::from_millis(10));
        assert_eq!(p.delay_before_retry(4), Duration::from_millis(20));
    }
}
