//! Chat-completions wire types, the transport trait and an HTTP client.

use std::io::Write;
use std::sync::Mutex;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::RaterConfig;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: String,
    pub content: String,
}

impl Message {
    pub fn system(content: impl Into<String>) -> Self {
        Message { role: "system".into(), content: content.into() }
    }
    pub fn user(content: impl Into<String>) -> Self {
        Message { role: "user".into(), content: content.into() }
    }
    pub fn assistant(content: impl Into<String>) -> Self {
        Message { role: "assistant".into(), content: content.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<Message>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub temperature: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransportError {
    #[error("HTTP status {status}: {body}")]
    Status { status: u16, body: String },
    #[error("network error: {0}")]
    Network(String),
    #[error("malformed response: {0}")]
    Protocol(String),
}

impl TransportError {
    /// Rate limiting, server errors and network failures are retried.
    pub fn is_retryable(&self) -> bool {
        match self {
            TransportError::Status { status, .. } => *status == 429 || (500..600).contains(status),
            TransportError::Network(_) => true,
            TransportError::Protocol(_) => false,
        }
    }
}

/// Sends one chat request and returns the assistant's reply text.
pub trait ChatTransport: Send + Sync {
    fn complete(&self, request: &ChatRequest) -> Result<String, TransportError>;
}

/// Extract `choices[0].message.content` from a chat-completions body.
pub fn parse_completion(body: &str) -> Result<String, TransportError> {
    let v: serde_json::Value = serde_json::from_str(body).map_err(|e| TransportError::Protocol(e.to_string()))?;
    v.pointer("/choices/0/message/content")
        .and_then(|c| c.as_str())
        .map(str::to_string)
        .ok_or_else(|| TransportError::Protocol("no choices[0].message.content".into()))
}

/// Blocking HTTP transport for chat-completions endpoints.
pub struct HttpTransport {
    client: reqwest::blocking::Client,
    url: String,
    api_key: Option<String>,
}

impl HttpTransport {
    /// The API key is read from the environment variable named in the
    /// config; without it no `Authorization` header is sent.
    pub fn from_config(cfg: &RaterConfig) -> Result<Self, TransportError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(cfg.request_timeout_secs))
            .build()
            .map_err(|e| TransportError::Network(e.to_string()))?;
        let api_key = std::env::var(&cfg.api_key_env_var).ok().filter(|k| !k.is_empty());
        Ok(HttpTransport { client, url: cfg.endpoint_url.clone(), api_key })
    }
}

impl ChatTransport for HttpTransport {
    fn complete(&self, request: &ChatRequest) -> Result<String, TransportError> {
        let mut req = self.client.post(&self.url).json(request);
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| TransportError::Network(e.to_string()))?;
        let status = resp.status().as_u16();
        let body = resp.text().map_err(|e| TransportError::Network(e.to_string()))?;
        if !(200..300).contains(&status) {
            return Err(TransportError::Status { status, body });
        }
        parse_completion(&body)
    }
}

/// JSONL audit log of every request attempt.
pub struct RequestLog {
    sink: Option<Mutex<Box<dyn Write + Send>>>,
}

impl RequestLog {
    pub fn disabled() -> Self {
        RequestLog { sink: None }
    }

    pub fn new(w: impl Write + Send + 'static) -> Self {
        RequestLog { sink: Some(Mutex::new(Box::new(w))) }
    }

    pub fn record(&self, context: &serde_json::Value, attempt: u32, request: &ChatRequest, outcome: &Result<String, TransportError>) {
        let Some(sink) = &self.sink else { return };
        let ts = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0);
        let (response, error) = match outcome {
            Ok(text) => (Some(text.as_str()), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let line = json!({
            "timestamp_ms": ts,
            "context": context,
            "attempt": attempt,
            "request": request,
            "response": response,
            "error": error,
        });
        let mut w = sink.lock().expect("log lock");
        let _ = writeln!(w, "{line}");
        let _ = w.flush();
    }
}

/// Delay before retry `attempt` (0-based): base · 2^attempt, capped.
pub fn backoff_delay(cfg: &RaterConfig, attempt: u32) -> Duration {
    let ms = cfg.backoff_base_ms.saturating_mul(1u64 << attempt.min(20));
    Duration::from_millis(ms.min(cfg.backoff_max_ms))
}

/// Send with retries on retryable transport errors.
pub fn send_with_retry(
    transport: &dyn ChatTransport,
    request: &ChatRequest,
    cfg: &RaterConfig,
    log: &RequestLog,
    context: &serde_json::Value,
) -> Result<String, TransportError> {
    let mut attempt = 0;
    loop {
        let outcome = transport.complete(request);
        log.record(context, attempt, request, &outcome);
        match outcome {
            Err(e) if e.is_retryable() && attempt < cfg.max_retries => {
                std::thread::sleep(backoff_delay(cfg, attempt));
                attempt += 1;
            }
            other => return other,
        }
    }
}
