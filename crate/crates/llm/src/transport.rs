//! How requests reach a model: over HTTP, or from a scripted queue for
//! offline runs and tests.

use std::collections::VecDeque;
use std::time::Duration;

use thiserror::Error;

use crate::config::{Endpoint, API_KEY_ENV};
use crate::error::{LlmError, Result};
use crate::wire::{ChatMessage, ChatRequest, ChatResponse};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransportError {
    #[error("throttled (HTTP 429)")]
    Throttled { retry_after: Option<Duration> },
    #[error("server error {status}: {body}")]
    Server { status: u16, body: String },
    #[error("network error: {0}")]
    Network(String),
    #[error("unauthorized {status}: {body}")]
    Unauthorized { status: u16, body: String },
    #[error("request rejected {status}: {body}")]
    Rejected { status: u16, body: String },
    #[error("malformed response: {0}")]
    Malformed(String),
}

impl TransportError {
    pub fn is_retryable(&self) -> bool {
        matches!(
            self,
            TransportError::Throttled { .. } | TransportError::Server { .. } | TransportError::Network(_)
        )
    }
}

pub trait ChatTransport {
    fn complete(&mut self, request: &ChatRequest) -> std::result::Result<ChatResponse, TransportError>;
}

impl<T: ChatTransport + ?Sized> ChatTransport for &mut T {
    fn complete(&mut self, request: &ChatRequest) -> std::result::Result<ChatResponse, TransportError> {
        (**self).complete(request)
    }
}

/// Blocking HTTPS client for OpenAI-compatible `/chat/completions` endpoints.
pub struct HttpTransport {
    agent: ureq::Agent,
    url: String,
    api_key: String,
}

impl std::fmt::Debug for HttpTransport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HttpTransport").field("url", &self.url).finish_non_exhaustive()
    }
}

impl HttpTransport {
    /// Reads the key from [`API_KEY_ENV`]. Fails before any request is made
    /// when the variable is missing or empty.
    pub fn from_env(endpoint: &Endpoint, timeout: Duration) -> Result<Self> {
        Self::from_lookup(endpoint, timeout, |name| std::env::var(name).ok())
    }

    pub fn from_lookup(
        endpoint: &Endpoint,
        timeout: Duration,
        lookup: impl FnOnce(&str) -> Option<String>,
    ) -> Result<Self> {
        let key = lookup(API_KEY_ENV)
            .filter(|k| !k.trim().is_empty())
            .ok_or_else(|| LlmError::Config(format!("set {API_KEY_ENV} to the endpoint's API key")))?;
        Self::new(endpoint, key, timeout)
    }

    pub fn new(endpoint: &Endpoint, api_key: String, timeout: Duration) -> Result<Self> {
        if !(endpoint.base_url.starts_with("http://") || endpoint.base_url.starts_with("https://")) {
            return Err(LlmError::Config(format!(
                "endpoint base URL must start with http:// or https://, got {:?}",
                endpoint.base_url
            )));
        }
        let config = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(timeout))
            .build();
        Ok(HttpTransport {
            agent: ureq::Agent::new_with_config(config),
            url: endpoint.completions_url(),
            api_key,
        })
    }
}

impl ChatTransport for HttpTransport {
    fn complete(&mut self, request: &ChatRequest) -> std::result::Result<ChatResponse, TransportError> {
        let body = serde_json::to_string(request).map_err(|e| TransportError::Malformed(e.to_string()))?;
        let mut response = self
            .agent
            .post(&self.url)
            .header("Authorization", format!("Bearer {}", self.api_key))
            .content_type("application/json")
            .send(body.as_str())
            .map_err(|e| TransportError::Network(e.to_string()))?;
        let status = response.status().as_u16();
        let retry_after = response
            .headers()
            .get("retry-after")
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.trim().parse::<u64>().ok())
            .map(Duration::from_secs);
        let text = response
            .body_mut()
            .read_to_string()
            .map_err(|e| TransportError::Network(e.to_string()))?;
        match status {
            200..=299 => serde_json::from_str(&text).map_err(|e| TransportError::Malformed(e.to_string())),
            401 | 403 => Err(TransportError::Unauthorized { status, body: text }),
            429 => Err(TransportError::Throttled { retry_after }),
            500..=599 => Err(TransportError::Server { status, body: text }),
            _ => Err(TransportError::Rejected { status, body: text }),
        }
    }
}

/// Replies from a fixed queue and keeps every request it received.
#[derive(Debug, Default)]
pub struct ScriptedTransport {
    replies: VecDeque<std::result::Result<ChatResponse, TransportError>>,
    /// Reply used once the queue is empty.
    fallback: Option<ChatResponse>,
    pub requests: Vec<ChatRequest>,
}

impl ScriptedTransport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reply(mut self, content: impl Into<String>) -> Self {
        self.replies
            .push_back(Ok(ChatResponse::reply(ChatMessage::assistant(content))));
        self
    }

    pub fn respond(mut self, response: ChatResponse) -> Self {
        self.replies.push_back(Ok(response));
        self
    }

    pub fn fail(mut self, error: TransportError) -> Self {
        self.replies.push_back(Err(error));
        self
    }

    pub fn otherwise(mut self, response: ChatResponse) -> Self {
        self.fallback = Some(response);
        self
    }
}

impl ChatTransport for ScriptedTransport {
    fn complete(&mut self, request: &ChatRequest) -> std::result::Result<ChatResponse, TransportError> {
        self.requests.push(request.clone());
        match self.replies.pop_front() {
            Some(reply) => reply,
            None => self
                .fallback
                .clone()
                .ok_or_else(|| TransportError::Network("scripted transport exhausted".into())),
        }
    }
}
