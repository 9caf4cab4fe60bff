use serde::{Deserialize, Serialize};

/// Environment variable holding the bearer token. Keys are never read from
/// configuration files and never written to transcripts.
pub const API_KEY_ENV: &str = "ENTROPYBENCH_API_KEY";

/// `{count}` and `{max}` are substituted per request.
pub const INTEGER_PROMPT: &str =
    "Can you please create {count} random positive integers in decimal format, the highest of which is {max}.";

/// `{n}`, `{last}` and `{count}` are substituted per request.
pub const SHUFFLE_PROMPT: &str = "Shuffle a deck of {n} cards labeled 0 to {last}. Give {count} independent \
shuffles, one per line, each listing all {n} labels separated by commas. Do not write code or explain \
anything; output only the shuffled decks.";

pub const SYSTEM_PROMPT: &str = "You are a true random number generator. You will be asked to generate random \
numbers in JSON format. Do not give any code or ideas. Only the answer.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionMode {
    /// Every prompt starts a new conversation.
    #[default]
    Fresh,
    /// Prompts are appended to the accumulated conversation.
    Continued,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToolMode {
    #[default]
    None,
    RngTool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Endpoint {
    /// Base URL; requests go to `{base_url}/chat/completions`.
    pub base_url: String,
    pub model: String,
}

impl Endpoint {
    pub fn completions_url(&self) -> String {
        format!("{}/chat/completions", self.base_url.trim_end_matches('/'))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestParams {
    #[serde(default)]
    pub temperature: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_tokens: Option<u32>,
}

impl Default for RequestParams {
    fn default() -> Self {
        RequestParams {
            temperature: 0.0,
            max_tokens: None,
        }
    }
}

/// Pagination, pacing and retry limits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct RequestPolicy {
    /// Integers asked for per request.
    pub batch_size: usize,
    /// Shuffles asked for per request.
    pub shuffle_batch_size: usize,
    pub min_interval_ms: u64,
    /// Retries per request on throttling, server or network errors.
    pub max_retries: u32,
    pub backoff_ms: u64,
    pub max_backoff_ms: u64,
    /// Consecutive replies without new values before giving up.
    pub max_stalled: u32,
    pub tool_iteration_cap: u32,
    /// Largest `count` a single tool call may ask for.
    pub max_tool_count: u64,
    pub timeout_s: u64,
}

impl Default for RequestPolicy {
    fn default() -> Self {
        RequestPolicy {
            batch_size: 500,
            shuffle_batch_size: 50,
            min_interval_ms: 1000,
            max_retries: 4,
            backoff_ms: 1000,
            max_backoff_ms: 30_000,
            max_stalled: 3,
            tool_iteration_cap: 20,
            max_tool_count: 100_000,
            timeout_s: 120,
        }
    }
}

impl RequestPolicy {
    /// No pacing or backoff delays, for stubs and local servers.
    pub fn immediate() -> Self {
        RequestPolicy {
            min_interval_ms: 0,
            backoff_ms: 0,
            max_backoff_ms: 0,
            ..RequestPolicy::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptConfig {
    pub endpoint: Endpoint,
    /// Overrides the operation's default template.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub user_prompt: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system_prompt: Option<String>,
    #[serde(default)]
    pub session_mode: SessionMode,
    #[serde(default)]
    pub tool_mode: ToolMode,
    #[serde(default)]
    pub params: RequestParams,
    #[serde(default)]
    pub policy: RequestPolicy,
}

impl PromptConfig {
    pub fn new(base_url: impl Into<String>, model: impl Into<String>) -> Self {
        PromptConfig {
            endpoint: Endpoint {
                base_url: base_url.into(),
                model: model.into(),
            },
            user_prompt: None,
            system_prompt: None,
            session_mode: SessionMode::default(),
            tool_mode: ToolMode::default(),
            params: RequestParams::default(),
            policy: RequestPolicy::default(),
        }
    }

    pub(crate) fn integer_prompt(&self, count: usize, max: u64) -> String {
        self.user_prompt
            .as_deref()
            .unwrap_or(INTEGER_PROMPT)
            .replace("{count}", &count.to_string())
            .replace("{max}", &max.to_string())
    }

    pub(crate) fn shuffle_prompt(&self, n: usize, count: usize) -> String {
        self.user_prompt
            .as_deref()
            .unwrap_or(SHUFFLE_PROMPT)
            .replace("{n}", &n.to_string())
            .replace("{last}", &(n - 1).to_string())
            .replace("{count}", &count.to_string())
    }
}
