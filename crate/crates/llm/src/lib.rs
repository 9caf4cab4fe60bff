//! Client for chat-completion endpoints that asks models for random integers,
//! card shuffles or tool-assisted draws, and records every exchange to an
//! append-only JSON-lines transcript.
//!
//! Scoring never talks to the network: transcripts are stored first and later
//! turned into samples with [`integers_from_transcript`] or
//! [`trials_from_transcript`].

mod config;
mod error;
mod harness;
mod tool;
mod transcript;
pub mod transport;
pub mod wire;

pub use config::{
    Endpoint, PromptConfig, RequestParams, RequestPolicy, SessionMode, ToolMode, API_KEY_ENV, INTEGER_PROMPT,
    SHUFFLE_PROMPT, SYSTEM_PROMPT,
};
pub use error::{LlmError, Result};
pub use harness::{request_integers, request_shuffles, run_tool_loop};
pub use tool::{random_int_spec, RandomIntArgs, ToolServer, TOOL_NAME};
pub use transcript::{
    integers_from_transcript, trials_from_transcript, Outcome, Record, Transcript, TranscriptKind,
};
