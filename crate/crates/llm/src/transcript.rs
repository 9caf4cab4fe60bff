//! Append-only transcript records, stored as JSON lines.

use std::io::Write;
use std::path::Path;

use entropybench_core::formats::InputFormat;
use entropybench_core::shuffle::{parse_trials, TrialDiagnostics};
use entropybench_core::sources::{ingest_text, IngestDiagnostics, SampleSource};
use entropybench_core::IntegerSample;
use serde::{Deserialize, Serialize};

use crate::config::PromptConfig;
use crate::error::{LlmError, Result};
use crate::wire::{ChatMessage, Role};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TranscriptKind {
    Integers,
    Shuffles,
    ToolLoop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub requested: usize,
    pub received: usize,
    pub shortfall: usize,
    /// True when fewer values than requested were obtained.
    pub partial: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aborted: Option<String>,
}

/// One line of a transcript file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum Record {
    Meta {
        label: String,
        kind: TranscriptKind,
        config: PromptConfig,
        requested: usize,
        /// Largest integer (integers, tool loop) or card count (shuffles).
        bound: u64,
        /// Tool source, when values are served locally.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tool_source: Option<SampleSource>,
        started_ms: u64,
    },
    Exchange {
        index: usize,
        batch: usize,
        /// Values or shuffles asked for by this request.
        asked: usize,
        sent_ms: u64,
        request: Vec<ChatMessage>,
        response: ChatMessage,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        finish_reason: Option<String>,
    },
    ToolCall {
        exchange: usize,
        call_id: String,
        name: String,
        arguments: String,
        served: Vec<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        error: Option<String>,
    },
    Failure {
        exchange: usize,
        message: String,
    },
    Outcome(Outcome),
}

pub(crate) fn now_ms() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Transcript {
    records: Vec<Record>,
}

impl Transcript {
    pub fn new(meta: Record) -> Result<Self> {
        if !matches!(meta, Record::Meta { .. }) {
            return Err(LlmError::Transcript("first record must be meta".into()));
        }
        Ok(Transcript { records: vec![meta] })
    }

    pub fn push(&mut self, record: Record) {
        self.records.push(record);
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn label(&self) -> &str {
        match &self.records[0] {
            Record::Meta { label, .. } => label,
            _ => unreachable!("validated on construction"),
        }
    }

    pub fn kind(&self) -> TranscriptKind {
        match &self.records[0] {
            Record::Meta { kind, .. } => *kind,
            _ => unreachable!("validated on construction"),
        }
    }

    pub fn bound(&self) -> u64 {
        match &self.records[0] {
            Record::Meta { bound, .. } => *bound,
            _ => unreachable!("validated on construction"),
        }
    }

    pub fn exchanges(&self) -> impl Iterator<Item = (&[ChatMessage], &ChatMessage)> {
        self.records.iter().filter_map(|r| match r {
            Record::Exchange { request, response, .. } => Some((request.as_slice(), response)),
            _ => None,
        })
    }

    pub fn exchange_count(&self) -> usize {
        self.exchanges().count()
    }

    /// Every value served by the tool, in call order.
    pub fn tool_values(&self) -> Vec<u64> {
        self.records
            .iter()
            .flat_map(|r| match r {
                Record::ToolCall { served, .. } => served.as_slice(),
                _ => &[],
            })
            .copied()
            .collect()
    }

    /// Text written by the model, one assistant reply per paragraph. Tool
    /// results are not included.
    pub fn model_text(&self) -> String {
        self.exchanges()
            .map(|(_, r)| r)
            .filter(|r| r.role == Role::Assistant)
            .map(|r| r.content_str())
            .collect::<Vec<_>>()
            .join("\n\n")
    }

    /// The most recent outcome; a resumed transcript carries one per run.
    pub fn outcome(&self) -> Option<&Outcome> {
        self.records.iter().rev().find_map(|r| match r {
            Record::Outcome(o) => Some(o),
            _ => None,
        })
    }

    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for record in &self.records {
            out.push_str(&serde_json::to_string(record)?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let records = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                serde_json::from_str(l).map_err(|e| LlmError::Transcript(format!("line {}: {e}", i + 1)))
            })
            .collect::<Result<Vec<Record>>>()?;
        match records.first() {
            Some(Record::Meta { .. }) => Ok(Transcript { records }),
            _ => Err(LlmError::Transcript("missing meta record".into())),
        }
    }

    /// Writes to a temporary sibling and renames it over `path`.
    pub fn save(&self, path: &Path) -> Result<()> {
        let io = |e| LlmError::Core(entropybench_core::Error::io(path, e));
        let tmp = path.with_extension("jsonl.tmp");
        let mut file = std::fs::File::create(&tmp).map_err(io)?;
        file.write_all(self.to_jsonl()?.as_bytes()).map_err(io)?;
        file.sync_all().map_err(io)?;
        std::fs::rename(&tmp, path).map_err(io)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = entropybench_core::formats::read_text(path)?;
        Self::from_jsonl(&text)
    }

    pub fn source(&self) -> SampleSource {
        SampleSource::inline(self.label())
    }
}

/// Integers the model wrote, extracted leniently from its replies.
pub fn integers_from_transcript(transcript: &Transcript, max: u64) -> Result<(IntegerSample, IngestDiagnostics)> {
    Ok(ingest_text(
        &transcript.model_text(),
        max,
        false,
        InputFormat::Lines,
        transcript.source(),
    )?)
}

/// Shuffles the model wrote. Rows inside code blocks are ignored.
pub fn trials_from_transcript(
    transcript: &Transcript,
    n: usize,
) -> Result<(Vec<Vec<usize>>, TrialDiagnostics)> {
    let requested = transcript.outcome().map(|o| o.requested);
    Ok(parse_trials(&transcript.model_text(), n, requested)?)
}
