use std::path::{Path, PathBuf};

use entropybench_core::sources::{load_sample, IngestDiagnostics, SourceKind};
use entropybench_core::{IntegerSample, SampleSource};
use entropybench_llm::{integers_from_transcript, Transcript};

use crate::cli::Format;

use crate::config::CliConfig;
use crate::error::Result;

pub mod battery;
pub mod gen;
pub mod llm;
pub mod passwords;
pub mod shuffle;

pub struct Context {
    pub out: PathBuf,
    pub strict: bool,
    pub config: CliConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    /// Some inputs failed or came back short.
    Partial,
    AllFailed,
}

impl Status {
    pub fn from_counts(succeeded: usize, failed: usize) -> Self {
        match (succeeded, failed) {
            (_, 0) => Status::Success,
            (0, _) => Status::AllFailed,
            _ => Status::Partial,
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::Partial => 1,
            Status::AllFailed => 3,
        }
    }
}

/// What a command prints, one rendering per `--format`.
pub struct Rendered {
    pub json: String,
    pub text: String,
    pub csv: String,
    pub status: Status,
}

impl Rendered {
    pub fn select(&self, format: Format) -> &str {
        match format {
            Format::Json => &self.json,
            Format::Text => &self.text,
            Format::Csv => &self.csv,
        }
    }
}

pub fn is_transcript(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("jsonl"))
}

/// Loads integers from a generator, an integer file, or a stored transcript.
pub fn load_integers(
    source: &SampleSource,
    count: usize,
    max: u64,
) -> std::result::Result<(IntegerSample, IngestDiagnostics), String> {
    if let SourceKind::FileTranscript { path, .. } = &source.kind {
        if is_transcript(path) {
            let transcript = Transcript::load(path).map_err(|e| e.to_string())?;
            let (sample, diag) = integers_from_transcript(&transcript, max).map_err(|e| e.to_string())?;
            return Ok((sample.with_source(source.clone()), diag));
        }
    }
    load_sample(source, count, max).map_err(|e| e.to_string())
}

/// Text of a password or trial input; transcripts contribute the model's replies.
pub fn read_input_text(path: &Path) -> Result<String> {
    if is_transcript(path) {
        Ok(Transcript::load(path)?.model_text())
    } else {
        Ok(entropybench_core::formats::read_text(path)?)
    }
}
