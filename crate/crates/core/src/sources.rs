//! Sample sources: local reference generators, synthetic biased controls and
//! recorded transcripts.
//!
//! In JSON a source is `{"label": ..., "kind": ..., "params": {...}}`, the form
//! accepted under `"sources"` in the battery configuration.

use std::path::{Path, PathBuf};

use rand::rngs::OsRng;
use rand::{Rng, RngCore, SeedableRng, TryRngCore};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::bits::IntegerSample;
use crate::error::{Error, Result};
use crate::formats::{self, InputFormat};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSource {
    pub label: String,
    #[serde(flatten)]
    pub kind: SourceKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum SourceKind {
    /// Operating-system entropy, rejection-sampled per value.
    OsEntropy,
    /// ChaCha20 keyed from the OS, values drawn below the bound by rejection.
    CryptoBelow,
    /// ChaCha20 with a fixed seed; reproducible.
    SeededDeterministic { seed: u64 },
    /// Synthetic negative control.
    Biased {
        profile: BiasProfile,
        #[serde(default)]
        seed: u64,
    },
    FileTranscript {
        path: PathBuf,
        #[serde(default)]
        strict: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        format: Option<InputFormat>,
    },
    LlmLive { endpoint: String, model: String },
    /// Values supplied directly by the caller.
    Inline,
}

/// Distortions applied by [`SourceKind::Biased`]. These are invented fixtures
/// for validating the battery, never real generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum BiasProfile {
    /// Every value equals `value`.
    Constant { value: u64 },
    /// With probability `mass` the value is uniform on `[floor, max]`,
    /// otherwise uniform on `[0, max]`.
    TopHeavy { mass: f64, floor: u64 },
    /// With probability `mass` the value is uniform on
    /// `[center - half_width, center + half_width]`.
    Cluster {
        center: u64,
        half_width: u64,
        mass: f64,
    },
    /// Uniform on `[low, high]` only.
    Truncated { low: u64, high: u64 },
}

impl SourceKind {
    pub fn name(&self) -> &'static str {
        match self {
            SourceKind::OsEntropy => "os_entropy",
            SourceKind::CryptoBelow => "crypto_below",
            SourceKind::SeededDeterministic { .. } => "seeded_deterministic",
            SourceKind::Biased { .. } => "biased",
            SourceKind::FileTranscript { .. } => "file_transcript",
            SourceKind::LlmLive { .. } => "llm_live",
            SourceKind::Inline => "inline",
        }
    }
}

impl SampleSource {
    pub fn new(label: impl Into<String>, kind: SourceKind) -> Self {
        SampleSource {
            label: label.into(),
            kind,
        }
    }

    pub fn inline(label: impl Into<String>) -> Self {
        Self::new(label, SourceKind::Inline)
    }

    pub fn os_entropy() -> Self {
        Self::new("os_entropy", SourceKind::OsEntropy)
    }

    pub fn crypto_below() -> Self {
        Self::new("crypto_below", SourceKind::CryptoBelow)
    }

    pub fn seeded(seed: u64) -> Self {
        Self::new(format!("seeded_{seed}"), SourceKind::SeededDeterministic { seed })
    }

    pub fn biased(label: impl Into<String>, profile: BiasProfile, seed: u64) -> Self {
        Self::new(label, SourceKind::Biased { profile, seed })
    }

    pub fn file(path: impl Into<PathBuf>) -> Self {
        let path = path.into();
        Self::new(
            path.display().to_string(),
            SourceKind::FileTranscript {
                path,
                strict: false,
                format: None,
            },
        )
    }

    pub fn is_synthetic(&self) -> bool {
        matches!(self.kind, SourceKind::Biased { .. })
    }

    /// Label as printed in reports; synthetic controls are always marked.
    pub fn display_label(&self) -> String {
        if self.is_synthetic() {
            format!("{} [synthetic]", self.label)
        } else {
            self.label.clone()
        }
    }

    pub fn generates(&self) -> bool {
        matches!(
            self.kind,
            SourceKind::OsEntropy
                | SourceKind::CryptoBelow
                | SourceKind::SeededDeterministic { .. }
                | SourceKind::Biased { .. }
        )
    }
}

/// Draws `count` integers in `[0, max]` from a generating source.
pub fn draw_integers(source: &SampleSource, count: usize, max: u64) -> Result<IntegerSample> {
    if count == 0 {
        return Err(Error::InvalidParameter("count must be at least 1".into()));
    }
    if max == 0 {
        return Err(Error::InvalidParameter("max must be at least 1".into()));
    }
    let values = match &source.kind {
        SourceKind::OsEntropy => {
            let mut rng = OsRng.unwrap_err();
            (0..count).map(|_| below(&mut rng, max)).collect()
        }
        SourceKind::CryptoBelow => {
            let mut rng = ChaCha20Rng::try_from_os_rng().map_err(|e| Error::Entropy(e.to_string()))?;
            (0..count).map(|_| below(&mut rng, max)).collect()
        }
        SourceKind::SeededDeterministic { seed } => {
            let mut rng = ChaCha20Rng::seed_from_u64(*seed);
            (0..count).map(|_| below(&mut rng, max)).collect()
        }
        SourceKind::Biased { profile, seed } => {
            let mut rng = ChaCha20Rng::seed_from_u64(*seed);
            draw_biased(&mut rng, profile, count, max)?
        }
        other => return Err(Error::UnsupportedSource(other.name().into())),
    };
    Ok(IntegerSample::new(values, max)?.with_source(source.clone()))
}

/// Uniform value in `[0, max]` from the smallest sufficient bit count,
/// redrawing anything above `max`. No modulo reduction is involved.
pub fn below<R: RngCore + ?Sized>(rng: &mut R, max: u64) -> u64 {
    let bits = 64 - max.leading_zeros();
    let mask = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
    loop {
        let candidate = rng.next_u64() & mask;
        if candidate <= max {
            return candidate;
        }
    }
}

fn draw_biased<R: RngCore>(rng: &mut R, profile: &BiasProfile, count: usize, max: u64) -> Result<Vec<u64>> {
    let check_mass = |mass: f64| {
        if (0.0..=1.0).contains(&mass) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("bias mass {mass} outside [0, 1]")))
        }
    };
    let in_range = |lo: u64, hi: u64| {
        if lo <= hi && hi <= max {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("bias range [{lo}, {hi}] not inside [0, {max}]")))
        }
    };
    let values = match *profile {
        BiasProfile::Constant { value } => {
            in_range(value, value)?;
            vec![value; count]
        }
        BiasProfile::TopHeavy { mass, floor } => {
            check_mass(mass)?;
            in_range(floor, max)?;
            (0..count)
                .map(|_| {
                    if rng.random_bool(mass) {
                        floor + below(rng, max - floor)
                    } else {
                        below(rng, max)
                    }
                })
                .collect()
        }
        BiasProfile::Cluster {
            center,
            half_width,
            mass,
        } => {
            check_mass(mass)?;
            let lo = center.saturating_sub(half_width);
            let hi = center.saturating_add(half_width).min(max);
            in_range(lo, hi)?;
            (0..count)
                .map(|_| {
                    if rng.random_bool(mass) {
                        lo + below(rng, hi - lo)
                    } else {
                        below(rng, max)
                    }
                })
                .collect()
        }
        BiasProfile::Truncated { low, high } => {
            in_range(low, high)?;
            (0..count).map(|_| low + below(rng, high - low)).collect()
        }
    };
    Ok(values)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestDiagnostics {
    pub extracted: usize,
    pub dropped_over_max: usize,
}

/// Reads an integer transcript. Lenient mode extracts every decimal digit run
/// and drops values above `max`; strict mode parses the declared format and
/// rejects anything out of range.
pub fn ingest_transcript(
    path: &Path,
    max: u64,
    strict: bool,
    format: Option<InputFormat>,
) -> Result<(IntegerSample, IngestDiagnostics)> {
    let text = formats::read_text(path)?;
    let format = format.unwrap_or_else(|| InputFormat::sniff(path));
    let source = SampleSource::new(
        path.display().to_string(),
        SourceKind::FileTranscript {
            path: path.to_path_buf(),
            strict,
            format: Some(format),
        },
    );
    ingest_text(&text, max, strict, format, source)
}

pub fn ingest_text(
    text: &str,
    max: u64,
    strict: bool,
    format: InputFormat,
    source: SampleSource,
) -> Result<(IntegerSample, IngestDiagnostics)> {
    let (values, dropped) = if strict {
        let values = formats::parse_integers_strict(text, format)?;
        if let Some(v) = values.iter().find(|&&v| v > max) {
            return Err(Error::Parse(format!("value {v} exceeds maximum {max}")));
        }
        (values, 0)
    } else {
        let ex = formats::extract_digit_runs(text, max);
        (ex.values, ex.dropped_over_max)
    };
    if values.is_empty() {
        return Err(Error::Empty(source.label.clone()));
    }
    let diagnostics = IngestDiagnostics {
        extracted: values.len(),
        dropped_over_max: dropped,
    };
    Ok((IntegerSample::new(values, max)?.with_source(source), diagnostics))
}

/// Loads a sample from any source that can produce one without a network.
pub fn load_sample(source: &SampleSource, count: usize, max: u64) -> Result<(IntegerSample, IngestDiagnostics)> {
    match &source.kind {
        SourceKind::FileTranscript { path, strict, format } => {
            let (sample, diag) = ingest_transcript(path, max, *strict, *format)?;
            Ok((sample.with_source(source.clone()), diag))
        }
        _ => {
            let sample = draw_integers(source, count, max)?;
            let diag = IngestDiagnostics {
                extracted: sample.len(),
                dropped_over_max: 0,
            };
            Ok((sample, diag))
        }
    }
}

/// Newline-delimited serialization, readable by [`ingest_transcript`].
pub fn to_lines(sample: &IntegerSample) -> String {
    let mut out = String::with_capacity(sample.len() * 4);
    for v in sample.values() {
        out.push_str(&v.to_string());
        out.push('\n');
    }
    out
}
