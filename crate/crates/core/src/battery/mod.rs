//! The nine-test statistical battery.
//!
//! Each test maps a [`BitSequence`] (or, for the sign test, an
//! [`IntegerSample`]) to one or two p-values. [`run_battery`] runs all of them,
//! converts precondition failures into SKIPPED entries and orders the results
//! by test name so reports are stable regardless of scheduling.

pub mod constants;
mod complexity;
mod frequency;
mod rank;
mod runs;
mod serial;
mod sign;
mod spectral;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use complexity::{berlekamp_massey, linear_complexity};
pub use frequency::{block_frequency, monobit};
pub use rank::{binary_rank, gf2_rank};
pub use runs::{longest_run_of_ones, runs};
pub use serial::{pattern_counts, serial};
pub use sign::sign_test;
pub use spectral::spectral;

use crate::bits::{BitSequence, IntegerSample};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::sources::SampleSource;
use crate::verdict::{classify_with, Precedence, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    Monobit,
    BlockFrequency,
    Runs,
    LongestRunOfOnes,
    BinaryRank,
    LinearComplexity,
    Serial,
    Spectral,
    Sign,
}

impl TestKind {
    pub const ALL: [TestKind; 9] = [
        TestKind::Monobit,
        TestKind::BlockFrequency,
        TestKind::Runs,
        TestKind::LongestRunOfOnes,
        TestKind::BinaryRank,
        TestKind::LinearComplexity,
        TestKind::Serial,
        TestKind::Spectral,
        TestKind::Sign,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestKind::Monobit => "monobit",
            TestKind::BlockFrequency => "block_frequency",
            TestKind::Runs => "runs",
            TestKind::LongestRunOfOnes => "longest_run_of_ones",
            TestKind::BinaryRank => "binary_rank",
            TestKind::LinearComplexity => "linear_complexity",
            TestKind::Serial => "serial",
            TestKind::Spectral => "spectral",
            TestKind::Sign => "sign",
        }
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One test's outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub test_name: TestKind,
    pub p_values: Vec<f64>,
    /// s_obs, chi-square, V_n or d depending on the test.
    pub statistic: f64,
    pub verdicts: Vec<Verdict>,
    pub n_used: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

impl TestResult {
    pub fn from_p_values(
        test_name: TestKind,
        p_values: Vec<f64>,
        statistic: f64,
        n_used: usize,
        diagnostics: Vec<String>,
    ) -> Result<Self> {
        if !statistic.is_finite() {
            return Err(Error::Domain(format!("{test_name}: non-finite statistic")));
        }
        let p_values: Vec<f64> = p_values.into_iter().map(|p| p.clamp(0.0, 1.0)).collect();
        let verdicts = p_values
            .iter()
            .map(|&p| classify_with(p, Precedence::default()))
            .collect::<Result<Vec<_>>>()?;
        Ok(TestResult {
            test_name,
            p_values,
            statistic,
            verdicts,
            n_used,
            diagnostics,
        })
    }

    pub fn skipped(test_name: TestKind, reason: impl Into<String>, n: usize) -> Self {
        TestResult {
            test_name,
            p_values: Vec::new(),
            statistic: 0.0,
            verdicts: vec![Verdict::skipped()],
            n_used: n,
            diagnostics: vec![reason.into()],
        }
    }

    pub fn is_skipped(&self) -> bool {
        self.p_values.is_empty()
    }

    pub fn reclassify(&mut self, precedence: Precedence) {
        if self.is_skipped() {
            return;
        }
        self.verdicts = self
            .p_values
            .iter()
            .map(|&p| classify_with(p, precedence).expect("p-values are clamped to [0, 1]"))
            .collect();
    }
}

pub(crate) fn warn_if_short(diagnostics: &mut Vec<String>, n: usize, recommended: usize) {
    if n < recommended {
        diagnostics.push(format!("n = {n} below recommended minimum {recommended}"));
    }
}

/// Pearson chi-square of `counts` against `total * probabilities`.
pub(crate) fn chi_square(counts: &[usize], probabilities: &[f64], total: usize) -> f64 {
    counts
        .iter()
        .zip(probabilities)
        .map(|(&c, &p)| {
            let expected = total as f64 * p;
            (c as f64 - expected).powi(2) / expected
        })
        .sum()
}

fn default_block_frequency_m() -> usize {
    128
}
fn default_serial_m() -> usize {
    5
}
fn default_linear_complexity_m() -> usize {
    500
}
fn default_bit_width() -> u32 {
    8
}
fn default_sample_count() -> usize {
    10_000
}
fn default_max() -> u64 {
    255
}

/// Battery parameters, read from the JSON configuration document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryConfig {
    #[serde(rename = "block_frequency_M", default = "default_block_frequency_m")]
    pub block_frequency_m: usize,
    #[serde(default = "default_serial_m")]
    pub serial_m: usize,
    #[serde(rename = "linear_complexity_M", default = "default_linear_complexity_m")]
    pub linear_complexity_m: usize,
    #[serde(default = "default_bit_width")]
    pub bit_width: u32,
    /// Values drawn per generating source.
    #[serde(default = "default_sample_count")]
    pub sample_count: usize,
    /// Inclusive upper bound of generated and ingested values.
    #[serde(default = "default_max")]
    pub max: u64,
    #[serde(default)]
    pub precedence: Precedence,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sources: Vec<SampleSource>,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig {
            block_frequency_m: default_block_frequency_m(),
            serial_m: default_serial_m(),
            linear_complexity_m: default_linear_complexity_m(),
            bit_width: default_bit_width(),
            sample_count: default_sample_count(),
            max: default_max(),
            precedence: Precedence::default(),
            sources: Vec::new(),
        }
    }
}

fn run_one(kind: TestKind, seq: &BitSequence, sample: Option<&IntegerSample>, config: &BatteryConfig) -> TestResult {
    let outcome = match kind {
        TestKind::Monobit => monobit(seq),
        TestKind::BlockFrequency => block_frequency(seq, config.block_frequency_m),
        TestKind::Runs => runs(seq),
        TestKind::LongestRunOfOnes => longest_run_of_ones(seq),
        TestKind::BinaryRank => binary_rank(seq),
        TestKind::LinearComplexity => linear_complexity(seq, config.linear_complexity_m),
        TestKind::Serial => serial(seq, config.serial_m),
        TestKind::Spectral => spectral(seq),
        TestKind::Sign => match sample {
            Some(sample) => sign_test(sample),
            None => unreachable!("sign test only scheduled with a sample"),
        },
    };
    match outcome {
        Ok(mut result) => {
            result.reclassify(config.precedence);
            result
        }
        Err(e) => TestResult::skipped(kind, e.to_string(), seq.len()),
    }
}

/// Runs every test (the sign test only when `sample` is given). Results are
/// sorted by test name.
pub fn run_battery(
    seq: &BitSequence,
    sample: Option<&IntegerSample>,
    config: &BatteryConfig,
    exec: Execution,
) -> Vec<TestResult> {
    let kinds: Vec<TestKind> = TestKind::ALL
        .into_iter()
        .filter(|k| *k != TestKind::Sign || sample.is_some())
        .collect();
    let mut results = exec.map(&kinds, |&kind| run_one(kind, seq, sample, config));
    results.sort_by(|a, b| a.test_name.name().cmp(b.test_name.name()));
    results
}

/// Converts a sample to bits with the configured width and runs the battery
/// with the sign test included.
pub fn run_battery_on_sample(
    sample: &IntegerSample,
    config: &BatteryConfig,
    exec: Execution,
) -> Result<Vec<TestResult>> {
    let seq = crate::bits::from_integers(sample, config.bit_width)?;
    Ok(run_battery(&seq, Some(sample), config, exec))
}

/// Batteries over many independent samples. Samples are spread across
/// workers; each battery runs its tests sequentially.
pub fn run_batteries(
    samples: &[IntegerSample],
    config: &BatteryConfig,
    exec: Execution,
) -> Result<Vec<Vec<TestResult>>> {
    exec.map(samples, |s| run_battery_on_sample(s, config, Execution::Sequential))
        .into_iter()
        .collect()
}
