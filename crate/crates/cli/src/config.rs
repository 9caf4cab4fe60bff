use std::path::Path;

use entropybench_core::battery::BatteryConfig;
use entropybench_core::chars::CharEncoding;
use entropybench_core::shuffle::SweepMode;
use entropybench_core::sources::{BiasProfile, SampleSource};
use entropybench_llm::PromptConfig;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Rows of the reference convergence table.
pub const DEFAULT_ROUNDS: [usize; 9] = [128, 256, 512, 786, 1024, 1280, 1536, 1792, 2048];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShuffleConfig {
    pub n: usize,
    pub rounds: Vec<usize>,
    pub seeds: usize,
    pub seed: u64,
    pub mode: SweepMode,
}

impl Default for ShuffleConfig {
    fn default() -> Self {
        ShuffleConfig {
            n: 10,
            rounds: DEFAULT_ROUNDS.to_vec(),
            seeds: 20,
            seed: 0,
            mode: SweepMode::Cumulative,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PasswordConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alphabet: Option<String>,
    pub min_len: usize,
    pub encoding: CharEncoding,
}

impl Default for PasswordConfig {
    fn default() -> Self {
        PasswordConfig {
            alphabet: None,
            min_len: 3,
            encoding: CharEncoding::default(),
        }
    }
}

/// The `--config` document. Battery keys sit at the top level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct CliConfig {
    #[serde(flatten)]
    pub battery: BatteryConfig,
    #[serde(default)]
    pub shuffle: ShuffleConfig,
    #[serde(default)]
    pub passwords: PasswordConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub llm: Option<PromptConfig>,
}

impl CliConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(CliConfig::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

fn field<T: std::str::FromStr>(spec: &str, parts: &[&str], i: usize) -> Result<T> {
    parts
        .get(i)
        .ok_or_else(|| CliError::Usage(format!("source {spec:?} is missing field {}", i + 1)))?
        .parse()
        .map_err(|_| CliError::Usage(format!("source {spec:?}: cannot parse {:?}", parts[i])))
}

fn seed_at(spec: &str, parts: &[&str], i: usize) -> Result<u64> {
    if parts.len() > i {
        field(spec, parts, i)
    } else {
        Ok(0)
    }
}

/// Parses the `--source` shorthand.
pub fn parse_source(spec: &str) -> Result<SampleSource> {
    let parts: Vec<&str> = spec.split(':').collect();
    let arity = |n: std::ops::RangeInclusive<usize>| {
        if n.contains(&parts.len()) {
            Ok(())
        } else {
            Err(CliError::Usage(format!("source {spec:?} has the wrong number of fields")))
        }
    };
    let source = match parts[0] {
        "os_entropy" => {
            arity(1..=1)?;
            SampleSource::os_entropy()
        }
        "crypto_below" => {
            arity(1..=1)?;
            SampleSource::crypto_below()
        }
        "seeded" => {
            arity(2..=2)?;
            SampleSource::seeded(field(spec, &parts, 1)?)
        }
        "constant" => {
            arity(2..=2)?;
            let value = field(spec, &parts, 1)?;
            SampleSource::biased(format!("constant_{value}"), BiasProfile::Constant { value }, 0)
        }
        "top_heavy" => {
            arity(3..=4)?;
            let profile = BiasProfile::TopHeavy {
                mass: field(spec, &parts, 1)?,
                floor: field(spec, &parts, 2)?,
            };
            SampleSource::biased(spec.replace(':', "_"), profile, seed_at(spec, &parts, 3)?)
        }
        "cluster" => {
            arity(4..=5)?;
            let profile = BiasProfile::Cluster {
                center: field(spec, &parts, 1)?,
                half_width: field(spec, &parts, 2)?,
                mass: field(spec, &parts, 3)?,
            };
            SampleSource::biased(spec.replace(':', "_"), profile, seed_at(spec, &parts, 4)?)
        }
        "truncated" => {
            arity(3..=4)?;
            let profile = BiasProfile::Truncated {
                low: field(spec, &parts, 1)?,
                high: field(spec, &parts, 2)?,
            };
            SampleSource::biased(spec.replace(':', "_"), profile, seed_at(spec, &parts, 3)?)
        }
        other => return Err(CliError::Usage(format!("unknown source kind {other:?}"))),
    };
    Ok(source)
}
