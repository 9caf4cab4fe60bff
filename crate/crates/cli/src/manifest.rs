use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
    pub bytes: u64,
}

/// Everything needed to rerun a command. Timestamps live here and only here,
/// so reports stay byte-identical across reruns.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub args: Vec<String>,
    pub config: serde_json::Value,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<PathBuf>,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
}

fn now_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis())
}

impl RunManifest {
    pub fn start(subcommand: &str, config: serde_json::Value) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.to_owned(),
            args: std::env::args().collect(),
            config,
            inputs: Vec::new(),
            outputs: Vec::new(),
            started_unix_ms: now_ms(),
            finished_unix_ms: 0,
        }
    }

    pub fn file_name(subcommand: &str) -> String {
        format!("{subcommand}.manifest.json")
    }

    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        self.inputs.push(InputDigest {
            path: path.to_owned(),
            sha256: format!("{:x}", Sha256::digest(&bytes)),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    pub fn finish(mut self, out: &Path) -> Result<PathBuf> {
        self.finished_unix_ms = now_ms();
        let path = out.join(Self::file_name(&self.subcommand));
        crate::output::write_file(&path, &(serde_json::to_string_pretty(&self)? + "\n"))?;
        Ok(path)
    }
}
