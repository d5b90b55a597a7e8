use std::fs;
use std::path::PathBuf;
use std::time::Duration;

use anyhow::Context;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputHash {
    pub path: PathBuf,
    pub sha256: String,
}

/// Everything needed to replay a run and check that it reproduced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub args: Vec<String>,
    pub inputs: Vec<InputHash>,
    pub output_sha256: String,
    pub threads: usize,
    pub wall_time_ms: u128,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    pub fn new(
        inputs: &[PathBuf],
        output: &[u8],
        elapsed: Duration,
        threads: usize,
    ) -> anyhow::Result<Self> {
        let inputs = inputs
            .iter()
            .map(|p| {
                let bytes = fs::read(p).with_context(|| format!("hashing {}", p.display()))?;
                Ok(InputHash {
                    path: p.clone(),
                    sha256: sha256_hex(&bytes),
                })
            })
            .collect::<anyhow::Result<_>>()?;
        Ok(RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            args: std::env::args().skip(1).collect(),
            inputs,
            output_sha256: sha256_hex(output),
            threads,
            wall_time_ms: elapsed.as_millis(),
        })
    }
}
