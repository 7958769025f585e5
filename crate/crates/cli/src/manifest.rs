use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use qcrystal::{rng, Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::args::Cli;

pub const MANIFEST_SCHEMA: &str = "qcrystal/manifest/1";
pub const MANIFEST_SUFFIX: &str = ".manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub seed: u64,
    pub rng_algorithm: String,
    pub timestamp_unix: u64,
    /// Complete parsed invocation, defaults included.
    pub invocation: Cli,
    pub outputs: Vec<OutputRecord>,
}

impl RunManifest {
    pub fn new(invocation: &Cli, outputs: Vec<OutputRecord>) -> Self {
        Self {
            schema: MANIFEST_SCHEMA.into(),
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            subcommand: invocation.command.name().into(),
            seed: invocation.common.seed,
            rng_algorithm: rng::RNG_ALGORITHM.into(),
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            invocation: invocation.clone(),
            outputs,
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        let manifest: Self = serde_json::from_str(&text)
            .map_err(|e| Error::Configuration(format!("{}: {e}", path.display())))?;
        if manifest.schema != MANIFEST_SCHEMA {
            return Err(Error::Configuration(format!(
                "unsupported manifest schema `{}`",
                manifest.schema
            )));
        }
        Ok(manifest)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Configuration(format!("cannot serialize manifest: {e}")))?;
        std::fs::write(path, text + "\n").map_err(|e| io_error(path, e))
    }
}

pub fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// `<path><suffix>`, e.g. `run.csv` → `run.csv.manifest.json`.
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}
