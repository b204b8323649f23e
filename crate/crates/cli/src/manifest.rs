//! Run manifests: what was run, with which configuration, and what it wrote.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub subcommand: String,
    pub config: Value,
    pub config_hash: String,
    pub seed: Option<u64>,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub outputs: Vec<String>,
}

/// SHA-256 of the subcommand and its canonical JSON configuration.
/// `serde_json` keeps object keys sorted, so the serialization is stable.
pub fn config_hash(subcommand: &str, config: &Value) -> String {
    let mut h = Sha256::new();
    h.update(subcommand.as_bytes());
    h.update([0]);
    h.update(config.to_string().as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

impl Manifest {
    pub fn new(subcommand: &str, config: Value, seed: Option<u64>) -> Self {
        let config_hash = config_hash(subcommand, &config);
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Self {
            subcommand: subcommand.to_owned(),
            config,
            config_hash,
            seed,
            version: env!("CARGO_PKG_VERSION").to_owned(),
            timestamp,
            outputs: Vec::new(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: not a manifest: {e}", path.display())))
    }
}

/// Output directory guarded by its manifest.
pub struct OutputDir {
    pub dir: PathBuf,
    manifest: Manifest,
}

impl OutputDir {
    /// Creates `dir` and checks that any manifest already there was written
    /// for the same configuration. A mismatch is refused unless `force`.
    pub fn prepare(dir: &Path, manifest: Manifest, force: bool) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let existing = dir.join(MANIFEST_FILE);
        if existing.exists() && !force {
            let old = Manifest::load(&existing)?;
            if old.subcommand != manifest.subcommand || old.config_hash != manifest.config_hash {
                return Err(CliError::Config(format!(
                    "{} holds outputs of a different configuration ({} {}); pass --force to overwrite",
                    dir.display(),
                    old.subcommand,
                    &old.config_hash[..12.min(old.config_hash.len())]
                )));
            }
        }
        Ok(Self { dir: dir.to_owned(), manifest })
    }

    /// Path for an output file, recorded in the manifest.
    pub fn file(&mut self, name: &str) -> PathBuf {
        if !self.manifest.outputs.iter().any(|o| o == name) {
            self.manifest.outputs.push(name.to_owned());
        }
        self.dir.join(name)
    }

    pub fn finish(self) -> Result<Manifest, CliError> {
        let path = self.dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
        Ok(self.manifest)
    }
}
