//! CSV formatting, output files and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::{GffError, Result};

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

/// Comma-separated table with a header row and LF line endings.
#[derive(Debug, Clone, Default)]
pub struct Csv {
    buf: String,
    width: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut c = Self { buf: String::new(), width: header.len() };
        c.push_raw(header.iter().map(|s| s.to_string()));
        c
    }

    pub fn row(&mut self, fields: impl IntoIterator<Item = String>) {
        let fields: Vec<String> = fields.into_iter().collect();
        assert_eq!(fields.len(), self.width, "csv row width");
        self.push_raw(fields);
    }

    fn push_raw(&mut self, fields: impl IntoIterator<Item = String>) {
        for (i, f) in fields.into_iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            self.buf.push_str(&f);
        }
        self.buf.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.buf
    }

    pub fn into_string(self) -> String {
        self.buf
    }
}

fn unix_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputFile {
    pub stage: String,
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Provenance of one run. `manifest_hash` covers everything except the
/// timestamps, so identical config and seed give identical hashes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub outputs: Vec<OutputFile>,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub manifest_hash: String,
}

impl RunManifest {
    pub fn start(command: &str, config: &ExperimentConfig) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config_hash: config.hash(),
            seed: config.sampling.seed,
            config: config.clone(),
            outputs: Vec::new(),
            started_unix_ms: unix_ms(),
            finished_unix_ms: 0,
            manifest_hash: String::new(),
        }
    }

    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for part in [&self.tool_version, &self.command, &self.config_hash] {
            h.update(part.as_bytes());
            h.update([0]);
        }
        h.update(self.seed.to_le_bytes());
        for o in &self.outputs {
            for part in [&o.stage, &o.path, &o.sha256] {
                h.update(part.as_bytes());
                h.update([0]);
            }
        }
        hex::encode(h.finalize())
    }

    pub fn finish(&mut self) {
        self.finished_unix_ms = unix_ms();
        self.manifest_hash = self.hash();
    }
}

/// Writes stage outputs under one directory and records them in a manifest.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    pub manifest: RunManifest,
}

impl OutputDir {
    pub fn create(root: impl Into<PathBuf>, command: &str, config: &ExperimentConfig) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| GffError::io(&root, e))?;
        Ok(Self { root, manifest: RunManifest::start(command, config) })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, stage: &str, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.root.join(name);
        fs::write(&path, bytes).map_err(|e| GffError::io(&path, e))?;
        self.manifest.outputs.push(OutputFile {
            stage: stage.into(),
            path: name.into(),
            sha256: hex::encode(Sha256::digest(bytes)),
            bytes: bytes.len() as u64,
        });
        Ok(path)
    }

    pub fn finish(mut self) -> Result<RunManifest> {
        self.manifest.finish();
        let text = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes") + "\n";
        let path = self.root.join("manifest.json");
        fs::write(&path, text).map_err(|e| GffError::io(&path, e))?;
        Ok(self.manifest)
    }
}
