//! Provenance record written next to every study's outputs.

use std::path::Path;

use girlab_core::simulate::SkippedWindow;
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &str, bytes: &[u8]) -> Self {
        Self {
            path: path.to_string(),
            sha256: format!("{:x}", Sha256::digest(bytes)),
        }
    }

    pub fn of_file(path: &Path) -> std::io::Result<Self> {
        Ok(Self::of(&path.display().to_string(), &std::fs::read(path)?))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StageSummary {
    pub windows: usize,
    pub skipped: Vec<SkippedWindow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ill_conditioned_windows: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: String,
    /// Fund-selection seed after any `--seed` override.
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub synthetic_seed: Option<u64>,
    pub started: String,
    pub finished: String,
    pub sample_size: String,
    pub inputs: Vec<FileDigest>,
    /// Paths relative to the output directory.
    pub outputs: Vec<FileDigest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance: Option<StageSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oos: Option<StageSummary>,
}

pub fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}
