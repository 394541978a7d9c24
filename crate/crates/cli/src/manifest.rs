//! `manifest.json`: one record per command run in an output directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::{CliResult, Classify};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub argv: Vec<String>,
    pub tool_version: String,
    pub started_at: String,
    pub finished_at: String,
    pub jobs: Option<usize>,
    pub config: RunConfig,
    pub inputs: Vec<FileDigest>,
    /// Output path relative to the output directory, to its SHA-256.
    pub outputs: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub runs: Vec<RunRecord>,
}

impl Default for Manifest {
    fn default() -> Self {
        Manifest { tool: "storynet".into(), runs: Vec::new() }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Digest a file, or every file under a directory in sorted order.
pub fn digest_path(path: &Path) -> CliResult<Vec<FileDigest>> {
    let mut files = Vec::new();
    collect_files(path, &mut files).input_err(format!("reading {}", path.display()))?;
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let bytes = std::fs::read(&p).input_err(format!("reading {}", p.display()))?;
            Ok(FileDigest { path: p.display().to_string(), sha256: sha256_hex(&bytes), bytes: bytes.len() as u64 })
        })
        .collect()
}

fn collect_files(path: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
    if path.is_dir() {
        for entry in std::fs::read_dir(path)? {
            collect_files(&entry?.path(), out)?;
        }
    } else {
        std::fs::metadata(path)?;
        out.push(path.to_path_buf());
    }
    Ok(())
}

impl Manifest {
    pub fn load_or_default(out: &Path) -> CliResult<Self> {
        let path = out.join(MANIFEST_FILE);
        if !path.exists() {
            return Ok(Manifest::default());
        }
        let text = std::fs::read_to_string(&path).internal_err("reading manifest")?;
        serde_json::from_str(&text).input_err(format!("parsing {}", path.display()))
    }

    pub fn save(&self, out: &Path) -> CliResult<()> {
        let text = serde_json::to_string_pretty(self).internal_err("serializing manifest")?;
        std::fs::write(out.join(MANIFEST_FILE), text + "\n").internal_err("writing manifest")
    }

    pub fn last(&self, command: &str) -> Option<&RunRecord> {
        self.runs.iter().rev().find(|r| r.command == command)
    }
}
