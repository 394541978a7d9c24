//! Command-line pipeline: ingest, featurize, compare, train, evaluate,
//! explain, rate, generate, distributions and report.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod svg;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use config::RunConfig;
use error::{CliResult, Classify};
use manifest::{digest_path, sha256_hex, FileDigest, Manifest, RunRecord};

pub const OUTPUT_DIRS: [&str; 4] = ["features", "models", "reports", "figures"];

/// Per-invocation state: resolved config, output directory and the
/// inputs/outputs that go into the manifest.
pub struct Ctx {
    pub out: PathBuf,
    pub config: RunConfig,
    pub jobs: Option<usize>,
    inputs: Vec<FileDigest>,
    outputs: BTreeMap<String, String>,
}

impl Ctx {
    pub fn new(out: &Path, config: RunConfig, jobs: Option<usize>) -> CliResult<Self> {
        for d in OUTPUT_DIRS {
            std::fs::create_dir_all(out.join(d)).internal_err(format!("creating {}", out.join(d).display()))?;
        }
        Ok(Ctx { out: out.to_path_buf(), config, jobs, inputs: Vec::new(), outputs: BTreeMap::new() })
    }

    pub fn record_input(&mut self, path: &Path) -> CliResult<()> {
        let digests = digest_path(path)?;
        self.inputs.extend(digests);
        Ok(())
    }

    /// Write `bytes` to `<out>/<rel>` and record its digest.
    pub fn write(&mut self, rel: &str, bytes: impl AsRef<[u8]>) -> CliResult<()> {
        let path = self.out.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).internal_err(format!("creating {}", parent.display()))?;
        }
        std::fs::write(&path, bytes.as_ref()).internal_err(format!("writing {}", path.display()))?;
        self.outputs.insert(rel.to_string(), sha256_hex(bytes.as_ref()));
        Ok(())
    }

    pub fn outputs(&self) -> impl Iterator<Item = &str> {
        self.outputs.keys().map(String::as_str)
    }

    pub fn finish(self, command: &str, argv: Vec<String>, started_at: String) -> CliResult<()> {
        let mut manifest = Manifest::load_or_default(&self.out)?;
        manifest.runs.push(RunRecord {
            command: command.to_string(),
            argv,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started_at,
            finished_at: now(),
            jobs: self.jobs,
            config: self.config,
            inputs: self.inputs,
            outputs: self.outputs,
        });
        manifest.save(&self.out)
    }
}

pub fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}
