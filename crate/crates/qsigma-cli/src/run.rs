//! Running a validated config and writing its outputs plus manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{validate, FieldError, RunConfig};
use crate::drivers::{run_experiment, Artifact};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub file: String,
    pub rows: usize,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskSeed {
    pub task: String,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format_version: u32,
    pub config: RunConfig,
    pub code_version: String,
    /// Seconds spent in the experiment driver.
    pub wall_clock: f64,
    pub task_seeds: Vec<TaskSeed>,
    pub outputs: Vec<OutputRecord>,
}

#[derive(Debug)]
pub enum RunError {
    Invalid(Vec<FieldError>),
    Runtime(anyhow::Error),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Invalid(errs) => {
                writeln!(f, "config has {} error(s):", errs.len())?;
                for e in errs {
                    writeln!(f, "  {e}")?;
                }
                Ok(())
            }
            Self::Runtime(e) => write!(f, "{e:#}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<anyhow::Error> for RunError {
    fn from(e: anyhow::Error) -> Self {
        Self::Runtime(e)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn code_version() -> String {
    format!("qsigma {}", env!("CARGO_PKG_VERSION"))
}

/// Accepts either a bare config or a manifest, whose `config` is re-run.
pub fn parse_config_or_manifest(text: &str) -> Result<RunConfig> {
    let v: serde_json::Value = serde_json::from_str(text).context("parsing JSON")?;
    if v.get("config").is_some() && v.get("outputs").is_some() {
        let m: RunManifest = serde_json::from_value(v).context("parsing manifest")?;
        Ok(m.config)
    } else {
        serde_json::from_value(v).context("parsing config")
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config_or_manifest(&text).with_context(|| format!("in {}", path.display()))
}

fn write_all(dir: &Path, files: &[(String, Vec<u8>)], written: &mut Vec<PathBuf>) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, bytes) in files {
        let path = dir.join(name);
        written.push(path.clone());
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

/// Validates, runs and writes every output plus `manifest.json` into
/// `cfg.out`. Files written before a failure are removed again.
pub fn run(cfg: &RunConfig) -> Result<RunManifest, RunError> {
    let errs = validate(cfg);
    if !errs.is_empty() {
        return Err(RunError::Invalid(errs));
    }
    let start = Instant::now();
    let out = run_experiment(cfg)?;
    let wall_clock = start.elapsed().as_secs_f64();
    let manifest = RunManifest {
        format_version: cfg.format_version,
        config: cfg.clone(),
        code_version: code_version(),
        wall_clock,
        task_seeds: out
            .task_seeds
            .iter()
            .map(|(task, seed)| TaskSeed {
                task: task.clone(),
                seed: *seed,
            })
            .collect(),
        outputs: out.artifacts.iter().map(record).collect(),
    };
    let mut files: Vec<(String, Vec<u8>)> = out.artifacts.into_iter().map(|a| (a.name, a.bytes)).collect();
    let mut m = serde_json::to_vec_pretty(&manifest).context("serializing manifest")?;
    m.push(b'\n');
    files.push((MANIFEST_NAME.into(), m));
    let mut written = Vec::new();
    if let Err(e) = write_all(&cfg.out, &files, &mut written) {
        for p in written {
            let _ = fs::remove_file(p);
        }
        return Err(e.into());
    }
    Ok(manifest)
}

fn record(a: &Artifact) -> OutputRecord {
    OutputRecord {
        file: a.name.clone(),
        rows: a.rows,
        sha256: sha256_hex(&a.bytes),
    }
}
