//! Artifact writing. CSV and report files are deterministic functions of
//! (config, seed, version); the run sidecar alone carries a timestamp.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub struct Artifacts {
    dir: PathBuf,
    command: String,
    config_hash: String,
    seed: u64,
    written: Vec<String>,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

impl Artifacts {
    pub fn new(dir: &Path, command: &str, config: &RunConfig) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            command: command.to_string(),
            config_hash: config.hash(),
            seed: config.seed,
            written: Vec::new(),
        })
    }

    fn metadata(&self) -> Value {
        json!({
            "version": VERSION,
            "command": self.command,
            "config_sha256": self.config_hash,
            "seed": self.seed,
        })
    }

    /// Writes `rows` under a `# key: value` metadata block and a header row.
    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let mut text = String::new();
        text.push_str(&format!("# nanoqed-version: {VERSION}\n"));
        text.push_str(&format!("# command: {}\n", self.command));
        text.push_str(&format!("# config-sha256: {}\n", self.config_hash));
        text.push_str(&format!("# seed: {}\n", self.seed));
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header).map_err(|e| io_err(&path, e))?;
        for row in rows {
            w.write_record(row.iter().map(|v| v.to_string())).map_err(|e| io_err(&path, e))?;
        }
        let body = w.into_inner().map_err(|e| io_err(&path, e))?;
        text.push_str(&String::from_utf8(body).expect("csv output is UTF-8"));
        fs::write(&path, text).map_err(|e| io_err(&path, e))?;
        self.written.push(name.to_string());
        Ok(())
    }

    /// Writes a report with a `metadata` block.
    pub fn json<T: Serialize>(&mut self, name: &str, report: &T) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let doc = json!({ "metadata": self.metadata(), "report": report });
        let text = serde_json::to_string_pretty(&doc).expect("report serializes");
        fs::write(&path, text + "\n").map_err(|e| io_err(&path, e))?;
        self.written.push(name.to_string());
        Ok(())
    }

    /// Echoes the resolved config and writes the run sidecar.
    pub fn finish(mut self, config: &RunConfig, threads: usize) -> Result<Vec<String>, CliError> {
        let resolved = self.dir.join("config.resolved.json");
        let text = serde_json::to_string_pretty(config).expect("config serializes");
        fs::write(&resolved, text + "\n").map_err(|e| io_err(&resolved, e))?;
        self.written.push("config.resolved.json".to_string());

        let sidecar = self.dir.join("run.json");
        let doc = json!({
            "metadata": self.metadata(),
            "timestamp": chrono::Utc::now().to_rfc3339(),
            "threads": threads,
            "artifacts": self.written,
            "config": config,
        });
        fs::write(&sidecar, serde_json::to_string_pretty(&doc).expect("sidecar serializes") + "\n")
            .map_err(|e| io_err(&sidecar, e))?;
        self.written.push("run.json".to_string());
        Ok(self.written)
    }
}
