//! Output directory handling: hash-stamped CSV files and the run manifest.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::error::CliResult;

pub struct OutputDir {
    root: PathBuf,
    config_hash: String,
    files: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path, config_hash: &str) -> CliResult<Self> {
        std::fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            config_hash: config_hash.to_string(),
            files: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Write `name` as a comment line carrying the config hash followed by
    /// whatever `body` emits (a header row and data rows).
    pub fn csv<F>(&mut self, name: &str, body: F) -> CliResult<PathBuf>
    where
        F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
    {
        let mut buf = Vec::new();
        writeln!(buf, "# config_hash={}", self.config_hash)?;
        body(&mut buf)?;
        let path = self.path(name);
        std::fs::write(&path, buf)?;
        self.files.push(name.to_string());
        Ok(path)
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    /// Write `manifest_<command>.json` listing every file this command wrote.
    pub fn write_manifest(&self, command: &str, seed: u64, threads: usize, started: Instant) -> CliResult<PathBuf> {
        let manifest = serde_json::json!({
            "command": command,
            "config_hash": self.config_hash,
            "seed": seed,
            "tool_version": env!("CARGO_PKG_VERSION"),
            "threads": threads,
            "wall_time_s": started.elapsed().as_secs_f64(),
            "files": self.files,
        });
        let path = self.path(&format!("manifest_{command}.json"));
        let text = serde_json::to_string_pretty(&manifest).map_err(std::io::Error::other)?;
        std::fs::write(&path, text + "\n")?;
        Ok(path)
    }
}
