use std::fs;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a, C: Serialize> {
    command: &'a str,
    args: Vec<String>,
    version: &'a str,
    seed: Option<u64>,
    config: &'a C,
    started: String,
    finished: String,
    files: &'a [FileDigest],
}

/// An output directory that records a digest of every file written into it.
pub struct OutputDir {
    root: PathBuf,
    started: String,
    files: Vec<FileDigest>,
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| CliError::Io(format!("{}: {e}", root.display())))?;
        Ok(Self { root: root.to_path_buf(), started: now(), files: Vec::new() })
    }

    pub fn write(&mut self, name: &str, contents: &[u8]) -> Result<(), CliError> {
        let path = self.root.join(name);
        fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.files.push(FileDigest { path: name.to_string(), sha256: hex::encode(Sha256::digest(contents)) });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// Writes `manifest.json`, which lists every other file.
    pub fn finish<C: Serialize>(self, command: &str, seed: Option<u64>, config: &C) -> Result<PathBuf, CliError> {
        let manifest = Manifest {
            command,
            args: std::env::args().skip(1).collect(),
            version: env!("CARGO_PKG_VERSION"),
            seed,
            config,
            started: self.started.clone(),
            finished: now(),
            files: &self.files,
        };
        let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        let path = self.root.join("manifest.json");
        fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Ok(self.root)
    }
}
