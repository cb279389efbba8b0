//! Plain-text run manifests written next to every result file.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Vec<(String, String)>,
    pub master_seed: Option<u64>,
    pub version: String,
    pub timestamp: String,
    pub outputs: Vec<String>,
    pub notes: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            parameters: Vec::new(),
            master_seed: None,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            outputs: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.parameters.push((key.to_string(), value.to_string()));
        self
    }

    /// `key: value` lines, LF-terminated.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command: {}", self.command);
        let _ = writeln!(s, "version: {}", self.version);
        let _ = writeln!(s, "timestamp: {}", self.timestamp);
        if let Some(seed) = self.master_seed {
            let _ = writeln!(s, "master_seed: {seed}");
        }
        for (k, v) in &self.parameters {
            let _ = writeln!(s, "param.{k}: {v}");
        }
        for o in &self.outputs {
            let _ = writeln!(s, "output: {o}");
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.render()).map_err(|e| CliError::io(path, e))
    }
}

/// `results.csv` → `results.csv.manifest.txt`.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.txt");
    PathBuf::from(name)
}
