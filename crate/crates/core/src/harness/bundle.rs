use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ExperimentConfig;
use crate::Result;

/// Run metadata written next to the tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub code_version: String,
    pub config_hash: String,
    pub seed: u64,
    pub trials: usize,
    pub config: BTreeMap<String, String>,
    pub files: Vec<String>,
    /// Drops used, and overloaded draws discarded before them.
    pub drops: u64,
    pub resamples: u64,
    pub warnings: Vec<String>,
}

/// Output tables of one command, held in memory until written.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultBundle {
    pub manifest: Manifest,
    files: Vec<(String, String)>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

impl ResultBundle {
    pub fn new(command: &str, config: &ExperimentConfig) -> Self {
        ResultBundle {
            manifest: Manifest {
                command: command.to_string(),
                code_version: env!("CARGO_PKG_VERSION").to_string(),
                config_hash: config.hash(),
                seed: config.seed,
                trials: config.trials,
                config: config
                    .entries()
                    .into_iter()
                    .map(|(k, v)| (k.to_string(), v))
                    .collect(),
                files: Vec::new(),
                drops: 0,
                resamples: 0,
                warnings: Vec::new(),
            },
            files: Vec::new(),
        }
    }

    pub fn add(&mut self, name: &str, content: String) {
        self.manifest.files.push(name.to_string());
        self.files.push((name.to_string(), content));
    }

    pub fn add_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.add(name, text);
        Ok(())
    }

    pub fn warn(&mut self, message: String) {
        self.manifest.warnings.push(message);
    }

    /// Records drop usage and warns when more than 1% of draws were discarded.
    pub fn count_drops(&mut self, drops: u64, resamples: u64) {
        self.manifest.drops += drops;
        self.manifest.resamples += resamples;
        let m = &self.manifest;
        let total = m.drops + m.resamples;
        if total > 0 && m.resamples as f64 > 0.01 * total as f64 {
            let msg = format!(
                "{} of {} drops were redrawn because a cell exceeded the pilot length",
                m.resamples, total
            );
            self.manifest.warnings.retain(|w| !w.contains("were redrawn"));
            self.manifest.warnings.push(msg);
        }
    }

    pub fn file(&self, name: &str) -> Option<&str> {
        self.files
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c.as_str())
    }

    pub fn files(&self) -> impl Iterator<Item = (&str, &str)> {
        self.files.iter().map(|(n, c)| (n.as_str(), c.as_str()))
    }

    pub fn manifest_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(&self.manifest)?;
        text.push('\n');
        Ok(text)
    }

    /// Writes every table and the manifest into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, content) in &self.files {
            std::fs::write(dir.join(name), content)?;
        }
        std::fs::write(dir.join(MANIFEST_FILE), self.manifest_json()?)?;
        Ok(())
    }
}
