use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use hamrecon::Result;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

/// One output file, produced in memory and written by the runner.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub file_name: String,
    pub contents: Vec<u8>,
}

impl Artifact {
    pub fn new(file_name: impl Into<String>, contents: impl Into<Vec<u8>>) -> Self {
        Self { file_name: file_name.into(), contents: contents.into() }
    }

    pub fn json<T: Serialize>(file_name: impl Into<String>, value: &T) -> Self {
        let mut text = serde_json::to_string_pretty(value).expect("serializable summary");
        text.push('\n');
        Self::new(file_name, text)
    }

    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(&self.contents))
    }
}

/// Builds a CSV with a single header line; floats keep 17 significant digits.
pub struct CsvTable {
    text: String,
}

pub enum Cell {
    Int(usize),
    Float(f64),
    Text(String),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self { text: format!("{}\n", header.join(",")) }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        let fields: Vec<String> = cells
            .into_iter()
            .map(|c| match c {
                Cell::Int(v) => v.to_string(),
                Cell::Float(v) => format!("{v:.16e}"),
                Cell::Text(s) => s,
            })
            .collect();
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn into_artifact(self, file_name: impl Into<String>) -> Artifact {
        Artifact::new(file_name, self.text)
    }
}

#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub output: &'a str,
    pub sha256: String,
    pub bytes: usize,
    pub library_version: &'static str,
    pub wall_clock_seconds: f64,
    pub config: &'a RunConfig,
}

pub fn manifest_name(file_name: &str) -> String {
    format!("{file_name}.manifest.json")
}

/// Writes every artifact and a manifest beside each one; returns the paths
/// of the artifacts.
pub fn write_artifacts(dir: &Path, artifacts: &[Artifact], config: &RunConfig, elapsed: Duration) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::with_capacity(artifacts.len());
    for artifact in artifacts {
        let path = dir.join(&artifact.file_name);
        fs::write(&path, &artifact.contents)?;
        let manifest = RunManifest {
            output: &artifact.file_name,
            sha256: artifact.sha256(),
            bytes: artifact.contents.len(),
            library_version: env!("CARGO_PKG_VERSION"),
            wall_clock_seconds: elapsed.as_secs_f64(),
            config,
        };
        fs::write(dir.join(manifest_name(&artifact.file_name)), Artifact::json("", &manifest).contents)?;
        written.push(path);
    }
    Ok(written)
}
