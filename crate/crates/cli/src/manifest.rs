//! Result manifests, CSV tables and the on-disk results store.
//!
//! A manifest is split into a `header` holding everything that differs between
//! runs (wall-clock timestamp and duration) and a `body` that is a pure
//! function of the resolved configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const TOOL: &str = "expander-forge";
pub const RESULTS_ENV: &str = "EXPANDER_FORGE_RESULTS";
pub const DEFAULT_RESULTS_DIR: &str = "expander-forge-results";
pub const INDEX_FILE: &str = "index.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Falsified,
    Truncated,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Falsified => 2,
            Status::Truncated => 3,
        }
    }

    /// Falsification dominates truncation.
    pub fn combine(self, other: Status) -> Status {
        match (self, other) {
            (Status::Falsified, _) | (_, Status::Falsified) => Status::Falsified,
            (Status::Truncated, _) | (_, Status::Truncated) => Status::Truncated,
            _ => Status::Ok,
        }
    }
}

/// One numeric result together with the operation and parameters that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Output {
    pub operation: String,
    pub params: Value,
    pub result: Value,
}

impl Output {
    pub fn new(operation: &str, params: Value, result: impl Serialize) -> Result<Self> {
        Ok(Self {
            operation: operation.to_owned(),
            params,
            result: serde_json::to_value(result)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub unix_time_ms: u128,
    pub duration_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Body {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: Value,
    pub status: Status,
    pub outputs: Vec<Output>,
}

impl Body {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn content_hash(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(self.to_json()?.as_bytes())))
    }

    pub fn config_hash(&self) -> Result<String> {
        let key = serde_json::json!({ "command": self.command, "config": self.config });
        Ok(hex::encode(Sha256::digest(
            serde_json::to_string(&key)?.as_bytes(),
        )))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub header: Header,
    pub body: Body,
}

impl Manifest {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// Rows for `--format csv`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvTable {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(headers: Vec<&'static str>) -> Self {
        Self {
            headers,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> Result<String> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        writer.write_record(&self.headers)?;
        for row in &self.rows {
            writer.write_record(row)?;
        }
        Ok(String::from_utf8(writer.into_inner()?)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub command: String,
    pub result: String,
}

pub fn results_dir() -> PathBuf {
    std::env::var_os(RESULTS_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_RESULTS_DIR))
}

/// Stores the manifest as `<sha256 of body>.json` and records it in the index
/// under the hash of the command and configuration.
pub fn persist(dir: &Path, manifest: &Manifest) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let name = format!("{}.json", manifest.body.content_hash()?);
    let path = dir.join(&name);
    std::fs::write(&path, manifest.to_json()?)
        .with_context(|| format!("writing {}", path.display()))?;

    let index_path = dir.join(INDEX_FILE);
    let mut index: BTreeMap<String, IndexEntry> = match std::fs::read_to_string(&index_path) {
        Ok(text) => serde_json::from_str(&text)
            .with_context(|| format!("parsing {}", index_path.display()))?,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
        Err(e) => return Err(e).with_context(|| format!("reading {}", index_path.display())),
    };
    index.insert(
        manifest.body.config_hash()?,
        IndexEntry {
            command: manifest.body.command.clone(),
            result: name,
        },
    );
    std::fs::write(&index_path, serde_json::to_string_pretty(&index)? + "\n")
        .with_context(|| format!("writing {}", index_path.display()))?;
    Ok(path)
}
