//! Newline-delimited run records with a versioned schema; every command
//! emits one per run and the bench table is a stream of them.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{failure, usage, Result};

pub const SCHEMA: &str = "ktd-run/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterEntry {
    pub rel_change: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rel_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema: String,
    pub command: String,
    /// Echo of the effective configuration, flag name to value.
    pub config: BTreeMap<String, serde_json::Value>,
    pub seed: u64,
    pub timings_ms: BTreeMap<String, f64>,
    pub metrics: BTreeMap<String, f64>,
    /// Written artifact path to FNV-1a checksum of its bytes.
    pub artifacts: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub history: Option<Vec<IterEntry>>,
}

impl RunRecord {
    pub fn new(command: &str, seed: u64) -> Self {
        Self {
            schema: SCHEMA.into(),
            command: command.into(),
            config: BTreeMap::new(),
            seed,
            timings_ms: BTreeMap::new(),
            metrics: BTreeMap::new(),
            artifacts: BTreeMap::new(),
            history: None,
        }
    }

    pub fn set_config(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.config.insert(key.into(), value.into());
    }

    pub fn set_timing(&mut self, key: &str, ms: f64) {
        self.timings_ms.insert(key.into(), ms);
    }

    pub fn set_metric(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.into(), value);
    }

    pub fn add_artifact(&mut self, path: impl AsRef<Path>, bytes: &[u8]) {
        self.artifacts.insert(
            path.as_ref().display().to_string(),
            format!("{:016x}", fnv1a64(bytes)),
        );
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    pub fn from_line(line: &str) -> Result<Self> {
        let record: RunRecord =
            serde_json::from_str(line).map_err(|e| usage(format!("bad run record: {e}")))?;
        if record.schema != SCHEMA {
            return Err(usage(format!("unknown record schema {:?}", record.schema)));
        }
        Ok(record)
    }
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Appends records to a JSONL file, one per line.
pub fn append_records(path: impl AsRef<Path>, records: &[RunRecord]) -> Result<()> {
    let path = path.as_ref();
    let mut file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| failure(format!("{}: {e}", path.display())))?;
    for record in records {
        writeln!(file, "{}", record.to_line())
            .map_err(|e| failure(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<RunRecord>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("{}: {e}", path.display())))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(RunRecord::from_line)
        .collect()
}
