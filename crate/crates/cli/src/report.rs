//! Per-trial tables, summaries and their serialized form.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

/// Output of one experiment before serialization.
#[derive(Debug, Default)]
pub struct Record {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub summary: Map<String, Value>,
}

impl Record {
    pub fn new(columns: &[&'static str]) -> Self {
        Record { columns: columns.to_vec(), ..Default::default() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_owned(), value.into());
    }

    /// A proportion with its 95% Wilson interval under `key`, `key_wilson95`.
    pub fn set_rate(&mut self, key: &str, hits: usize, total: usize) {
        let rate = if total == 0 { Value::Null } else { json!(hits as f64 / total as f64) };
        self.set(key, rate);
        let (lo, hi) = statesynth::stats::wilson95(hits, total);
        self.set(&format!("{key}_wilson95"), json!([lo, hi]));
    }
}

/// Shortest round-tripping decimal, so reruns produce identical bytes.
pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// `null` for NaN and infinities, which JSON cannot carry.
pub fn finite(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

/// Hex SHA-256 of the canonical JSON of the configuration.
pub fn config_hash(config: &Value) -> String {
    let bytes = serde_json::to_vec(config).expect("configuration serializes");
    format!("{:x}", Sha256::digest(bytes))
}

/// The JSON summary document.
pub fn summary_document(name: &str, seed: u64, trials: u64, config: &Value, record: &Record, seconds: f64) -> Value {
    json!({
        "subcommand": name,
        "version": statesynth::VERSION,
        "seed": seed,
        "trials": trials,
        "config": config,
        "config_sha256": config_hash(config),
        "summary": record.summary,
        "wall_clock_seconds": seconds,
    })
}

pub fn write_outputs(dir: &Path, name: &str, record: &Record, document: &Value) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let csv_path = dir.join(format!("{name}.csv"));
    let mut w = csv::Writer::from_path(&csv_path).with_context(|| format!("opening {}", csv_path.display()))?;
    w.write_record(&record.columns)?;
    for row in &record.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    let json_path = dir.join(format!("{name}.json"));
    let text = serde_json::to_string_pretty(document)?;
    fs::write(&json_path, text + "\n").with_context(|| format!("writing {}", json_path.display()))?;
    Ok(())
}
