//! Evaluation reports: canonical JSON with sorted keys and a flattened CSV
//! view carrying the same values.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::align::gradcheck::GradcheckReport;
use crate::align::train::{HistorySummary, TrainHistory};
use crate::align::TrainConfig;
use crate::error::{Error, Result};
use crate::grounding::GroundingReport;
use crate::matching::MatchReport;
use crate::sqa::SqaScore;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(path: &str, bytes: &[u8]) -> Self {
        InputDigest {
            path: path.to_string(),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(bytes),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptionSection {
    pub n_pairs: usize,
    pub threshold: f64,
    pub report: MatchReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqaSection {
    pub warnings: Vec<String>,
    pub score: SqaScore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingSection {
    pub config: TrainConfig,
    pub summary: HistorySummary,
    pub history: TrainHistory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformSection {
    pub space: String,
    pub input_shape: [usize; 3],
    pub output_shape: [usize; 3],
    pub output_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: Option<u64>,
    pub inputs: BTreeMap<String, InputDigest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caption: Option<CaptionSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grounding: Option<GroundingReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sqa: Option<SqaSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub training: Option<TrainingSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gradcheck: Option<GradcheckReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<TransformSection>,
    /// Wall-clock seconds; `None` unless timing was requested.
    pub runtime_seconds: Option<f64>,
}

impl EvalReport {
    pub fn new(command: &str) -> Self {
        EvalReport {
            tool: "vindex".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed: None,
            inputs: BTreeMap::new(),
            caption: None,
            grounding: None,
            sqa: None,
            training: None,
            gradcheck: None,
            transform: None,
            runtime_seconds: None,
        }
    }

    pub fn add_input(&mut self, name: &str, path: &str, bytes: &[u8]) {
        self.inputs.insert(name.to_string(), InputDigest::of(path, bytes));
    }

    pub fn to_value(&self) -> Result<Value> {
        serde_json::to_value(self).map_err(|e| Error::format(None, e.to_string()))
    }

    /// Pretty JSON with keys sorted at every level and a trailing newline.
    pub fn to_canonical_json(&self) -> Result<String> {
        let v = self.to_value()?;
        let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::format(None, e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::format(Some(e.line()), e.to_string()))
    }

    /// `key,value` rows, one per JSON leaf, keys as dotted paths.
    pub fn to_csv(&self) -> Result<String> {
        let mut rows = Vec::new();
        flatten(&self.to_value()?, String::new(), &mut rows);
        let mut out = String::from("key,value\n");
        for (k, v) in rows {
            out.push_str(&csv_field(&k));
            out.push(',');
            out.push_str(&v);
            out.push('\n');
        }
        Ok(out)
    }
}

fn flatten(v: &Value, prefix: String, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(child, key, out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten(child, format!("{prefix}[{i}]"), out);
            }
        }
        Value::String(s) => out.push((prefix, csv_field(s))),
        Value::Null => out.push((prefix, String::new())),
        // numbers and booleans use their JSON spelling
        other => out.push((prefix, other.to_string())),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
