//! One JSON report per invocation.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use superwav::Verdict;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct Input {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp_unix: Option<u64>,
    pub status: String,
    pub exit_code: i32,
    pub inputs: Vec<Input>,
    pub parameters: BTreeMap<String, Value>,
    pub verdicts: Vec<Verdict>,
    /// Exact cycle points as `"n/d"` turns.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub cycles: Vec<Vec<String>>,
    /// `[re, im]` pairs.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub eigenvalues: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub traces: BTreeMap<String, Vec<f64>>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, Value>,
    /// Paths relative to the output directory.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub artifacts: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl Report {
    pub fn new(command: &str, with_timestamp: bool) -> Self {
        let timestamp_unix = with_timestamp.then(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        });
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            timestamp_unix,
            status: "pass".into(),
            exit_code: 0,
            inputs: Vec::new(),
            parameters: BTreeMap::new(),
            verdicts: Vec::new(),
            cycles: Vec::new(),
            eigenvalues: Vec::new(),
            traces: BTreeMap::new(),
            details: BTreeMap::new(),
            artifacts: Vec::new(),
            warnings: Vec::new(),
            error: None,
        }
    }

    pub fn input(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs.push(Input {
            path: path.display().to_string(),
            sha256: sha256_hex(bytes),
        });
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        self.parameters.insert(
            key.to_string(),
            serde_json::to_value(value).expect("parameter serializes"),
        );
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        self.details.insert(
            key.to_string(),
            serde_json::to_value(value).expect("detail serializes"),
        );
    }

    pub fn verdict(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }

    /// Exit code 1 if any verdict failed, else 0.
    pub fn settle(&mut self) {
        if self.verdicts.iter().any(|v| !v.passed) {
            self.status = "fail".into();
            self.exit_code = 1;
        }
    }

    pub fn fail_with(&mut self, kind: &str, message: String, code: i32) {
        self.status = "error".into();
        self.exit_code = code;
        self.error = Some(ErrorInfo {
            kind: kind.into(),
            message,
        });
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
