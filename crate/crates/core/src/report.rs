//! Machine-readable check reports (JSON or TSV) with deterministic
//! formatting: identical configurations produce byte-identical output.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bigfloat::BigF;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    /// What this line verifies, e.g. "complex/divdiv3d" or "unisolvence/symcurl3d".
    pub tag: String,
    /// Key parameters, e.g. "k=3" or "l=3 k=4 cell=random:1".
    pub params: String,
    pub pass: bool,
    /// Named numeric metrics formatted deterministically.
    pub metrics: BTreeMap<String, String>,
    pub notes: String,
}

impl CheckResult {
    pub fn new(tag: impl Into<String>, params: impl Into<String>, pass: bool) -> Self {
        CheckResult {
            tag: tag.into(),
            params: params.into(),
            pass,
            metrics: BTreeMap::new(),
            notes: String::new(),
        }
    }

    pub fn metric_f(&mut self, key: &str, v: &BigF) -> &mut Self {
        self.metrics.insert(key.into(), fmt_float(v));
        self
    }

    pub fn metric_f64(&mut self, key: &str, v: f64) -> &mut Self {
        self.metrics.insert(key.into(), format!("{v:.6e}"));
        self
    }

    pub fn metric_int(&mut self, key: &str, v: i64) -> &mut Self {
        self.metrics.insert(key.into(), v.to_string());
        self
    }

    pub fn note(&mut self, s: impl Into<String>) -> &mut Self {
        self.notes = s.into();
        self
    }
}

/// Fixed-width scientific rendering of a big float (deterministic).
pub fn fmt_float(v: &BigF) -> String {
    if v.is_zero() {
        return "0".into();
    }
    format!("{:.6e}", v.to_f64())
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool_version: String,
    pub config: String,
    pub results: Vec<CheckResult>,
    pub pass: bool,
}

impl Report {
    pub fn new(config: impl Into<String>, results: Vec<CheckResult>) -> Self {
        let pass = results.iter().all(|r| r.pass);
        Report {
            tool_version: TOOL_VERSION.into(),
            config: config.into(),
            results,
            pass,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        out.push_str("tag\tparams\tpass\tmetrics\tnotes\n");
        for r in &self.results {
            let metrics = r
                .metrics
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(",");
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                r.tag, r.params, r.pass, metrics, r.notes
            ));
        }
        out
    }
}
