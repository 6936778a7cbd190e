//! Report envelope and output emission.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::RunConfig;

pub const TOOL: &str = "dalembert";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Serialize)]
pub struct ReportEnvelope<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    /// The arguments after the program name, verbatim.
    pub command: &'a [String],
    pub grammar_version: &'static str,
    pub timestamp: String,
    pub config: &'a RunConfig,
    pub payload: serde_json::Value,
    pub verdict: Verdict,
}

impl<'a> ReportEnvelope<'a> {
    pub fn new(command: &'a [String], config: &'a RunConfig, payload: serde_json::Value, verdict: Verdict) -> Self {
        Self {
            tool: TOOL,
            version: env!("CARGO_PKG_VERSION"),
            command,
            grammar_version: dalembert_core::expr::GRAMMAR_VERSION,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            config,
            payload,
            verdict,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// Serializes rows with a header taken from the row type.
pub fn csv_rows<R: Serialize>(rows: impl IntoIterator<Item = R>) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Writes to `path` through a sibling temporary file, or to stdout.
pub fn emit(text: &str, path: Option<&Path>) -> anyhow::Result<()> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
        Some(p) => {
            let mut tmp = p.as_os_str().to_owned();
            tmp.push(".partial");
            std::fs::write(&tmp, text)?;
            std::fs::rename(&tmp, p)?;
        }
    }
    Ok(())
}
