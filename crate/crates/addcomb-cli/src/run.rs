//! Run-report plumbing: every analysis command emits one JSON document with
//! the tool version, the command line, the input digest and the payload.
//! Environment data (thread count, wall-clock timings) lives under the
//! single `runtime` key, so reports from identical invocations are
//! byte-identical once that key is dropped.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Serialize)]
pub struct RunReport {
    pub tool: ToolInfo,
    /// argv without the binary path
    pub command: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_digest: Option<String>,
    pub payload: Value,
    pub runtime: Runtime,
}

#[derive(Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Serialize)]
pub struct Runtime {
    pub threads: usize,
    pub timings_ms: BTreeMap<String, f64>,
}

pub struct StageClock {
    timings: BTreeMap<String, f64>,
    current: Option<(String, Instant)>,
}

impl StageClock {
    pub fn new() -> Self {
        StageClock { timings: BTreeMap::new(), current: None }
    }

    pub fn stage(&mut self, name: &str) {
        self.finish();
        self.current = Some((name.to_string(), Instant::now()));
    }

    pub fn finish(&mut self) {
        if let Some((name, start)) = self.current.take() {
            self.timings.insert(name, start.elapsed().as_secs_f64() * 1e3);
        }
    }

    pub fn into_timings(mut self) -> BTreeMap<String, f64> {
        self.finish();
        self.timings
    }
}

pub fn file_digest(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(format!("sha256:{}", hex::encode(Sha256::digest(&bytes))))
}

pub fn build_report(
    command: Vec<String>,
    input_digest: Option<String>,
    payload: Value,
    threads: usize,
    clock: StageClock,
) -> RunReport {
    RunReport {
        tool: ToolInfo { name: "addcomb", version: env!("CARGO_PKG_VERSION") },
        command,
        input_digest,
        payload,
        runtime: Runtime { threads, timings_ms: clock.into_timings() },
    }
}

/// Writes the report to `out` (or stdout) as pretty JSON with a trailing
/// newline.
pub fn emit(report: &RunReport, out: Option<&Path>) -> Result<()> {
    let text = format!("{}\n", serde_json::to_string_pretty(report)?);
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("cannot write report to {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

pub fn check_summary(checks: &[addcomb::report::CheckResult]) -> Value {
    json!({
        "total": checks.len(),
        "failed": checks.iter().filter(|c| !c.passed()).count(),
        "flagged": checks.iter().filter(|c| c.is_flagged()).count(),
    })
}
