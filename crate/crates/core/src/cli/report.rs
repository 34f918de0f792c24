use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::analysis::Check;
use crate::error::Result;
use crate::protocols::Transcript;

/// Transcripts kept in a report; the total is recorded separately.
pub const TRANSCRIPT_CAP: usize = 64;

/// Echo of the resolved run configuration.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel: Option<String>,
    pub mode: String,
    pub trials: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: RunConfig,
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
    /// Named analysis fragments.
    pub results: BTreeMap<String, Value>,
    pub transcripts: Vec<Transcript>,
    pub transcripts_total: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

impl Report {
    pub fn new(config: RunConfig, with_timings: bool) -> Self {
        Self {
            tool: "qric",
            version: env!("CARGO_PKG_VERSION"),
            config,
            checks: Vec::new(),
            passed: 0,
            failed: 0,
            results: BTreeMap::new(),
            transcripts: Vec::new(),
            transcripts_total: 0,
            timings: with_timings.then(BTreeMap::new),
        }
    }

    pub fn check(&mut self, c: Check) {
        if c.passed() {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
        self.checks.push(c);
    }

    pub fn result<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.results.insert(name.to_string(), serde_json::to_value(value)?);
        Ok(())
    }

    pub fn transcripts<'a>(&mut self, ts: impl IntoIterator<Item = &'a Transcript>) {
        for t in ts {
            if self.transcripts.len() < TRANSCRIPT_CAP {
                self.transcripts.push(t.clone());
            }
            self.transcripts_total += 1;
        }
    }

    /// Runs `f`, recording its wall-clock time under `name` when enabled.
    pub fn timed<T>(&mut self, name: &str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f(self)?;
        if let Some(t) = self.timings.as_mut() {
            t.insert(name.to_string(), start.elapsed().as_secs_f64());
        }
        Ok(out)
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    /// Writes the JSON report to `out` (`-` for standard output).
    pub fn write(&self, out: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        if out.as_os_str() == "-" {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        } else {
            std::fs::write(out, text)?;
        }
        Ok(())
    }

    /// Human summary on standard error.
    pub fn summarize(&self) {
        eprintln!(
            "qric {}: {}/{} checks passed",
            self.config.command,
            self.passed,
            self.checks.len()
        );
        for c in self.checks.iter().filter(|c| !c.passed()) {
            eprintln!(
                "  FAIL {}: measured {:e}, expected {:e} ({:?}, tolerance {:e})",
                c.name, c.measured, c.expected, c.relation, c.tolerance
            );
        }
    }
}
