//! Run manifest and the text report derived from it.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// Written before any data file; left behind by an interrupted run.
    Incomplete,
    Complete,
    /// All artifacts written, but a gated clause failed.
    ToleranceFailure,
    /// The computation stopped with an error; see `error`.
    Failed,
}

/// One checked or reported quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clause {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
    /// A failed gated clause makes the run exit with the tolerance code.
    #[serde(default)]
    pub gate: bool,
}

impl Clause {
    /// A gated numeric check.
    pub fn check(label: impl Into<String>, value: f64, tol: f64, pass: bool) -> Self {
        Self {
            label: label.into(),
            value: Some(value),
            text: None,
            tol: Some(tol),
            pass: Some(pass),
            gate: true,
        }
    }

    /// A reported number with no verdict.
    pub fn info(label: impl Into<String>, value: f64) -> Self {
        Self {
            label: label.into(),
            value: Some(value),
            text: None,
            tol: None,
            pass: None,
            gate: false,
        }
    }

    /// A reported word or phrase with no verdict.
    pub fn note(label: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            value: None,
            text: Some(text.into()),
            tol: None,
            pass: None,
            gate: false,
        }
    }

    pub fn failed_gate(&self) -> bool {
        self.gate && self.pass == Some(false)
    }

    pub fn line(&self) -> String {
        let mut s = format!("{}:", self.label);
        if let Some(v) = self.value {
            let _ = write!(s, " {v:e}");
        }
        if let Some(t) = &self.text {
            let _ = write!(s, " {t}");
        }
        if let Some(t) = self.tol {
            let _ = write!(s, " (tol {t:e})");
        }
        match self.pass {
            Some(true) => s.push_str(": PASS"),
            Some(false) => s.push_str(": FAIL"),
            None => {}
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputDigest {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub status: Status,
    pub kind: String,
    pub tool_version: String,
    pub parameters: serde_json::Value,
    /// Digest of the canonical (compact) serialisation of the parameters.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_sha256: Option<String>,
    pub tolerances: BTreeMap<String, f64>,
    pub outputs: Vec<OutputDigest>,
    /// Wall-clock seconds per phase.
    pub timings: BTreeMap<String, f64>,
    pub clauses: Vec<Clause>,
    pub summary: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

impl Manifest {
    pub fn new(kind: &str, parameters: serde_json::Value) -> Self {
        Self {
            status: Status::Incomplete,
            kind: kind.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            parameters,
            config_sha256: None,
            tolerances: BTreeMap::new(),
            outputs: Vec::new(),
            timings: BTreeMap::new(),
            clauses: Vec::new(),
            summary: serde_json::Value::Null,
            error: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        std::fs::write(dir.join(MANIFEST_FILE), text)?;
        Ok(())
    }

    /// Writes `bytes` to `dir/name` and records its digest.
    pub fn write_output(&mut self, dir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        std::fs::write(dir.join(name), bytes)?;
        self.outputs.push(OutputDigest {
            file: name.to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
            bytes: bytes.len(),
        });
        Ok(())
    }

    pub fn any_gate_failed(&self) -> bool {
        self.clauses.iter().any(Clause::failed_gate)
    }

    /// Fixed-format text summary.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let status = match self.status {
            Status::Incomplete => "incomplete",
            Status::Complete => "complete",
            Status::ToleranceFailure => "tolerance failure",
            Status::Failed => "failed",
        };
        let _ = writeln!(out, "experiment: {}", self.kind);
        let _ = writeln!(out, "status: {status}");
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error: {e}");
        }
        for c in &self.clauses {
            let _ = writeln!(out, "{}", c.line());
        }
        for o in &self.outputs {
            let _ = writeln!(out, "output {} sha256 {}", o.file, o.sha256);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clause_lines() {
        let c = Clause::check("max Cauchy-identity relative residual", 3.5e-9, 1e-4, true);
        assert_eq!(
            c.line(),
            "max Cauchy-identity relative residual: 3.5e-9 (tol 1e-4): PASS"
        );
        let n = Clause::note("Gamma_rho rho=3 verdict", "converges");
        assert_eq!(n.line(), "Gamma_rho rho=3 verdict: converges");
        assert!(!n.failed_gate());
        assert!(Clause::check("x", 1.0, 0.5, false).failed_gate());
    }

    #[test]
    fn digests_are_recorded() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = Manifest::new("sets", serde_json::json!({}));
        m.write_output(dir.path(), "a.csv", b"x\n1\n").unwrap();
        assert_eq!(m.outputs[0].sha256.len(), 64);
        m.write(dir.path()).unwrap();
        let back = Manifest::load(&dir.path().join(MANIFEST_FILE)).unwrap();
        assert_eq!(back, m);
    }
}
