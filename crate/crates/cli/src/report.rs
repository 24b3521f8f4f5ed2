//! Run reports and their on-disk form.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use hamca::sampling::format_float;
use serde::{Deserialize, Serialize};
use serde_json::{Number, Value};

use crate::config::{Format, Kind};

/// One verdict. Informational checks record observations that are allowed
/// to come out either way and always pass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub informational: bool,
    pub detail: Value,
}

impl Check {
    pub fn verdict(name: impl Into<String>, passed: bool, detail: Value) -> Self {
        Check {
            name: name.into(),
            passed,
            informational: false,
            detail,
        }
    }

    pub fn info(name: impl Into<String>, detail: Value) -> Self {
        Check {
            name: name.into(),
            passed: true,
            informational: true,
            detail,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub kind: Kind,
    pub config: Value,
    pub seed: u64,
    pub checks: Vec<Check>,
    /// Artifact file names relative to the output directory.
    pub artifacts: Vec<String>,
    pub passed: bool,
    /// Kept out of the files so that repeated runs stay byte-identical.
    #[serde(skip)]
    pub wall_time: Option<Duration>,
}

impl RunReport {
    pub fn new(kind: Kind, config: Value, seed: u64, checks: Vec<Check>, artifacts: Vec<String>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        RunReport {
            kind,
            config,
            seed,
            checks,
            artifacts,
            passed,
            wall_time: None,
        }
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// A file produced by a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

/// A float as a JSON number with 17 significant digits; non-finite values
/// become strings.
pub fn float_value(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(x.to_string());
    }
    Number::from_str(&format_float(x))
        .map(Value::Number)
        .unwrap_or_else(|_| Value::String(format_float(x)))
}

#[derive(Debug, thiserror::Error)]
#[error("cannot write {path}: {source}")]
pub struct EmitError {
    pub path: PathBuf,
    #[source]
    pub source: std::io::Error,
}

/// Serializes the report in the requested format.
pub fn render_report(report: &RunReport, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut bytes = serde_json::to_vec_pretty(report).expect("report serializes");
            bytes.push(b'\n');
            bytes
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["name", "passed", "informational", "detail"])
                .expect("in-memory write");
            for c in &report.checks {
                w.write_record([
                    c.name.as_str(),
                    if c.passed { "true" } else { "false" },
                    if c.informational { "true" } else { "false" },
                    &c.detail.to_string(),
                ])
                .expect("in-memory write");
            }
            w.into_inner().expect("in-memory flush")
        }
    }
}

pub fn report_file_name(format: Format) -> &'static str {
    match format {
        Format::Json => "report.json",
        Format::Csv => "report.csv",
    }
}

/// Writes the artifacts and the report into `dir`, creating it if needed.
/// Returns the paths written, report last.
pub fn emit_report(
    report: &RunReport,
    artifacts: &[Artifact],
    dir: &Path,
    format: Format,
) -> Result<Vec<PathBuf>, EmitError> {
    fs::create_dir_all(dir).map_err(|source| EmitError {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::with_capacity(artifacts.len() + 1);
    let report_file = Artifact {
        name: report_file_name(format).to_string(),
        bytes: render_report(report, format),
    };
    for a in artifacts.iter().chain(std::iter::once(&report_file)) {
        let path = dir.join(&a.name);
        fs::write(&path, &a.bytes).map_err(|source| EmitError {
            path: path.clone(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}
