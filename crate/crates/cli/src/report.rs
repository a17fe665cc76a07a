//! CSV tables, JSON reports and exit codes.

use std::path::Path;

use serde_json::{json, Value};
use singular_nls::Error;

use crate::config::RunConfig;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

/// Column table written with 17 significant digits.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_number(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// Result of a command: a JSON body, an optional table and a verdict.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub body: Value,
    pub table: Option<Table>,
    pub passed: bool,
}

impl Report {
    pub fn json(&self, config: &RunConfig) -> Value {
        json!({
            "command": self.command,
            "version": singular_nls::VERSION,
            "passed": self.passed,
            "config": config,
            "result": self.body,
        })
    }

    /// Writes `<prefix>.json` (and `<prefix>.csv`), or prints the JSON.
    pub fn emit(&self, config: &RunConfig, output: Option<&Path>) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(&self.json(config)).expect("report serializes") + "\n";
        match output {
            Some(prefix) => {
                if let Some(dir) = prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir)?;
                }
                std::fs::write(prefix.with_extension("json"), text)?;
                if let Some(table) = &self.table {
                    std::fs::write(prefix.with_extension("csv"), table.to_csv())?;
                }
            }
            None => print!("{text}"),
        }
        Ok(())
    }
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::InvalidGrid(_)
        | Error::IncompatibleGrids(_)
        | Error::AsymmetricGrid
        | Error::InvalidParameter(_)
        | Error::LambertDomain(_)
        | Error::ExcludedParameterLine
        | Error::DegenerateScattering
        | Error::ZeroTime
        | Error::UnsupportedMethod { .. }
        | Error::OutsideGlobalRegime { .. }
        | Error::EvenConjugatePower(_)
        | Error::MissingTimeCoverage(_) => EXIT_CONFIG,
        Error::NonFinite(_) | Error::ContractionFailed { .. } | Error::SupportExplosion { .. } | Error::Numerical(_) => {
            EXIT_NUMERICAL
        }
    }
}

/// Diagnostic JSON for a failed command.
pub fn error_json(command: &str, e: &Error, config: Option<&RunConfig>) -> Value {
    let mut v = json!({
        "command": command,
        "version": singular_nls::VERSION,
        "passed": false,
        "error": e.to_string(),
    });
    if let Error::ContractionFailed { iterations, ratio } = e {
        v["iterations"] = json!(iterations);
        v["last_ratio"] = json!(ratio);
    }
    if let Some(c) = config {
        v["config"] = json!(c);
    }
    v
}
