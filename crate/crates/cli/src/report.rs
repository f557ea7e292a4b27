use std::fmt::Write as _;

use serde::Serialize;
use twistor_core::checkers::CheckReport;

use crate::config::{Format, SuiteConfig};
use crate::CliError;

/// Result of one suite run. Wall time is not part of it so that reruns are
/// byte-identical; the binary prints it on stderr.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub version: String,
    pub pass: bool,
    pub config: SuiteConfig,
    pub checks: Vec<CheckReport>,
}

impl Report {
    pub fn new(config: SuiteConfig, mut checks: Vec<CheckReport>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        Report {
            suite: config.label().to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            pass: checks.iter().all(|c| c.pass),
            config,
            checks,
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| CliError::Config(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    /// One line per check followed by the verdict.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "suite {} (version {}, seed {})", self.suite, self.version, self.config.seed);
        for c in &self.checks {
            let _ = write!(
                out,
                "{:4} {:<32} points {:>4}  max {:>10.3e}  tol {:.1e}",
                if c.pass { "ok" } else { "FAIL" },
                c.name,
                c.points,
                c.max_residual,
                c.tolerance
            );
            if c.degenerate > 0 {
                let _ = write!(out, "  degenerate {}", c.degenerate);
            }
            out.push('\n');
        }
        let _ = writeln!(out, "{}", if self.pass { "PASS" } else { "FAIL" });
        out
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => self.to_json(),
            Format::Text => Ok(self.to_text()),
        }
    }
}
