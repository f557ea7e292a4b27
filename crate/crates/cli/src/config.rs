use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

/// Environment variable naming a directory of user suite files.
pub const SUITE_DIR_VAR: &str = "TWISTOR_SUITE_DIR";

pub const DEFAULT_JET_ORDER: usize = 4;
pub const DEFAULT_POINTS: usize = 50;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Text,
}

/// Everything that determines a report. User suite files are this struct
/// serialized as JSON, with `suite` naming the built-in suite to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub suite: String,
    /// Label for the report when it differs from `suite` (user suites).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    /// Global tolerance override.
    #[serde(default)]
    pub tol: Option<f64>,
    /// Per-check overrides; these win over `tol`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default = "default_jet_order")]
    pub jet_order: usize,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Half-width of the sampling box; each suite has its own default.
    #[serde(default)]
    pub sampling_box: Option<f64>,
    #[serde(default)]
    pub format: Format,
    /// Example parameters, e.g. polynomial coefficients.
    #[serde(default)]
    pub params: BTreeMap<String, Vec<f64>>,
}

fn default_jet_order() -> usize {
    DEFAULT_JET_ORDER
}

fn default_points() -> usize {
    DEFAULT_POINTS
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl SuiteConfig {
    pub fn new(suite: impl Into<String>) -> Self {
        SuiteConfig {
            suite: suite.into(),
            name: None,
            description: None,
            tol: None,
            tolerances: BTreeMap::new(),
            jet_order: DEFAULT_JET_ORDER,
            points: DEFAULT_POINTS,
            seed: DEFAULT_SEED,
            sampling_box: None,
            format: Format::Json,
            params: BTreeMap::new(),
        }
    }

    pub fn label(&self) -> &str {
        self.name.as_deref().unwrap_or(&self.suite)
    }

    /// Tolerance for `check`: per-check override, then global, then `default`.
    pub fn tolerance(&self, check: &str, default: f64) -> f64 {
        self.tolerances.get(check).copied().or(self.tol).unwrap_or(default)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.points == 0 {
            return Err(CliError::Config("points must be positive".into()));
        }
        if !(2..=8).contains(&self.jet_order) {
            return Err(CliError::Config(format!("jet order {} outside 2..=8", self.jet_order)));
        }
        let tols = self.tol.iter().chain(self.tolerances.values());
        if let Some(t) = tols.into_iter().find(|t| !t.is_finite() || **t < 0.0) {
            return Err(CliError::Config(format!("invalid tolerance {t}")));
        }
        if let Some(b) = self.sampling_box {
            if !b.is_finite() || b <= 0.0 {
                return Err(CliError::Config(format!("invalid sampling box {b}")));
            }
        }
        if let Some((k, _)) = self.params.iter().find(|(_, v)| v.iter().any(|x| !x.is_finite())) {
            return Err(CliError::Config(format!("parameter {k:?} has a non-finite value")));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: SuiteConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies a `k=v` parameter, where `v` is a comma-separated list of numbers.
    /// `box=R` sets the sampling box.
    pub fn set_param(&mut self, kv: &str) -> Result<(), CliError> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("parameter {kv:?} is not of the form k=v")))?;
        let values = v
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Config(format!("parameter {k:?}: {e}")))?;
        if k == "box" {
            let [b] = values[..] else {
                return Err(CliError::Config("box takes a single value".into()));
            };
            self.sampling_box = Some(b);
        } else {
            self.params.insert(k.to_string(), values);
        }
        Ok(())
    }
}

pub fn suite_dir() -> Option<PathBuf> {
    std::env::var_os(SUITE_DIR_VAR).map(PathBuf::from)
}

/// Reads `<dir>/<name>.json`; `Ok(None)` if there is no such file.
pub fn load_user_suite(dir: &Path, name: &str) -> Result<Option<SuiteConfig>, CliError> {
    if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
        return Ok(None);
    }
    let path = dir.join(format!("{name}.json"));
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(CliError::Config(format!("{}: {e}", path.display()))),
    };
    let mut cfg = SuiteConfig::from_json(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    cfg.name.get_or_insert_with(|| name.to_string());
    Ok(Some(cfg))
}

/// Names of the `*.json` files in `dir`, sorted.
pub fn user_suite_names(dir: &Path) -> Vec<String> {
    let Ok(entries) = std::fs::read_dir(dir) else { return Vec::new() };
    let mut names: Vec<String> = entries
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            let p = e.path();
            (p.extension()? == "json").then(|| p.file_stem()?.to_str().map(String::from))?
        })
        .collect();
    names.sort();
    names
}
