use twistor_core::checkers::CheckReport;
use twistor_core::morphism::registry::Params;
use twistor_core::TwistorError;

use crate::config::{self, SuiteConfig};
use crate::rng::CheckRng;
use crate::{CliError, Report};

mod algebra;
mod cp3;
mod euclid;
mod flat;
mod isotropy;
mod jacobi;
mod lifts;

type SuiteFn = fn(&Ctx) -> Result<Vec<CheckReport>, CliError>;

struct Suite {
    name: &'static str,
    description: &'static str,
    params: &'static [&'static str],
    run: SuiteFn,
}

// sorted by name
const SUITES: &[Suite] = &[
    Suite {
        name: "cp3-data",
        description: "CP3 twistor data: constraint equations, linear system, Jacobian at the origin",
        params: &["P", "Q", "R"],
        run: cp3::run,
    },
    Suite {
        name: "euclid-hm",
        description: "harmonic morphism on R6 from twistor data with f(z) = z (parameter f)",
        params: &["f"],
        run: euclid::run,
    },
    Suite {
        name: "flat-connection",
        description: "Maurer-Cartan flatness, product integration, path independence, convergence order",
        params: &[],
        run: flat::run,
    },
    Suite {
        name: "isotropy-lemma",
        description: "full versus diagonal real isotropy on random surface polynomials",
        params: &[],
        run: isotropy::run,
    },
    Suite {
        name: "jacobi-flat",
        description: "first-order tension against the flat Jacobi operator",
        params: &[],
        run: jacobi::run,
    },
    Suite {
        name: "lifts-r4",
        description: "strictly compatible twistor lifts of surfaces in R4 and their vertical conditions",
        params: &[],
        run: lifts::run,
    },
    Suite {
        name: "sigma-plus-algebra",
        description: "Hermitian structures: isotropic subspaces, SO action, m_J, mu chart",
        params: &[],
        run: algebra::run,
    },
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteInfo {
    pub name: String,
    pub description: String,
    /// Defined by a file in the user suite directory.
    pub user: bool,
}

/// Built-in suites, then user suites, each sorted by name.
pub fn list_suites() -> Vec<SuiteInfo> {
    let mut out: Vec<SuiteInfo> = SUITES
        .iter()
        .map(|s| SuiteInfo {
            name: s.name.into(),
            description: s.description.into(),
            user: false,
        })
        .collect();
    if let Some(dir) = config::suite_dir() {
        for name in config::user_suite_names(&dir) {
            if builtin(&name).is_some() {
                continue;
            }
            let description = match config::load_user_suite(&dir, &name) {
                Ok(Some(cfg)) => cfg.description.unwrap_or_else(|| format!("user suite based on {}", cfg.suite)),
                Ok(None) => continue,
                Err(e) => format!("invalid: {e}"),
            };
            out.push(SuiteInfo {
                name,
                description,
                user: true,
            });
        }
    }
    out
}

fn builtin(name: &str) -> Option<&'static Suite> {
    SUITES.iter().find(|s| s.name == name)
}

/// Configuration for `name`: defaults for a built-in suite, or the user file
/// from the suite directory.
pub fn resolve(name: &str) -> Result<SuiteConfig, CliError> {
    if builtin(name).is_some() {
        return Ok(SuiteConfig::new(name));
    }
    if let Some(dir) = config::suite_dir() {
        if let Some(cfg) = config::load_user_suite(&dir, name)? {
            return Ok(cfg);
        }
    }
    Err(CliError::UnknownSuite(name.into()))
}

pub fn run_suite(config: &SuiteConfig) -> Result<Report, CliError> {
    let suite = builtin(&config.suite).ok_or_else(|| CliError::UnknownSuite(config.suite.clone()))?;
    config.validate()?;
    if let Some(bad) = config.params.keys().find(|k| !suite.params.contains(&k.as_str())) {
        return Err(CliError::Config(format!(
            "suite {} does not take parameter {bad:?} (accepted: {:?})",
            suite.name, suite.params
        )));
    }
    if let Some(bad) = config.tolerances.keys().find(|k| k.is_empty()) {
        return Err(CliError::Config(format!("empty check name in tolerances: {bad:?}")));
    }
    log::info!("running suite {} with seed {}", suite.name, config.seed);
    let checks = (suite.run)(&Ctx { cfg: config })?;
    if let Some(bad) = config.tolerances.keys().find(|k| !checks.iter().any(|c| &c.name == *k)) {
        return Err(CliError::Config(format!("tolerance given for unknown check {bad:?}")));
    }
    Ok(Report::new(config.clone(), checks))
}

/// What a suite sees of the configuration.
pub(crate) struct Ctx<'a> {
    cfg: &'a SuiteConfig,
}

impl Ctx<'_> {
    pub fn rng(&self, check: &str) -> CheckRng {
        CheckRng::new(self.cfg.seed, check)
    }

    pub fn tol(&self, check: &str, default: f64) -> f64 {
        self.cfg.tolerance(check, default)
    }

    pub fn points(&self) -> usize {
        self.cfg.points
    }

    pub fn order(&self) -> usize {
        self.cfg.jet_order
    }

    pub fn radius(&self, default: f64) -> f64 {
        self.cfg.sampling_box.unwrap_or(default)
    }

    pub fn params(&self) -> &Params {
        &self.cfg.params
    }

    /// Report with the configured tolerance for `name`.
    pub fn report(&self, name: &str, residuals: Vec<f64>, default_tol: f64) -> CheckReport {
        CheckReport::new(name, residuals, self.tol(name, default_tol))
    }
}

/// Attaches the check name to a library error.
pub(crate) fn eval<T>(context: &str, r: Result<T, TwistorError>) -> Result<T, CliError> {
    r.map_err(|source| CliError::Evaluation {
        context: context.to_string(),
        source,
    })
}

/// `0` when the condition holds, `1` otherwise: residual of a yes/no check.
pub(crate) fn indicator(ok: bool) -> f64 {
    if ok {
        0.0
    } else {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_sorted_and_unique() {
        let names: Vec<&str> = SUITES.iter().map(|s| s.name).collect();
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(names, sorted);
    }

    #[test]
    fn unknown_suite_and_params() {
        assert!(matches!(run_suite(&SuiteConfig::new("nonexistent")), Err(CliError::UnknownSuite(_))));
        let mut cfg = SuiteConfig::new("sigma-plus-algebra");
        cfg.params.insert("f".into(), vec![1.0]);
        assert!(matches!(run_suite(&cfg), Err(CliError::Config(_))));
        let mut cfg = SuiteConfig::new("sigma-plus-algebra");
        cfg.points = 2;
        cfg.tolerances.insert("no-such-check".into(), 1.0);
        assert!(matches!(run_suite(&cfg), Err(CliError::Config(_))));
    }
}
