//! Pre-run validation against the Zeno-freeness hypothesis `c_i > beta_i(2 w_bar_i)`.

use std::fmt;

use noisy_etc::etm::Derived;

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub name: String,
    pub scheme: &'static str,
    pub allow_zeno: bool,
    pub derived: Vec<Derived>,
    pub c: Vec<f64>,
    /// `beta_i(2 w_bar_i)`; zero for the time-regularized scheme.
    pub bound: Vec<f64>,
    pub pass: Vec<bool>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.pass.iter().all(|&p| p)
    }

    /// Whether `run` will accept the configuration.
    pub fn accepted(&self) -> bool {
        self.all_pass() || self.allow_zeno
    }
}

/// Computes derived constants and per-agent verdicts without simulating.
pub fn validate(config: &RunConfig) -> Result<ValidationReport, CliError> {
    let plant = config.plant()?;
    let scheme = config.scheme(&plant, true)?;
    config.noise(plant.n())?;
    Ok(ValidationReport {
        name: config.name.clone(),
        scheme: scheme.kind(),
        allow_zeno: config.etm.allow_zeno,
        derived: scheme.derived(),
        c: scheme.common().c.clone(),
        bound: scheme.c_lower_bound(),
        pass: scheme.zeno_guarantee(),
    })
}

fn short(v: f64) -> String {
    if v == 0.0 || (1e-3..1e6).contains(&v.abs()) {
        format!("{v:.6}")
    } else {
        format!("{v:.4e}")
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} ({} trigger)", self.name, self.scheme)?;
        for d in &self.derived {
            let values: Vec<String> = d.values.iter().map(|&v| short(v)).collect();
            writeln!(f, "  {:<10} [{}]", d.name, values.join(", "))?;
        }
        for (i, ((c, bound), pass)) in self.c.iter().zip(&self.bound).zip(&self.pass).enumerate() {
            let verdict = if *pass { "pass" } else { "FAIL" };
            writeln!(
                f,
                "  agent {:>2}: c = {c:.3e}, beta(2 w_bar) = {bound:.3e}  {verdict}",
                i + 1
            )?;
        }
        match (self.all_pass(), self.allow_zeno) {
            (true, _) => write!(f, "  all agents satisfy c > beta(2 w_bar)"),
            (false, true) => write!(
                f,
                "  bound violated; accepted because allow_zeno = true (no Zeno-freeness guarantee)"
            ),
            (false, false) => write!(
                f,
                "  bound violated; the run will be refused (set etm.allow_zeno to override)"
            ),
        }
    }
}
