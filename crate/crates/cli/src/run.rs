//! Running configurations and writing their artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use noisy_etc::invariants::{check_trace, Check};
use noisy_etc::metrics::{consensus_metrics, inter_event_stats, lyapunov_series};
use noisy_etc::simulate;

use crate::config::{Overrides, RunConfig};
use crate::error::CliError;
use crate::output;
use crate::presets;

pub const STATES: &str = "states.csv";
pub const EVENTS: &str = "events.csv";
pub const METRICS: &str = "metrics.csv";
pub const MANIFEST: &str = "manifest.toml";

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub name: String,
    pub dir: PathBuf,
    pub events: usize,
    pub min_gap: Option<f64>,
    pub final_distance: f64,
    pub final_max_deviation: f64,
    pub checks: Vec<Check>,
}

impl RunOutcome {
    pub fn summary(&self) -> String {
        let failed: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.to_string())
            .collect();
        let gap = self.min_gap.map_or("-".to_string(), |g| format!("{g:.4e}"));
        let checks = if failed.is_empty() {
            "checks ok".to_string()
        } else {
            failed.join("; ")
        };
        format!(
            "{}: {} events, min gap {gap} s, final distance {:.4e}, max deviation {:.4e}, {checks} -> {}",
            self.name,
            self.events,
            self.final_distance,
            self.final_max_deviation,
            self.dir.display()
        )
    }
}

/// Simulates `config` and writes states, events, metrics and manifest to `dir`.
pub fn run(config: &RunConfig, dir: &Path) -> Result<RunOutcome, CliError> {
    let scenario = config.scenario()?;
    let trace = simulate(&scenario)?;
    let n = scenario.n();
    let stats = inter_event_stats(&trace, n);
    let consensus = consensus_metrics(&trace, &scenario.plant);
    let lyapunov = lyapunov_series(&trace, &scenario.plant, &scenario.scheme);
    let checks = check_trace(&trace, &scenario);

    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    output::write_states(&dir.join(STATES), &trace, &consensus)?;
    output::write_events(&dir.join(EVENTS), &trace, &lyapunov)?;
    output::write_metrics(&dir.join(METRICS), &trace, &stats, &consensus)?;
    let manifest = output::manifest_string(config, &scenario, &trace, &consensus);
    output::write_manifest(&dir.join(MANIFEST), &manifest)?;

    Ok(RunOutcome {
        name: config.name.clone(),
        dir: dir.to_path_buf(),
        events: trace.events.len(),
        min_gap: stats.iter().filter_map(|s| s.min).reduce(f64::min),
        final_distance: consensus.final_distance,
        final_max_deviation: consensus.final_max_deviation,
        checks,
    })
}

/// Output directory of each preset variant: `out` for single-variant
/// presets, `out/<variant>` otherwise.
pub fn preset_jobs(
    name: &str,
    overrides: &Overrides,
    out: &Path,
) -> Result<Vec<(RunConfig, PathBuf)>, CliError> {
    let variants = presets::resolve(name)?;
    let single = variants.len() == 1;
    Ok(variants
        .into_iter()
        .map(|mut config| {
            overrides.apply(&mut config);
            let dir = if single {
                out.to_path_buf()
            } else {
                let suffix = config
                    .name
                    .strip_prefix(&format!("{name}-"))
                    .unwrap_or(&config.name)
                    .to_string();
                out.join(suffix)
            };
            (config, dir)
        })
        .collect())
}

pub fn run_preset(
    name: &str,
    overrides: &Overrides,
    out: &Path,
) -> Result<Vec<RunOutcome>, CliError> {
    preset_jobs(name, overrides, out)?
        .iter()
        .map(|(config, dir)| run(config, dir))
        .collect()
}

/// Runs presets concurrently, each into `out/<preset>`. Results keep the
/// order of `names` (and of variants within a preset).
pub fn batch(
    names: &[String],
    overrides: &Overrides,
    out: &Path,
) -> Result<Vec<Result<RunOutcome, CliError>>, CliError> {
    let mut jobs = Vec::new();
    for name in names {
        jobs.extend(preset_jobs(name, overrides, &out.join(name))?);
    }
    Ok(noisy_etc::batch::map(&jobs, |(config, dir)| {
        run(config, dir)
    }))
}

/// Expands `"all"` and comma-separated lists into preset names.
pub fn batch_names(list: &str) -> Vec<String> {
    if list.trim() == "all" {
        return presets::list_presets()
            .iter()
            .map(|p| p.name.to_string())
            .collect();
    }
    list.split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}
