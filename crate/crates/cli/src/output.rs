//! Artifact writers. Floats use 17 significant digits so files round-trip.

use std::fs;
use std::path::Path;

use noisy_etc::engine::{REFINE_TOL, TRIGGER_TOL};
use noisy_etc::invariants::{ETA_FLOOR, MEAN_TOL};
use noisy_etc::metrics::{ConsensusMetrics, InterEventStats, LyapunovSeries};
use noisy_etc::{Scenario, SolutionTrace};

use crate::config::RunConfig;
use crate::error::CliError;

pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    CliError::io(path, std::io::Error::other(e))
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>, CliError> {
    csv::Writer::from_path(path).map_err(|e| csv_err(path, e))
}

pub fn write_states(
    path: &Path,
    trace: &SolutionTrace,
    consensus: &ConsensusMetrics,
) -> Result<(), CliError> {
    let n = trace.samples[0].state.n();
    let mut w = writer(path)?;
    let mut header = vec!["t".to_string(), "j".to_string()];
    for block in ["x", "e", "what_w", "eta", "tau"] {
        header.extend((1..=n).map(|i| format!("{block}{i}")));
    }
    header.push("distance".into());
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for (sample, d) in trace.samples.iter().zip(&consensus.distance) {
        let mut row = vec![num(sample.time.t), sample.time.j.to_string()];
        row.extend(sample.state.as_slice().iter().map(|&v| num(v)));
        row.push(num(*d));
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_events(
    path: &Path,
    trace: &SolutionTrace,
    lyapunov: &LyapunovSeries,
) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record([
        "agent", "t", "j", "gap", "psi", "delta_u", "u", "e_tilde", "noise",
    ])
    .map_err(|e| csv_err(path, e))?;
    for (ev, du) in trace.events.iter().zip(&lyapunov.event_delta) {
        w.write_record([
            (ev.agent + 1).to_string(),
            num(ev.time.t),
            ev.time.j.to_string(),
            opt(ev.gap),
            num(ev.psi),
            num(*du),
            num(ev.u),
            num(ev.e_tilde),
            num(ev.noise),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_metrics(
    path: &Path,
    trace: &SolutionTrace,
    stats: &[InterEventStats],
    consensus: &ConsensusMetrics,
) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record([
        "agent",
        "events",
        "min_gap",
        "mean_gap",
        "final_x",
        "final_distance",
    ])
    .map_err(|e| csv_err(path, e))?;
    let x = trace.final_sample().state.x();
    for (i, s) in stats.iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            s.count.to_string(),
            opt(s.min),
            opt(s.mean),
            num(x[i]),
            num(consensus.final_distance),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    let min = stats.iter().filter_map(|s| s.min).reduce(f64::min);
    w.write_record([
        "all".to_string(),
        trace.events.len().to_string(),
        opt(min),
        String::new(),
        String::new(),
        num(consensus.final_distance),
    ])
    .map_err(|e| csv_err(path, e))?;
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Configuration echo plus `[derived]`, `[tolerances]` and `[run]`. The file
/// is itself a valid configuration.
pub fn manifest_string(
    config: &RunConfig,
    scenario: &Scenario,
    trace: &SolutionTrace,
    consensus: &ConsensusMetrics,
) -> String {
    let mut table = toml::Table::try_from(config).expect("configuration serializes");
    let floats = |v: &[f64]| toml::Value::Array(v.iter().map(|&x| toml::Value::Float(x)).collect());

    let mut derived = toml::Table::new();
    for d in scenario.scheme.derived() {
        derived.insert(d.name.into(), floats(&d.values));
    }
    derived.insert(
        "c_lower_bound".into(),
        floats(&scenario.scheme.c_lower_bound()),
    );
    derived.insert(
        "zeno_guarantee".into(),
        toml::Value::Array(
            scenario
                .scheme
                .zeno_guarantee()
                .into_iter()
                .map(toml::Value::Boolean)
                .collect(),
        ),
    );
    table.insert("derived".into(), toml::Value::Table(derived));

    let mut tol = toml::Table::new();
    tol.insert("trigger".into(), toml::Value::Float(TRIGGER_TOL));
    tol.insert("refinement_bracket".into(), toml::Value::Float(REFINE_TOL));
    tol.insert("eta_floor".into(), toml::Value::Float(ETA_FLOOR));
    tol.insert("mean_conservation".into(), toml::Value::Float(MEAN_TOL));
    table.insert("tolerances".into(), toml::Value::Table(tol));

    let mut run = toml::Table::new();
    run.insert("seed".into(), toml::Value::Integer(trace.seed as i64));
    run.insert(
        "events".into(),
        toml::Value::Integer(trace.events.len() as i64),
    );
    run.insert(
        "samples".into(),
        toml::Value::Integer(trace.samples.len() as i64),
    );
    run.insert(
        "final_distance".into(),
        toml::Value::Float(consensus.final_distance),
    );
    run.insert(
        "final_max_deviation".into(),
        toml::Value::Float(consensus.final_max_deviation),
    );
    table.insert("run".into(), toml::Value::Table(run));

    toml::to_string(&table).expect("manifest serializes")
}

pub fn write_manifest(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}
