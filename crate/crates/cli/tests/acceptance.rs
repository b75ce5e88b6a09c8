//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use noisy_etc::etm::{gamma_sigma_from, garcia_beta, phi_crossing_time, tau_miet, SigmaForm};
use noisy_etc::invariants::{check_trace, determinism};
use noisy_etc::metrics::{consensus_metrics, inter_event_stats, lyapunov_series, zeno_indicator};
use noisy_etc::{simulate, Scenario, SolutionTrace};
use noisy_etc_cli::presets::{self, list_presets};
use noisy_etc_cli::{batch, Overrides};

const H: f64 = 1e-4;

struct Run {
    scenario: Scenario,
    trace: SolutionTrace,
    elapsed: Duration,
}

#[derive(Default)]
struct Runs(HashMap<String, Run>);

impl Runs {
    /// Runs (once) the first variant of `preset`, or the variant named `name`.
    fn get(&mut self, name: &str) -> &Run {
        if !self.0.contains_key(name) {
            let config = presets::all()
                .into_iter()
                .find(|c| c.name == name)
                .expect("known preset variant");
            let scenario = config.scenario().expect("preset builds");
            let start = Instant::now();
            let trace = simulate(&scenario).expect("preset simulates");
            let elapsed = start.elapsed();
            self.0.insert(
                name.to_string(),
                Run {
                    scenario,
                    trace,
                    elapsed,
                },
            );
        }
        &self.0[name]
    }
}

fn fine(runs: &mut Runs, name: &str) -> (Scenario, SolutionTrace) {
    let s = runs.get(name).scenario.with_step(H / 10.0);
    let t = simulate(&s).expect("oracle run");
    (s, t)
}

fn c1() -> (bool, String) {
    let a = tau_miet(0.5, 0.76, 4.478, 0.2).unwrap();
    let b = tau_miet(0.5, 0.665, 5.482, 0.2).unwrap();
    let ok = (a - 0.1562).abs() <= 5e-4 && (b - 0.1180).abs() <= 5e-4;
    (
        ok,
        format!("tau_MIET = {a:.5}, {b:.5} (expected 0.1562, 0.1180 within 5e-4)"),
    )
}

fn c2() -> (bool, String) {
    let (g2, _) = gamma_sigma_from(0.1, 0.05, 0.05, 2, SigmaForm::Original).unwrap();
    let (g3, _) = gamma_sigma_from(0.1, 0.05, 0.05, 3, SigmaForm::Original).unwrap();
    let ok = (g2 - 4.478).abs() <= 1e-3 && (g3 - 5.482).abs() <= 1e-3;
    (ok, format!("gamma = {g2:.5} (N=2), {g3:.5} (N=3)"))
}

fn c3() -> (bool, String) {
    let b = garcia_beta(0.1, 3, 2.0 * 1e-4);
    let ok = ((b - 1.2e-6) / 1.2e-6).abs() <= 1e-12;
    (
        ok,
        format!("beta(2 w_bar) = {b:e} for N=3, a=0.1, w_bar=1e-4"),
    )
}

fn c4() -> (bool, String) {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (sigma, gamma) in [(0.76, 4.478), (0.665, 5.482)] {
        let closed = tau_miet(0.5, sigma, gamma, 0.2).unwrap();
        let numeric = phi_crossing_time(0.5, sigma, gamma, 0.2, 1e-5).unwrap();
        worst = worst.max(((numeric - closed) / closed).abs());
    }
    let elapsed = start.elapsed();
    let ok = worst <= 1e-6 && elapsed < Duration::from_secs(1);
    (ok, format!("max relative gap {worst:.2e} in {elapsed:.2?}"))
}

fn c5(runs: &mut Runs) -> (bool, String) {
    let mut ok = true;
    let mut notes = Vec::new();
    for name in ["dolk-c0", "dolk-c1e-7"] {
        let run = runs.get(name);
        let tau = run.scenario.scheme.tau_miet().unwrap();
        let stats = inter_event_stats(&run.trace, 8);
        let margin = stats
            .iter()
            .zip(tau)
            .filter_map(|(s, t)| s.min.map(|m| m - (t - H)))
            .fold(f64::INFINITY, f64::min);
        let pass = margin >= 0.0
            && stats.iter().all(|s| s.count >= 2)
            && run.elapsed < Duration::from_secs(5);
        ok &= pass;
        notes.push(format!(
            "{name}: min(gap - tau_MIET + h) = {margin:.4} s in {:.2?}",
            run.elapsed
        ));
    }
    (ok, notes.join("; "))
}

fn c6(runs: &mut Runs) -> (bool, String) {
    let collapse = |t: &SolutionTrace, h: f64| {
        zeno_indicator(t, 8, 2.0)
            .into_iter()
            .flatten()
            .fold(f64::INFINITY, f64::min)
            / h
    };
    let separation = |t: &SolutionTrace, h: f64| {
        let per_agent = zeno_indicator(t, 8, t.t_final);
        if per_agent.iter().any(Option::is_none) {
            return 0.0;
        }
        per_agent
            .into_iter()
            .flatten()
            .fold(f64::INFINITY, f64::min)
            / h
    };
    let c0 = collapse(&runs.get("garcia-c0").trace, H);
    let c2 = separation(&runs.get("garcia-c2e-6").trace, H);
    let (_, fine_c0) = fine(runs, "garcia-c0");
    let (_, fine_c2) = fine(runs, "garcia-c2e-6");
    let fc0 = collapse(&fine_c0, H / 10.0);
    let fc2 = separation(&fine_c2, H);
    let ok = c0 <= 10.0 && c2 >= 50.0 && fc0 <= 10.0 && fc2 >= 50.0;
    (
        ok,
        format!(
            "garcia-c0 trailing min gap {c0:.1} h, garcia-c2e-6 min gap {c2:.1} h; h/10 oracle: {fc0:.1} (h/10), {fc2:.1} h"
        ),
    )
}

fn c7(runs: &mut Runs) -> (bool, String) {
    let mut ok = true;
    let mut notes = Vec::new();
    for name in ["garcia-c2e-6", "dolk-c0", "dolk-c1e-7", "berneburg-demo"] {
        let run = runs.get(name);
        let dev = consensus_metrics(&run.trace, &run.scenario.plant).final_max_deviation;
        let (s, t) = fine(runs, name);
        let oracle = consensus_metrics(&t, &s.plant).final_max_deviation;
        ok &= dev <= 0.05 && oracle <= 0.05;
        notes.push(format!("{name} {dev:.2e} (h/10: {oracle:.2e})"));
    }
    (ok, format!("max |x_i(8)|: {}", notes.join(", ")))
}

fn c8(runs: &mut Runs) -> (bool, String) {
    let mut worst = f64::NEG_INFINITY;
    let mut events = 0;
    for name in ["dolk-c0", "dolk-c1e-7", "dolk-remark5"] {
        let run = runs.get(name);
        let series = lyapunov_series(&run.trace, &run.scenario.plant, &run.scenario.scheme);
        events += series.event_delta.len();
        worst = series.event_delta.iter().copied().fold(worst, f64::max);
    }
    (
        worst <= 1e-12 && events > 0,
        format!("max delta U = {worst:.3e} over {events} jumps"),
    )
}

fn c9(runs: &mut Runs) -> (bool, String) {
    let mut failures = Vec::new();
    let names: Vec<String> = presets::all().into_iter().map(|c| c.name).collect();
    for name in &names {
        let run = runs.get(name);
        let mut checks = check_trace(&run.trace, &run.scenario);
        checks.push(determinism(&run.trace, &run.scenario).expect("rerun"));
        for c in checks.into_iter().filter(|c| !c.passed) {
            failures.push(format!("{name}: {c}"));
        }
    }
    let ok = failures.is_empty();
    let detail = if ok {
        format!("{} preset runs, 7 checks each", names.len())
    } else {
        failures.join("; ")
    };
    (ok, detail)
}

fn c10() -> (bool, String) {
    let dir = tempfile::tempdir().expect("temp dir");
    let names: Vec<String> = list_presets().iter().map(|p| p.name.to_string()).collect();
    let start = Instant::now();
    let results = batch(&names, &Overrides::default(), dir.path()).expect("batch resolves");
    let elapsed = start.elapsed();
    let failed = results.iter().filter(|r| r.is_err()).count();
    let ok = names.len() >= 8 && failed == 0 && elapsed < Duration::from_secs(60);
    (
        ok,
        format!(
            "{} presets ({} runs, {failed} failed) in {elapsed:.2?}",
            names.len(),
            results.len()
        ),
    )
}

fn main() -> ExitCode {
    let mut runs = Runs::default();
    let results = vec![
        ("tau_MIET closed form", c1()),
        ("derived gamma", c2()),
        ("Garcia noise bound", c3()),
        ("phi-ODE vs closed form", c4()),
        ("dwell-time gaps in Dolk presets", c5(&mut runs)),
        ("Zeno contrast", c6(&mut runs)),
        ("practical consensus", c7(&mut runs)),
        ("Dolk jump monotonicity", c8(&mut runs)),
        ("invariant suite", c9(&mut runs)),
        ("full preset batch", c10()),
    ];
    let mut all = true;
    for (k, (title, (ok, detail))) in results.iter().enumerate() {
        all &= ok;
        println!(
            "criterion {:>2} [{}] {title}: {detail}",
            k + 1,
            if *ok { "PASS" } else { "FAIL" }
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
