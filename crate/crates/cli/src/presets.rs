//! Named experiment catalog.

use crate::config::{
    EtmConfig, FormConfig, GraphConfig, ModeConfig, NoiseConfig, PerAgent, ResetConfig, RunConfig,
    SchemeKind, SimConfig,
};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PresetInfo {
    pub name: &'static str,
    pub description: &'static str,
    /// Experiment the preset reproduces.
    pub reproduces: &'static str,
}

pub const PRESETS: [PresetInfo; 8] = [
    PresetInfo {
        name: "garcia-c0",
        description:
            "static Garcia trigger without space regularization (c = 0); Zeno-like collapse",
        reproduces: "Zeno-like collapse, c = 0",
    },
    PresetInfo {
        name: "garcia-c2e-6",
        description: "static Garcia trigger with c = 2e-6 above the noise bound 1.2e-6",
        reproduces: "regularized static trigger",
    },
    PresetInfo {
        name: "dolk-c0",
        description: "dynamic time-regularized Dolk trigger, theta = 0, c = 0",
        reproduces: "dwell-time trigger, c = 0",
    },
    PresetInfo {
        name: "dolk-c1e-7",
        description: "dynamic time-regularized Dolk trigger, theta = 0, c = 1e-7",
        reproduces: "dwell-time trigger, c > 0",
    },
    PresetInfo {
        name: "dolk-remark5",
        description: "Dolk trigger with the noise-aware eta reset",
        reproduces: "noise-aware eta reset",
    },
    PresetInfo {
        name: "berneburg-demo",
        description: "Berneburg trigger on a weight-balanced 8-agent digraph (rings 1 and 3)",
        reproduces: "weight-balanced digraph",
    },
    PresetInfo {
        name: "single-scalar-demo",
        description: "single-system trigger on a scalar integrator, c = 1e-7 above the bound 8e-8",
        reproduces: "single-system construction",
    },
    PresetInfo {
        name: "table1-contrast",
        description: "original vs modified Garcia trigger under identical noise, side by side",
        reproduces: "noise-naive vs noise-aware rule",
    },
];

pub fn list_presets() -> &'static [PresetInfo] {
    &PRESETS
}

fn reference_x0() -> Vec<f64> {
    vec![8.0, 6.0, 4.0, 2.0, -2.0, -4.0, -6.0, -8.0]
}

fn reference_noise() -> NoiseConfig {
    NoiseConfig {
        seed: 0,
        amplitude: PerAgent::One(1e-4),
        sample_rate_hz: 1e4,
    }
}

fn reference_sim() -> SimConfig {
    SimConfig {
        t_final: 8.0,
        step: 1e-4,
        refinement: false,
        decimate: 10,
        x0: reference_x0(),
        e0: None,
        what_w0: None,
        eta0: None,
        tau0: None,
    }
}

fn etm(scheme: SchemeKind, mode: ModeConfig, c: f64) -> EtmConfig {
    EtmConfig {
        scheme,
        mode,
        c: PerAgent::One(c),
        theta: PerAgent::One(0.0),
        eps_eta: PerAgent::One(0.05),
        allow_zeno: false,
        sigma: None,
        a: None,
        form: None,
        varrho: None,
        mu: None,
        alpha: None,
        lambda: None,
        reset: None,
        rho: None,
    }
}

fn garcia(name: &str, description: &str, c: f64, form: FormConfig) -> RunConfig {
    let mut etm = etm(SchemeKind::Garcia, ModeConfig::Static, c);
    etm.a = Some(0.1);
    etm.sigma = Some(PerAgent::One(0.5));
    etm.form = Some(form);
    etm.allow_zeno = c == 0.0;
    RunConfig {
        name: name.into(),
        description: description.into(),
        graph: GraphConfig::Reference,
        etm,
        noise: reference_noise(),
        sim: reference_sim(),
    }
}

fn dolk(name: &str, description: &str, c: f64, reset: ResetConfig) -> RunConfig {
    let mut etm = etm(SchemeKind::Dolk, ModeConfig::Dynamic, c);
    etm.a = Some(0.1);
    etm.varrho = Some(0.05);
    etm.mu = Some(PerAgent::One(0.05));
    etm.alpha = Some(PerAgent::One(0.5));
    etm.lambda = Some(PerAgent::One(0.2));
    etm.form = Some(FormConfig::Original);
    etm.reset = Some(reset);
    RunConfig {
        name: name.into(),
        description: description.into(),
        graph: GraphConfig::Reference,
        etm,
        noise: reference_noise(),
        sim: reference_sim(),
    }
}

fn berneburg() -> RunConfig {
    let mut edges = Vec::new();
    for i in 1..=8 {
        edges.push(format!("{i} {} 1", i % 8 + 1));
        edges.push(format!("{i} {} 1", (i + 2) % 8 + 1));
    }
    let mut etm = etm(SchemeKind::Berneburg, ModeConfig::Static, 1e-6);
    etm.sigma = Some(PerAgent::One(0.5));
    etm.rho = Some(crate::config::RhoConfig::Rule("half-over-degree".into()));
    RunConfig {
        name: "berneburg-demo".into(),
        description: PRESETS[5].description.into(),
        graph: GraphConfig::Directed { n: 8, edges },
        etm,
        noise: reference_noise(),
        sim: reference_sim(),
    }
}

fn single() -> RunConfig {
    let mut etm = etm(SchemeKind::Single, ModeConfig::Static, 1e-7);
    etm.sigma = Some(PerAgent::One(0.5));
    let mut sim = reference_sim();
    sim.x0 = vec![8.0];
    RunConfig {
        name: "single-scalar-demo".into(),
        description: PRESETS[6].description.into(),
        graph: GraphConfig::Integrator { gain: 1.0 },
        etm,
        noise: reference_noise(),
        sim,
    }
}

/// Configurations of a preset; `table1-contrast` has two variants, the
/// others one.
pub fn resolve(name: &str) -> Result<Vec<RunConfig>, CliError> {
    let d = |k: usize| PRESETS[k].description;
    Ok(match name {
        "garcia-c0" => vec![garcia(name, d(0), 0.0, FormConfig::Modified)],
        "garcia-c2e-6" => vec![garcia(name, d(1), 2e-6, FormConfig::Modified)],
        "dolk-c0" => vec![dolk(name, d(2), 0.0, ResetConfig::Standard)],
        "dolk-c1e-7" => vec![dolk(name, d(3), 1e-7, ResetConfig::Standard)],
        "dolk-remark5" => vec![dolk(name, d(4), 0.0, ResetConfig::Remark5)],
        "berneburg-demo" => vec![berneburg()],
        "single-scalar-demo" => vec![single()],
        "table1-contrast" => {
            let mut original = garcia(
                "table1-contrast-original",
                "original Garcia trigger sigma (1 - a N) u^2 - (N / a) e~^2, no regularization",
                0.0,
                FormConfig::Original,
            );
            original.etm.allow_zeno = true;
            let modified = garcia(
                "table1-contrast-modified",
                "modified Garcia trigger with c = 2e-6",
                2e-6,
                FormConfig::Modified,
            );
            vec![original, modified]
        }
        _ => return Err(CliError::UnknownPreset(name.into())),
    })
}

/// Every preset variant, in catalog order.
pub fn all() -> Vec<RunConfig> {
    PRESETS
        .iter()
        .flat_map(|p| resolve(p.name).expect("catalog entries resolve"))
        .collect()
}
