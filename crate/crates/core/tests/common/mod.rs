#![allow(dead_code)]

use noisy_etc::etm::{
    CommonParams, DolkParams, DolkScheme, GarciaForm, GarciaParams, GarciaScheme, ResetMode,
    SigmaForm, TriggerMode, TriggerScheme,
};
use noisy_etc::{Graph, NoiseSignal, Plant, Scenario};

pub const H: f64 = 1e-4;
pub const W_BAR: f64 = 1e-4;

pub fn reference_x0() -> Vec<f64> {
    vec![8.0, 6.0, 4.0, 2.0, -2.0, -4.0, -6.0, -8.0]
}

pub fn garcia(graph: &Graph, c: f64, w_bar: f64, allow_zeno: bool) -> TriggerScheme {
    let n = graph.n();
    TriggerScheme::Garcia(
        GarciaScheme::new(
            GarciaParams {
                a: 0.1,
                sigma: vec![0.5; n],
                form: GarciaForm::Modified,
                common: CommonParams::uniform(
                    n,
                    TriggerMode::Static,
                    c,
                    0.0,
                    w_bar,
                    0.05,
                    allow_zeno,
                ),
            },
            graph,
        )
        .unwrap(),
    )
}

pub fn dolk(graph: &Graph, c: f64, reset: ResetMode) -> TriggerScheme {
    let n = graph.n();
    TriggerScheme::Dolk(
        DolkScheme::new(
            DolkParams {
                a: 0.1,
                varrho: 0.05,
                mu: vec![0.05; n],
                alpha: vec![0.5; n],
                lambda: vec![0.2; n],
                sigma_form: SigmaForm::Original,
                reset,
                common: CommonParams::uniform(n, TriggerMode::Dynamic, c, 0.0, W_BAR, 0.05, false),
            },
            graph,
        )
        .unwrap(),
    )
}

/// Reference topology and initial condition, 8 s, seed 0.
pub fn reference_scenario(scheme: TriggerScheme) -> Scenario {
    let g = Graph::paper_topology();
    let noise = NoiseSignal::uniform(0, 8, W_BAR, 1e4).unwrap();
    let mut s = Scenario::new(Plant::Consensus(g), scheme, noise, reference_x0(), 8.0);
    s.decimate = 10;
    s
}

pub fn garcia_reference(c: f64) -> Scenario {
    reference_scenario(garcia(&Graph::paper_topology(), c, W_BAR, c == 0.0))
}

pub fn dolk_reference(c: f64, reset: ResetMode) -> Scenario {
    reference_scenario(dolk(&Graph::paper_topology(), c, reset))
}
