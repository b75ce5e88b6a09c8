//! Run configuration: a sectioned TOML document.
//!
//! Agent labels are 1-based everywhere in this file format. Per-agent
//! quantities accept either a scalar (applied to every agent) or a list.

use std::path::Path;

use serde::{Deserialize, Serialize};

use noisy_etc::etm::{
    BerneburgParams, BerneburgScheme, CommonParams, DolkParams, DolkScheme, EdgeRho, GarciaForm,
    GarciaParams, GarciaScheme, ResetMode, SigmaForm, SingleScheme, SingleSystemHooks, TriggerMode,
    TriggerScheme,
};
use noisy_etc::{Graph, NoiseSignal, Plant, Scenario};

use crate::error::CliError;

/// Sections a manifest adds on top of the configuration it echoes.
pub const MANIFEST_SECTIONS: [&str; 3] = ["derived", "tolerances", "run"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub graph: GraphConfig,
    pub etm: EtmConfig,
    pub noise: NoiseConfig,
    pub sim: SimConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphConfig {
    /// The fixed eight-agent undirected topology used in the experiments.
    #[serde(rename = "paper-fig2")]
    Reference,
    /// Edges as `"i j"` or `"i j w"` strings, 1-based.
    Undirected { n: usize, edges: Vec<String> },
    /// Arcs `i -> j` as `"i j"` or `"i j w"` strings, 1-based.
    Directed { n: usize, edges: Vec<String> },
    /// One scalar integrator `x' = -gain (x + e + w^)`.
    Integrator { gain: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerAgent {
    One(f64),
    Many(Vec<f64>),
}

impl PerAgent {
    pub fn expand(&self, key: &str, n: usize) -> Result<Vec<f64>, CliError> {
        match self {
            PerAgent::One(v) => Ok(vec![*v; n]),
            PerAgent::Many(v) if v.len() == n => Ok(v.clone()),
            PerAgent::Many(v) => Err(CliError::Config(format!(
                "{key}: expected 1 or {n} values, got {}",
                v.len()
            ))),
        }
    }

    /// The single value of a scalar entry.
    pub fn scalar(&self, key: &str) -> Result<f64, CliError> {
        match self {
            PerAgent::One(v) => Ok(*v),
            PerAgent::Many(v) if v.len() == 1 => Ok(v[0]),
            PerAgent::Many(_) => Err(CliError::Config(format!("{key}: expected a single value"))),
        }
    }
}

impl From<f64> for PerAgent {
    fn from(v: f64) -> Self {
        PerAgent::One(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    Garcia,
    Dolk,
    Berneburg,
    Single,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeConfig {
    #[default]
    Static,
    Dynamic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormConfig {
    Original,
    Modified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResetConfig {
    Standard,
    Remark5,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RhoConfig {
    /// `"half-over-degree"`.
    Rule(String),
    /// `"i j rho"` per arc, 1-based.
    PerArc(Vec<String>),
}

fn default_theta() -> PerAgent {
    PerAgent::One(0.0)
}

fn default_eps_eta() -> PerAgent {
    PerAgent::One(0.05)
}

/// Trigger settings. Scheme-specific keys are optional in the schema and
/// checked when the scheme is built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EtmConfig {
    pub scheme: SchemeKind,
    #[serde(default)]
    pub mode: ModeConfig,
    pub c: PerAgent,
    #[serde(default = "default_theta")]
    pub theta: PerAgent,
    #[serde(default = "default_eps_eta")]
    pub eps_eta: PerAgent,
    #[serde(default)]
    pub allow_zeno: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<PerAgent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    /// Garcia trigger form, or the sigma formula for Dolk.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<FormConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub varrho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<PerAgent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<PerAgent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<PerAgent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reset: Option<ResetConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<RhoConfig>,
}

fn default_sample_rate() -> f64 {
    1e4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    #[serde(default)]
    pub seed: u64,
    /// Bound `w_bar_i`; also used as the trigger's noise bound.
    pub amplitude: PerAgent,
    #[serde(default = "default_sample_rate")]
    pub sample_rate_hz: f64,
}

fn default_step() -> f64 {
    1e-4
}

fn default_decimate() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub t_final: f64,
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default)]
    pub refinement: bool,
    #[serde(default = "default_decimate")]
    pub decimate: usize,
    pub x0: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e0: Option<Vec<f64>>,
    /// Defaults to `w(0)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub what_w0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau0: Option<Vec<f64>>,
}

/// Command-line overrides applied on top of a configuration.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub t_final: Option<f64>,
    pub step: Option<f64>,
    pub decimate: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, config: &mut RunConfig) {
        if let Some(seed) = self.seed {
            config.noise.seed = seed;
        }
        if let Some(t) = self.t_final {
            config.sim.t_final = t;
        }
        if let Some(h) = self.step {
            config.sim.step = h;
        }
        if let Some(k) = self.decimate {
            config.sim.decimate = k;
        }
    }
}

fn parse_triples(
    key: &str,
    entries: &[String],
    n: usize,
    weight_default: Option<f64>,
) -> Result<Vec<(usize, usize, f64)>, CliError> {
    entries
        .iter()
        .enumerate()
        .map(|(k, entry)| {
            let bad = |why: &str| CliError::Config(format!("{key}[{k}] = {entry:?}: {why}"));
            let parts: Vec<&str> = entry.split_whitespace().collect();
            let (i, j, w) = match (parts.as_slice(), weight_default) {
                ([i, j], Some(w)) => (*i, *j, w),
                ([i, j, w], _) => (
                    *i,
                    *j,
                    w.parse::<f64>()
                        .map_err(|_| bad("third field is not a number"))?,
                ),
                _ => return Err(bad("expected \"i j\" or \"i j value\"")),
            };
            let label = |s: &str| -> Result<usize, CliError> {
                match s.parse::<usize>() {
                    Ok(v) if (1..=n).contains(&v) => Ok(v - 1),
                    _ => Err(bad(&format!("agent labels run from 1 to {n}"))),
                }
            };
            Ok((label(i)?, label(j)?, w))
        })
        .collect()
}

fn required<T: Clone>(value: &Option<T>, key: &str, scheme: &str) -> Result<T, CliError> {
    value
        .clone()
        .ok_or_else(|| CliError::Config(format!("{key} is required for scheme {scheme}")))
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        for section in MANIFEST_SECTIONS {
            table.remove(section);
        }
        table
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))
    }

    /// Reads a configuration or a run manifest.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn plant(&self) -> Result<Plant, CliError> {
        Ok(match &self.graph {
            GraphConfig::Reference => Plant::Consensus(Graph::paper_topology()),
            GraphConfig::Undirected { n, edges } => Plant::Consensus(Graph::undirected(
                *n,
                &parse_triples("graph.edges", edges, *n, Some(1.0))?,
            )?),
            GraphConfig::Directed { n, edges } => Plant::Consensus(Graph::directed(
                *n,
                &parse_triples("graph.edges", edges, *n, Some(1.0))?,
            )?),
            GraphConfig::Integrator { gain } => Plant::Integrator { gain: *gain },
        })
    }

    /// Builds the trigger; `force_allow_zeno` skips the Zeno-bound check so
    /// derived constants can be reported for configs that would be refused.
    pub fn scheme(&self, plant: &Plant, force_allow_zeno: bool) -> Result<TriggerScheme, CliError> {
        let n = plant.n();
        let etm = &self.etm;
        let common = CommonParams {
            mode: match etm.mode {
                ModeConfig::Static => TriggerMode::Static,
                ModeConfig::Dynamic => TriggerMode::Dynamic,
            },
            c: etm.c.expand("etm.c", n)?,
            theta: etm.theta.expand("etm.theta", n)?,
            w_bar: self.noise.amplitude.expand("noise.amplitude", n)?,
            eps_eta: etm.eps_eta.expand("etm.eps_eta", n)?,
            allow_zeno: etm.allow_zeno || force_allow_zeno,
        };
        let graph = || {
            plant.graph().ok_or_else(|| {
                CliError::Config(format!("scheme {:?} needs a network graph", etm.scheme))
            })
        };
        Ok(match etm.scheme {
            SchemeKind::Garcia => {
                let form = match etm.form.unwrap_or(FormConfig::Modified) {
                    FormConfig::Modified => GarciaForm::Modified,
                    FormConfig::Original => GarciaForm::Original,
                };
                TriggerScheme::Garcia(GarciaScheme::new(
                    GarciaParams {
                        a: required(&etm.a, "etm.a", "garcia")?,
                        sigma: required(&etm.sigma, "etm.sigma", "garcia")?
                            .expand("etm.sigma", n)?,
                        form,
                        common,
                    },
                    graph()?,
                )?)
            }
            SchemeKind::Dolk => {
                let sigma_form = match etm.form.unwrap_or(FormConfig::Original) {
                    FormConfig::Original => SigmaForm::Original,
                    FormConfig::Modified => SigmaForm::Modified,
                };
                let reset = match etm.reset.unwrap_or(ResetConfig::Standard) {
                    ResetConfig::Standard => ResetMode::Standard,
                    ResetConfig::Remark5 => ResetMode::Remark5,
                };
                TriggerScheme::Dolk(DolkScheme::new(
                    DolkParams {
                        a: required(&etm.a, "etm.a", "dolk")?,
                        varrho: required(&etm.varrho, "etm.varrho", "dolk")?,
                        mu: required(&etm.mu, "etm.mu", "dolk")?.expand("etm.mu", n)?,
                        alpha: required(&etm.alpha, "etm.alpha", "dolk")?.expand("etm.alpha", n)?,
                        lambda: required(&etm.lambda, "etm.lambda", "dolk")?
                            .expand("etm.lambda", n)?,
                        sigma_form,
                        reset,
                        common,
                    },
                    graph()?,
                )?)
            }
            SchemeKind::Berneburg => {
                let rho = match &etm.rho {
                    None => EdgeRho::HalfOverDegree,
                    Some(RhoConfig::Rule(rule)) if rule == "half-over-degree" => EdgeRho::HalfOverDegree,
                    Some(RhoConfig::Rule(rule)) => {
                        return Err(CliError::Config(format!(
                            "etm.rho: unknown rule {rule:?} (expected \"half-over-degree\" or a list of \"i j rho\")"
                        )))
                    }
                    Some(RhoConfig::PerArc(arcs)) => EdgeRho::PerArc(parse_triples("etm.rho", arcs, n, None)?),
                };
                TriggerScheme::Berneburg(BerneburgScheme::new(
                    BerneburgParams {
                        rho,
                        sigma: required(&etm.sigma, "etm.sigma", "berneburg")?
                            .expand("etm.sigma", n)?,
                        common,
                    },
                    graph()?,
                )?)
            }
            SchemeKind::Single => {
                let Plant::Integrator { gain } = plant else {
                    return Err(CliError::Config(
                        "scheme single needs graph.kind = \"integrator\"".into(),
                    ));
                };
                let sigma = required(&etm.sigma, "etm.sigma", "single")?.scalar("etm.sigma")?;
                TriggerScheme::Single(SingleScheme::new(SingleSystemHooks::scalar_integrator(
                    *gain, sigma, common,
                )?)?)
            }
        })
    }

    pub fn noise(&self, n: usize) -> Result<NoiseSignal, CliError> {
        Ok(NoiseSignal::new(
            self.noise.seed,
            self.noise.amplitude.expand("noise.amplitude", n)?,
            self.noise.sample_rate_hz,
        )?)
    }

    pub fn scenario(&self) -> Result<Scenario, CliError> {
        let plant = self.plant()?;
        let n = plant.n();
        let scheme = self.scheme(&plant, false)?;
        let noise = self.noise(n)?;
        let sim = &self.sim;
        let scenario = Scenario {
            plant,
            scheme,
            noise,
            disturbance: Default::default(),
            x0: sim.x0.clone(),
            e0: sim.e0.clone(),
            what_w0: sim.what_w0.clone(),
            eta0: sim.eta0.clone(),
            tau0: sim.tau0.clone(),
            t_final: sim.t_final,
            step: sim.step,
            refinement: sim.refinement,
            decimate: sim.decimate,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_strings_are_one_based() {
        let parsed = parse_triples(
            "graph.edges",
            &["1 2".into(), "2 3 0.5".into()],
            3,
            Some(1.0),
        )
        .unwrap();
        assert_eq!(parsed, vec![(0, 1, 1.0), (1, 2, 0.5)]);
        assert!(parse_triples("graph.edges", &["0 1".into()], 3, Some(1.0)).is_err());
        assert!(parse_triples("graph.edges", &["1 4".into()], 3, Some(1.0)).is_err());
        assert!(parse_triples("etm.rho", &["1 2".into()], 3, None).is_err());
    }

    #[test]
    fn per_agent_expansion() {
        assert_eq!(PerAgent::One(2.0).expand("k", 3).unwrap(), vec![2.0; 3]);
        assert!(PerAgent::Many(vec![1.0, 2.0]).expand("k", 3).is_err());
    }

    #[test]
    fn unknown_keys_are_named() {
        let text = r#"
name = "x"
[graph]
kind = "paper-fig2"
[etm]
scheme = "garcia"
c = 0.0
sigmaa = 0.5
[noise]
amplitude = 1e-4
[sim]
t_final = 1.0
x0 = [0.0]
"#;
        let err = RunConfig::from_toml_str(text).unwrap_err().to_string();
        assert!(err.contains("sigmaa"), "{err}");
    }
}
