//! Trigger for weight-balanced digraphs with per-arc tuning weights
//! `varrho_ij`.
//!
//! `vartheta_i = sum_{j out} a_ij varrho_ij`, `gamma_i = sum_{j in} a_ji / varrho_ji`,
//! `delta_i = sigma_i (1 - vartheta_i) u_i^2`,
//! `beta_i(s) = (d_i^2 / vartheta_i + gamma_i) s^2`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::Graph;

use super::{check_zeno_bounds, CommonParams};

/// Per-arc tuning weights.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum EdgeRho {
    /// `varrho_ij = 0.5 / d_i_out`, so `vartheta_i = 0.5`.
    #[default]
    HalfOverDegree,
    /// Explicit `(from, to, varrho)`; every arc of the graph must be covered.
    PerArc(Vec<(usize, usize, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerneburgParams {
    pub rho: EdgeRho,
    pub sigma: Vec<f64>,
    pub common: CommonParams,
}

/// `Psi_i` of the modified trigger.
pub fn berneburg_psi(
    sigma: f64,
    vartheta: f64,
    degree: f64,
    gamma: f64,
    c: f64,
    u: f64,
    e_tilde: f64,
) -> f64 {
    sigma * (1.0 - vartheta) * u * u - (degree * degree / vartheta + gamma) * e_tilde * e_tilde + c
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerneburgScheme {
    params: BerneburgParams,
    vartheta: Vec<f64>,
    gamma: Vec<f64>,
    degree: Vec<f64>,
}

impl BerneburgScheme {
    pub fn new(params: BerneburgParams, graph: &Graph) -> Result<Self> {
        let n = graph.n();
        params.common.check_len(n)?;
        if params.sigma.len() != n {
            return Err(Error::Dimension {
                what: "etm.sigma",
                got: params.sigma.len(),
                expected: n,
            });
        }
        if !graph.is_weight_balanced() {
            return Err(Error::Scenario(
                "the Berneburg trigger requires a weight-balanced graph".into(),
            ));
        }
        if let Some(&s) = params.sigma.iter().find(|s| !(**s > 0.0 && **s < 1.0)) {
            return Err(Error::Domain {
                name: "etm.sigma",
                value: s,
                domain: "(0, 1)",
            });
        }
        let degree: Vec<f64> = (0..n).map(|i| graph.out_degree(i)).collect();
        let rho = resolve_rho(&params.rho, graph, &degree)?;
        let mut vartheta = vec![0.0; n];
        let mut gamma = vec![0.0; n];
        for edge in graph.edges() {
            let r = rho[&(edge.from, edge.to)];
            vartheta[edge.from] += edge.weight * r;
            gamma[edge.to] += edge.weight / r;
        }
        if let Some(&v) = vartheta.iter().find(|v| !(**v > 0.0 && **v < 1.0)) {
            return Err(Error::Domain {
                name: "vartheta",
                value: v,
                domain: "(0, 1)",
            });
        }
        let scheme = Self {
            params,
            vartheta,
            gamma,
            degree,
        };
        check_zeno_bounds(&scheme.params.common, &scheme.c_lower_bound())?;
        Ok(scheme)
    }

    pub fn params(&self) -> &BerneburgParams {
        &self.params
    }

    pub fn vartheta(&self) -> &[f64] {
        &self.vartheta
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn degree(&self) -> &[f64] {
        &self.degree
    }

    fn beta_gain(&self, i: usize) -> f64 {
        self.degree[i] * self.degree[i] / self.vartheta[i] + self.gamma[i]
    }

    pub fn psi(&self, i: usize, u: f64, e_tilde: f64) -> f64 {
        berneburg_psi(
            self.params.sigma[i],
            self.vartheta[i],
            self.degree[i],
            self.gamma[i],
            self.params.common.c[i],
            u,
            e_tilde,
        )
    }

    pub fn c_lower_bound(&self) -> Vec<f64> {
        (0..self.vartheta.len())
            .map(|i| {
                let s = 2.0 * self.params.common.w_bar[i];
                self.beta_gain(i) * s * s
            })
            .collect()
    }
}

fn resolve_rho(
    rho: &EdgeRho,
    graph: &Graph,
    degree: &[f64],
) -> Result<HashMap<(usize, usize), f64>> {
    let mut map = HashMap::new();
    match rho {
        EdgeRho::HalfOverDegree => {
            for edge in graph.edges() {
                map.insert((edge.from, edge.to), 0.5 / degree[edge.from]);
            }
        }
        EdgeRho::PerArc(list) => {
            for &(from, to, r) in list {
                if !(r > 0.0 && r.is_finite()) {
                    return Err(Error::Domain {
                        name: "etm.rho",
                        value: r,
                        domain: "> 0",
                    });
                }
                map.insert((from, to), r);
            }
            if let Some(edge) = graph
                .edges()
                .iter()
                .find(|e| !map.contains_key(&(e.from, e.to)))
            {
                return Err(Error::Scenario(format!(
                    "etm.rho has no entry for arc {} -> {}",
                    edge.from + 1,
                    edge.to + 1
                )));
            }
        }
    }
    Ok(map)
}
