//! Decentralized static/dynamic trigger for undirected consensus with
//! Young's-inequality weight `a`.
//!
//! `delta_i = sigma_i (1 - 2 a N_i) u_i^2`, `beta_i(s) = (N_i / a) s^2`.

use crate::error::{Error, Result};
use crate::graph::Graph;

use super::{check_zeno_bounds, CommonParams};

/// Which row of the comparison table the trigger implements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GarciaForm {
    /// Noise-robust form: `sigma (1 - 2aN) u^2 - (N/a) e~^2 + c`.
    #[default]
    Modified,
    /// Noise-naive form `sigma (1 - aN) u^2 - (N/a) e^2`, evaluated on the
    /// measured error because that is all an agent can observe. No
    /// guarantee machinery applies; used for side-by-side demos only.
    Original,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GarciaParams {
    pub a: f64,
    pub sigma: Vec<f64>,
    pub form: GarciaForm,
    pub common: CommonParams,
}

/// `Psi_i` of the modified trigger.
pub fn garcia_psi(sigma: f64, a: f64, neighbors: usize, c: f64, u: f64, e_tilde: f64) -> f64 {
    let n = neighbors as f64;
    sigma * (1.0 - 2.0 * a * n) * u * u - n / a * e_tilde * e_tilde + c
}

/// `Psi_i` of the original, noise-naive trigger.
pub fn garcia_psi_original(sigma: f64, a: f64, neighbors: usize, u: f64, error: f64) -> f64 {
    let n = neighbors as f64;
    sigma * (1.0 - a * n) * u * u - n / a * error * error
}

/// `beta_i(s) = (N_i / a) s^2`.
pub fn garcia_beta(a: f64, neighbors: usize, s: f64) -> f64 {
    neighbors as f64 * s * s / a
}

#[derive(Debug, Clone, PartialEq)]
pub struct GarciaScheme {
    params: GarciaParams,
    neighbors: Vec<usize>,
}

impl GarciaScheme {
    pub fn new(params: GarciaParams, graph: &Graph) -> Result<Self> {
        let n = graph.n();
        params.common.check_len(n)?;
        if params.sigma.len() != n {
            return Err(Error::Dimension {
                what: "etm.sigma",
                got: params.sigma.len(),
                expected: n,
            });
        }
        if !graph.is_undirected() {
            return Err(Error::Scenario(
                "the Garcia trigger requires an undirected graph".into(),
            ));
        }
        let neighbors: Vec<usize> = (0..n).map(|i| graph.neighbor_count(i)).collect();
        let max_neighbors = neighbors.iter().copied().max().unwrap_or(0);
        if !(params.a > 0.0 && 2.0 * params.a * (max_neighbors as f64) < 1.0) {
            return Err(Error::Domain {
                name: "etm.a",
                value: params.a,
                domain: "0 < a < 1 / (2 max_i N_i)",
            });
        }
        if let Some(&s) = params.sigma.iter().find(|s| !(**s > 0.0 && **s < 1.0)) {
            return Err(Error::Domain {
                name: "etm.sigma",
                value: s,
                domain: "(0, 1)",
            });
        }
        let scheme = Self { params, neighbors };
        check_zeno_bounds(&scheme.params.common, &scheme.c_lower_bound())?;
        Ok(scheme)
    }

    pub fn params(&self) -> &GarciaParams {
        &self.params
    }

    pub fn neighbors(&self, i: usize) -> usize {
        self.neighbors[i]
    }

    pub fn psi(&self, i: usize, u: f64, e_tilde: f64) -> f64 {
        let p = &self.params;
        match p.form {
            GarciaForm::Modified => garcia_psi(
                p.sigma[i],
                p.a,
                self.neighbors[i],
                p.common.c[i],
                u,
                e_tilde,
            ),
            GarciaForm::Original => {
                garcia_psi_original(p.sigma[i], p.a, self.neighbors[i], u, e_tilde) + p.common.c[i]
            }
        }
    }

    pub fn c_lower_bound(&self) -> Vec<f64> {
        self.neighbors
            .iter()
            .zip(&self.params.common.w_bar)
            .map(|(&ni, &w)| garcia_beta(self.params.a, ni, 2.0 * w))
            .collect()
    }
}
