//! Event-triggering mechanisms.
//!
//! Every scheme exposes a trigger function `Psi_i(o_i)` of locally available
//! data. Static triggers jump when `Psi_i <= 0`. Dynamic triggers add a
//! variable `eta_i >= 0` with `eta_i' = Psi_i - eps_eta eta_i` and jump when
//! `eta_i + theta_i Psi_i <= 0` and `Psi_i <= 0`.

mod berneburg;
mod dolk;
mod garcia;
mod single;

pub use berneburg::{berneburg_psi, BerneburgParams, BerneburgScheme, EdgeRho};
pub use dolk::{
    dolk_psi, eta_reset, gamma_sigma_from, omega, phi_crossing_time, phi_solve, tau_miet,
    DolkParams, DolkScheme, PhiTable, ResetMode, SigmaForm,
};
pub use garcia::{
    garcia_beta, garcia_psi, garcia_psi_original, GarciaForm, GarciaParams, GarciaScheme,
};
pub use single::{psi_single, ScalarFn, SingleScheme, SingleSystemHooks};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TriggerMode {
    #[default]
    Static,
    Dynamic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Flow,
    Jump,
}

/// Regularization and trigger-variable settings shared by every scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct CommonParams {
    pub mode: TriggerMode,
    /// Space-regularization constants `c_i >= 0`.
    pub c: Vec<f64>,
    pub theta: Vec<f64>,
    /// Noise bounds `w_bar_i`.
    pub w_bar: Vec<f64>,
    /// Linear decay rate of `eta_i`.
    pub eps_eta: Vec<f64>,
    /// Accept `c_i <= beta_i(2 w_bar_i)`, giving up the Zeno-freeness guarantee.
    pub allow_zeno: bool,
}

impl CommonParams {
    pub fn uniform(
        n: usize,
        mode: TriggerMode,
        c: f64,
        theta: f64,
        w_bar: f64,
        eps_eta: f64,
        allow_zeno: bool,
    ) -> Self {
        Self {
            mode,
            c: vec![c; n],
            theta: vec![theta; n],
            w_bar: vec![w_bar; n],
            eps_eta: vec![eps_eta; n],
            allow_zeno,
        }
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        for (what, v) in [
            ("etm.c", &self.c),
            ("etm.theta", &self.theta),
            ("etm.w_bar", &self.w_bar),
            ("etm.eps_eta", &self.eps_eta),
        ] {
            if v.len() != n {
                return Err(Error::Dimension {
                    what,
                    got: v.len(),
                    expected: n,
                });
            }
        }
        for (name, v) in [
            ("etm.c", &self.c),
            ("etm.theta", &self.theta),
            ("etm.w_bar", &self.w_bar),
        ] {
            if let Some(&bad) = v.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
                return Err(Error::Domain {
                    name,
                    value: bad,
                    domain: ">= 0",
                });
            }
        }
        if let Some(&bad) = self.eps_eta.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::Domain {
                name: "etm.eps_eta",
                value: bad,
                domain: "> 0",
            });
        }
        Ok(())
    }
}

pub(crate) fn check_zeno_bounds(common: &CommonParams, bounds: &[f64]) -> Result<()> {
    if common.allow_zeno {
        return Ok(());
    }
    for (agent, (&c, &bound)) in common.c.iter().zip(bounds).enumerate() {
        if c <= bound {
            return Err(Error::ZenoBound { agent, c, bound });
        }
    }
    Ok(())
}

/// `eta_i' = Psi_i - eps_eta eta_i`.
pub fn eta_flow_derivative(eta: f64, psi: f64, eps_eta: f64) -> f64 {
    psi - eps_eta * eta
}

/// Jump-set membership of one agent.
///
/// Dynamic: `eta + theta Psi <= 0` and `Psi <= 0`. Static: `Psi <= 0`.
pub fn trigger_decision(eta: f64, psi: f64, theta: f64, mode: TriggerMode) -> Decision {
    let jump = match mode {
        TriggerMode::Static => psi <= 0.0,
        TriggerMode::Dynamic => eta + theta * psi <= 0.0 && psi <= 0.0,
    };
    if jump {
        Decision::Jump
    } else {
        Decision::Flow
    }
}

/// Locally available data of one agent at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Observation {
    /// Applied control input `u_i`.
    pub u: f64,
    /// Measured network-induced error `e~_i = e_i + w^_i - w_i`.
    pub e_tilde: f64,
    /// Current noisy output `y~_i = x_i + w_i`.
    pub y_tilde: f64,
    /// Local clock `tau_i`.
    pub tau: f64,
}

/// A named per-agent constant for reports.
#[derive(Debug, Clone, PartialEq)]
pub struct Derived {
    pub name: &'static str,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone)]
pub enum TriggerScheme {
    Garcia(GarciaScheme),
    Dolk(DolkScheme),
    Berneburg(BerneburgScheme),
    Single(SingleScheme),
}

impl TriggerScheme {
    pub fn kind(&self) -> &'static str {
        match self {
            TriggerScheme::Garcia(_) => "garcia",
            TriggerScheme::Dolk(_) => "dolk",
            TriggerScheme::Berneburg(_) => "berneburg",
            TriggerScheme::Single(_) => "single",
        }
    }

    pub fn common(&self) -> &CommonParams {
        match self {
            TriggerScheme::Garcia(s) => &s.params().common,
            TriggerScheme::Dolk(s) => &s.params().common,
            TriggerScheme::Berneburg(s) => &s.params().common,
            TriggerScheme::Single(s) => &s.hooks().common,
        }
    }

    pub fn n(&self) -> usize {
        self.common().c.len()
    }

    pub fn mode(&self) -> TriggerMode {
        self.common().mode
    }

    pub fn theta(&self, i: usize) -> f64 {
        self.common().theta[i]
    }

    pub fn eps_eta(&self, i: usize) -> f64 {
        self.common().eps_eta[i]
    }

    /// True when the scheme reads the local clocks.
    pub fn uses_clock(&self) -> bool {
        matches!(self, TriggerScheme::Dolk(_))
    }

    pub fn psi(&self, i: usize, obs: &Observation) -> f64 {
        match self {
            TriggerScheme::Garcia(s) => s.psi(i, obs.u, obs.e_tilde),
            TriggerScheme::Dolk(s) => s.psi(i, obs.u, obs.e_tilde, obs.tau),
            TriggerScheme::Berneburg(s) => s.psi(i, obs.u, obs.e_tilde),
            TriggerScheme::Single(s) => s.psi(obs.y_tilde, obs.e_tilde),
        }
    }

    /// `eta_i` right after a transmission of agent `i`.
    pub fn eta_reset(&self, i: usize, eta: f64, e_tilde: f64) -> f64 {
        match self {
            TriggerScheme::Dolk(s) => s.eta_reset(i, eta, e_tilde),
            _ => eta,
        }
    }

    /// `beta_i(2 w_bar_i)` per agent; zero for the time-regularized scheme,
    /// whose dwell time already excludes Zeno behavior.
    pub fn c_lower_bound(&self) -> Vec<f64> {
        match self {
            TriggerScheme::Garcia(s) => s.c_lower_bound(),
            TriggerScheme::Dolk(s) => vec![0.0; s.tau_miet().len()],
            TriggerScheme::Berneburg(s) => s.c_lower_bound(),
            TriggerScheme::Single(s) => s.c_lower_bound(),
        }
    }

    /// Per-agent Theorem-style check `c_i > beta_i(2 w_bar_i)`; the
    /// time-regularized scheme only needs `c_i >= 0`.
    pub fn zeno_guarantee(&self) -> Vec<bool> {
        let c = &self.common().c;
        let bounds = self.c_lower_bound();
        match self {
            TriggerScheme::Dolk(_) => c.iter().map(|&ci| ci >= 0.0).collect(),
            _ => c.iter().zip(&bounds).map(|(&ci, &b)| ci > b).collect(),
        }
    }

    /// Dwell times for the time-regularized scheme.
    pub fn tau_miet(&self) -> Option<&[f64]> {
        match self {
            TriggerScheme::Dolk(s) => Some(s.tau_miet()),
            _ => None,
        }
    }

    /// Agent-local part of the Lyapunov function: `eta_i`, plus
    /// `gamma_i phi_i(tau_i) e_i^2` for the time-regularized scheme.
    pub fn lyapunov_local(&self, i: usize, e: f64, eta: f64, tau: f64) -> f64 {
        match self {
            TriggerScheme::Dolk(s) => s.storage(i, e, tau) + eta,
            _ => eta,
        }
    }

    /// Derived constants for manifests and validation reports.
    pub fn derived(&self) -> Vec<Derived> {
        let mut out = Vec::new();
        match self {
            TriggerScheme::Garcia(s) => {
                out.push(Derived {
                    name: "neighbors",
                    values: (0..s.params().sigma.len())
                        .map(|i| s.neighbors(i) as f64)
                        .collect(),
                });
            }
            TriggerScheme::Dolk(s) => {
                out.push(Derived {
                    name: "neighbors",
                    values: (0..s.gamma().len())
                        .map(|i| s.neighbors(i) as f64)
                        .collect(),
                });
                out.push(Derived {
                    name: "gamma",
                    values: s.gamma().to_vec(),
                });
                out.push(Derived {
                    name: "sigma",
                    values: s.sigma().to_vec(),
                });
                out.push(Derived {
                    name: "tau_miet",
                    values: s.tau_miet().to_vec(),
                });
            }
            TriggerScheme::Berneburg(s) => {
                out.push(Derived {
                    name: "degree",
                    values: s.degree().to_vec(),
                });
                out.push(Derived {
                    name: "vartheta",
                    values: s.vartheta().to_vec(),
                });
                out.push(Derived {
                    name: "gamma",
                    values: s.gamma().to_vec(),
                });
            }
            TriggerScheme::Single(_) => {}
        }
        out.push(Derived {
            name: "c_lower_bound",
            values: self.c_lower_bound(),
        });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn eta_derivative_examples() {
        assert_eq!(eta_flow_derivative(0.0, 0.3, 0.05), 0.3);
        assert!((eta_flow_derivative(2.0, 0.0, 0.05) + 0.1).abs() < 1e-15);
        // fixed point eta = Psi / eps
        assert_eq!(eta_flow_derivative(0.3 / 0.05, 0.3, 0.05), 0.0);
    }

    #[test]
    fn decision_examples() {
        assert_eq!(
            trigger_decision(0.0, -0.1, 0.0, TriggerMode::Dynamic),
            Decision::Jump
        );
        assert_eq!(
            trigger_decision(1.0, -0.1, 0.0, TriggerMode::Dynamic),
            Decision::Flow
        );
        assert_eq!(
            trigger_decision(0.0, 0.2, 0.0, TriggerMode::Static),
            Decision::Flow
        );
        assert_eq!(
            trigger_decision(0.0, -0.2, 0.0, TriggerMode::Static),
            Decision::Jump
        );
        // eta + theta Psi <= 0 but Psi > 0 is not a jump
        assert_eq!(
            trigger_decision(0.0, 0.1, 1.0, TriggerMode::Dynamic),
            Decision::Flow
        );
    }

    proptest! {
        #[test]
        fn decision_invariant_under_joint_scaling(
            eta in 0.0f64..10.0,
            psi in -10.0f64..10.0,
            theta in 0.0f64..10.0,
            k in 1e-3f64..1e3,
        ) {
            // scaling eta and Psi by k keeps theta fixed and the signs of both predicates
            let a = trigger_decision(eta, psi, theta, TriggerMode::Dynamic);
            let b = trigger_decision(k * eta, k * psi, theta, TriggerMode::Dynamic);
            prop_assert_eq!(a, b);
        }
    }
}
