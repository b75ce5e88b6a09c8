//! State space of the networked closed loop and its flow and jump maps.
//!
//! Agents are single integrators `x_i' = u_i` whose outputs are held by a
//! zero-order hold between transmissions, so `e_i' = -x_i'` and `w^_i' = 0`
//! on flows.

use crate::error::{Error, Result};
use crate::etm::{eta_flow_derivative, Observation, TriggerMode, TriggerScheme};
use crate::graph::{neg_laplacian_apply, Graph};
use crate::signals::Disturbance;

/// Full hybrid state `(x, e, w^, eta, tau)`, stored as one flat vector of
/// length `5 n` in that block order.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridState {
    n: usize,
    data: Vec<f64>,
}

macro_rules! block {
    ($get:ident, $get_mut:ident, $k:expr) => {
        pub fn $get(&self) -> &[f64] {
            &self.data[$k * self.n..($k + 1) * self.n]
        }

        pub fn $get_mut(&mut self) -> &mut [f64] {
            &mut self.data[$k * self.n..($k + 1) * self.n]
        }
    };
}

impl HybridState {
    pub const BLOCKS: usize = 5;

    /// All-zero state for `n` agents.
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; Self::BLOCKS * n],
        }
    }

    pub fn new(x: &[f64], e: &[f64], what_w: &[f64], eta: &[f64], tau: &[f64]) -> Result<Self> {
        let n = x.len();
        for (what, v) in [("e", e), ("what_w", what_w), ("eta", eta), ("tau", tau)] {
            if v.len() != n {
                return Err(Error::Dimension {
                    what,
                    got: v.len(),
                    expected: n,
                });
            }
        }
        let mut data = Vec::with_capacity(Self::BLOCKS * n);
        for block in [x, e, what_w, eta, tau] {
            data.extend_from_slice(block);
        }
        Ok(Self { n, data })
    }

    pub(crate) fn from_flat(n: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), Self::BLOCKS * n);
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    block!(x, x_mut, 0);
    block!(e, e_mut, 1);
    block!(what_w, what_w_mut, 2);
    block!(eta, eta_mut, 3);
    block!(tau, tau_mut, 4);

    /// Compact copy of agent `i`'s components.
    pub fn agent(&self, i: usize) -> AgentSnapshot {
        AgentSnapshot {
            x: self.x()[i],
            e: self.e()[i],
            what_w: self.what_w()[i],
            eta: self.eta()[i],
            tau: self.tau()[i],
        }
    }
}

/// One agent's components of a [`HybridState`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AgentSnapshot {
    pub x: f64,
    pub e: f64,
    pub what_w: f64,
    pub eta: f64,
    pub tau: f64,
}

/// Point `(t, j)` of a hybrid time domain.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HybridTime {
    pub t: f64,
    pub j: u64,
}

/// One transmission.
///
/// Snapshots hold the jumping agent's components only; the rest of the state
/// is unchanged by a jump. `u` and `e_tilde` are the values the trigger saw.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpEvent {
    /// Hybrid time right after the jump.
    pub time: HybridTime,
    pub agent: usize,
    pub pre: AgentSnapshot,
    pub post: AgentSnapshot,
    pub psi: f64,
    pub u: f64,
    pub e_tilde: f64,
    /// Seconds since this agent's previous transmission.
    pub gap: Option<f64>,
    /// Noise sample latched into `w^_i`.
    pub noise: f64,
}

/// Plant and controller of the closed loop.
#[derive(Debug, Clone, PartialEq)]
pub enum Plant {
    /// `u = -L (x + e + w^)`.
    Consensus(Graph),
    /// One agent with `u = -gain (x + e + w^)`; attractor is the origin.
    Integrator { gain: f64 },
}

impl Plant {
    pub fn n(&self) -> usize {
        match self {
            Plant::Consensus(g) => g.n(),
            Plant::Integrator { .. } => 1,
        }
    }

    pub fn graph(&self) -> Option<&Graph> {
        match self {
            Plant::Consensus(g) => Some(g),
            Plant::Integrator { .. } => None,
        }
    }

    /// Writes `u` into `out` given the held outputs `x + e + w^`.
    fn input_from_held(&self, held: &[f64], out: &mut [f64]) {
        match self {
            Plant::Consensus(g) => neg_laplacian_apply(g.adjacency(), held, out),
            Plant::Integrator { gain } => out[0] = -gain * held[0],
        }
    }

    /// Plant Lyapunov function: `x^T L x / 2` for consensus, `x^2 / 2` otherwise.
    pub fn lyapunov(&self, x: &[f64]) -> f64 {
        match self {
            Plant::Consensus(g) => {
                let mut neg_lx = vec![0.0; x.len()];
                neg_laplacian_apply(g.adjacency(), x, &mut neg_lx);
                -0.5 * x.iter().zip(&neg_lx).map(|(a, b)| a * b).sum::<f64>()
            }
            Plant::Integrator { .. } => 0.5 * x[0] * x[0],
        }
    }

    /// Distance of `x` to the attractor.
    pub fn distance_to_attractor(&self, x: &[f64]) -> f64 {
        match self {
            Plant::Consensus(_) => distance_to_consensus(x),
            Plant::Integrator { .. } => x[0].abs(),
        }
    }
}

/// `e~ = e + w^ - w`.
pub fn measured_error(state: &HybridState, w: &[f64]) -> Vec<f64> {
    state
        .e()
        .iter()
        .zip(state.what_w())
        .zip(w)
        .map(|((e, wh), wi)| e + wh - wi)
        .collect()
}

/// `u = -L (x + e + w^)`.
pub fn control_input(graph: &Graph, state: &HybridState) -> Result<Vec<f64>> {
    if graph.n() != state.n() {
        return Err(Error::Dimension {
            what: "state",
            got: state.n(),
            expected: graph.n(),
        });
    }
    let mut u = vec![0.0; state.n()];
    Plant::Consensus(graph.clone()).input(state, &mut u);
    Ok(u)
}

impl Plant {
    /// Writes `u` for `state` into `out`.
    pub fn input(&self, state: &HybridState, out: &mut [f64]) {
        let held: Vec<f64> = held_outputs(state.as_slice(), state.n());
        self.input_from_held(&held, out);
    }
}

fn held_outputs(flat: &[f64], n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| flat[i] + flat[n + i] + flat[2 * n + i])
        .collect()
}

/// Observations of every agent at `state` under noise `w`.
pub fn observations(plant: &Plant, state: &HybridState, w: &[f64]) -> Vec<Observation> {
    let n = state.n();
    let mut u = vec![0.0; n];
    plant.input(state, &mut u);
    (0..n)
        .map(|i| Observation {
            u: u[i],
            e_tilde: state.e()[i] + state.what_w()[i] - w[i],
            y_tilde: state.x()[i] + w[i],
            tau: state.tau()[i],
        })
        .collect()
}

/// Flow map evaluator with reusable buffers.
#[derive(Debug, Clone)]
pub struct FlowMap<'a> {
    plant: &'a Plant,
    scheme: &'a TriggerScheme,
    disturbance: &'a Disturbance,
    held: Vec<f64>,
    u: Vec<f64>,
}

impl<'a> FlowMap<'a> {
    pub fn new(plant: &'a Plant, scheme: &'a TriggerScheme, disturbance: &'a Disturbance) -> Self {
        let n = plant.n();
        Self {
            plant,
            scheme,
            disturbance,
            held: vec![0.0; n],
            u: vec![0.0; n],
        }
    }

    /// `(x', e', w^', eta', tau') = (u + v, -(u + v), 0, Psi - eps eta, 1)`.
    ///
    /// `eta' = 0` for static triggers.
    pub fn eval(&mut self, state: &[f64], w: &[f64], out: &mut [f64]) {
        let n = self.plant.n();
        for i in 0..n {
            self.held[i] = state[i] + state[n + i] + state[2 * n + i];
        }
        self.plant.input_from_held(&self.held, &mut self.u);
        let dynamic = self.scheme.mode() == TriggerMode::Dynamic;
        for i in 0..n {
            let xdot = self.u[i] + self.disturbance.value(i);
            out[i] = xdot;
            out[n + i] = -xdot;
            out[2 * n + i] = 0.0;
            out[3 * n + i] = if dynamic {
                let obs = Observation {
                    u: self.u[i],
                    e_tilde: state[n + i] + state[2 * n + i] - w[i],
                    y_tilde: state[i] + w[i],
                    tau: state[4 * n + i],
                };
                let psi = self.scheme.psi(i, &obs);
                eta_flow_derivative(state[3 * n + i], psi, self.scheme.eps_eta(i))
            } else {
                0.0
            };
            out[4 * n + i] = 1.0;
        }
    }
}

/// Flow derivative of `state` as a [`HybridState`].
pub fn flow_derivative(
    plant: &Plant,
    scheme: &TriggerScheme,
    disturbance: &Disturbance,
    state: &HybridState,
    w: &[f64],
) -> HybridState {
    let mut out = vec![0.0; state.as_slice().len()];
    FlowMap::new(plant, scheme, disturbance).eval(state.as_slice(), w, &mut out);
    HybridState::from_flat(state.n(), out)
}

/// Transmission of `agent`: `e_i <- 0`, `w^_i <- w_i`, `tau_i <- 0`, `eta_i`
/// per the scheme's reset rule. Everything else, including `x`, is kept.
pub fn apply_jump(
    state: &HybridState,
    agent: usize,
    w: &[f64],
    scheme: &TriggerScheme,
) -> Result<HybridState> {
    let n = state.n();
    if agent >= n {
        return Err(Error::AgentOutOfRange { index: agent, n });
    }
    let mut next = state.clone();
    jump_in_place(&mut next, agent, w, scheme);
    Ok(next)
}

pub(crate) fn jump_in_place(
    state: &mut HybridState,
    agent: usize,
    w: &[f64],
    scheme: &TriggerScheme,
) {
    let e_tilde = state.e()[agent] + state.what_w()[agent] - w[agent];
    let eta = state.eta()[agent];
    state.eta_mut()[agent] = scheme.eta_reset(agent, eta, e_tilde);
    state.e_mut()[agent] = 0.0;
    state.what_w_mut()[agent] = w[agent];
    state.tau_mut()[agent] = 0.0;
}

/// Euclidean distance from `x` to `span{1}`.
pub fn distance_to_consensus(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter()
        .map(|v| (v - mean) * (v - mean))
        .sum::<f64>()
        .sqrt()
}
