use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("agent index {index} out of range for {n} agents")]
    AgentOutOfRange { index: usize, n: usize },

    #[error("dimension mismatch: {what} has length {got}, expected {expected}")]
    Dimension {
        what: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("parameter {name} = {value} outside its domain ({domain})")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    /// Space-regularization constant at or below `beta_i(2 w_bar_i)` without
    /// the explicit allow-zeno opt-in.
    #[error(
        "agent {agent}: c = {c:e} does not exceed the Zeno-freeness bound beta(2 w_bar) = {bound:e}; \
         raise c or set allow_zeno"
    )]
    ZenoBound { agent: usize, c: f64, bound: f64 },

    #[error("jump storm: {jumps} jumps at t = {t} (cap {cap})")]
    JumpStorm { t: f64, jumps: usize, cap: usize },

    #[error("phi integration did not reach tolerance {tol:e} after {steps} steps")]
    Integration { tol: f64, steps: usize },

    #[error("invalid scenario: {0}")]
    Scenario(String),
}
