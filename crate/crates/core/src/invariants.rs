//! Runtime checks of the properties every solution trace should satisfy.

use std::fmt;

use crate::engine::{simulate, Scenario, SolutionTrace};
use crate::error::Result;
use crate::etm::{Observation, TriggerMode};
use crate::hybrid::observations;

/// Smallest admissible `eta`.
pub const ETA_FLOOR: f64 = -1e-12;
/// Relative tolerance on the conserved state sum.
pub const MEAN_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// First violation found, if any.
    pub detail: Option<String>,
}

impl Check {
    fn pass(name: &'static str) -> Self {
        Self {
            name,
            passed: true,
            detail: None,
        }
    }

    fn fail(name: &'static str, detail: String) -> Self {
        Self {
            name,
            passed: false,
            detail: Some(detail),
        }
    }

    fn from(name: &'static str, violation: Option<String>) -> Self {
        match violation {
            None => Self::pass(name),
            Some(d) => Self::fail(name, d),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "ok" } else { "FAILED" };
        match &self.detail {
            Some(d) => write!(f, "{}: {status} ({d})", self.name),
            None => write!(f, "{}: {status}", self.name),
        }
    }
}

/// Every event's pre-jump data lies in the jump set.
pub fn trigger_consistency(trace: &SolutionTrace, scenario: &Scenario) -> Check {
    let tol = trace.tolerance;
    let scheme = &scenario.scheme;
    let violation = trace.events.iter().find_map(|ev| {
        let i = ev.agent;
        let psi = scheme.psi(
            i,
            &Observation {
                u: ev.u,
                e_tilde: ev.e_tilde,
                y_tilde: ev.pre.x + ev.noise,
                tau: ev.pre.tau,
            },
        );
        let bad_psi = psi > tol;
        let bad_eta =
            scheme.mode() == TriggerMode::Dynamic && ev.pre.eta + scheme.theta(i) * psi > tol;
        (bad_psi || bad_eta).then(|| {
            format!(
                "agent {} at t = {}: psi = {psi:e}, eta = {:e}",
                i + 1,
                ev.time.t,
                ev.pre.eta
            )
        })
    });
    Check::from("trigger-consistency", violation)
}

/// Every sample lies in the flow set.
pub fn flow_set_membership(trace: &SolutionTrace, scenario: &Scenario) -> Check {
    let tol = trace.tolerance;
    let scheme = &scenario.scheme;
    let violation = trace.samples.iter().find_map(|sample| {
        let w = scenario.noise.sample_vector(sample.time.t);
        let obs = observations(&scenario.plant, &sample.state, &w);
        obs.iter().enumerate().find_map(|(i, o)| {
            let psi = scheme.psi(i, o);
            let value = match scheme.mode() {
                TriggerMode::Static => psi,
                TriggerMode::Dynamic => sample.state.eta()[i] + scheme.theta(i) * psi,
            };
            (value < -tol)
                .then(|| format!("agent {} at t = {}: value {value:e}", i + 1, sample.time.t))
        })
    });
    Check::from("flow-set-membership", violation)
}

pub fn eta_nonnegative(trace: &SolutionTrace) -> Check {
    let violation = trace.samples.iter().find_map(|s| {
        s.state
            .eta()
            .iter()
            .position(|&eta| eta < ETA_FLOOR)
            .map(|i| {
                format!(
                    "agent {} at t = {}: eta = {:e}",
                    i + 1,
                    s.time.t,
                    s.state.eta()[i]
                )
            })
    });
    Check::from("eta-nonnegative", violation)
}

/// `|1^T x(t) - 1^T x(0)| <= 1e-6 (1 + |x(0)|)`; trivially passes when the
/// sum is not conserved (unbalanced graph, integrator plant, or disturbance).
pub fn mean_conservation(trace: &SolutionTrace, scenario: &Scenario) -> Check {
    let conserved = scenario.disturbance.is_zero()
        && scenario
            .plant
            .graph()
            .is_some_and(|g| g.is_weight_balanced());
    if !conserved {
        return Check::pass("mean-conservation");
    }
    let x0 = trace.samples[0].state.x();
    let sum0: f64 = x0.iter().sum();
    let bound = MEAN_TOL * (1.0 + x0.iter().map(|v| v * v).sum::<f64>().sqrt());
    let violation = trace.samples.iter().find_map(|s| {
        let drift = (s.state.x().iter().sum::<f64>() - sum0).abs();
        (drift > bound).then(|| format!("t = {}: drift {drift:e} > {bound:e}", s.time.t))
    });
    Check::from("mean-conservation", violation)
}

/// Jumps keep `x`, clear `e`, latch the current noise and restart the clock.
pub fn zoh_consistency(trace: &SolutionTrace) -> Check {
    let violation = trace.events.iter().find_map(|ev| {
        let ok = ev.post.x == ev.pre.x
            && ev.post.e == 0.0
            && ev.post.what_w == ev.noise
            && ev.post.tau == 0.0;
        (!ok).then(|| format!("agent {} at t = {}", ev.agent + 1, ev.time.t))
    });
    Check::from("zoh-consistency", violation)
}

/// Samples advance in `t`, events advance `j` one at a time at constant `t`.
pub fn hybrid_time_validity(trace: &SolutionTrace) -> Check {
    let mut violation = None;
    if trace.samples.first().map(|s| s.time.t) != Some(0.0) {
        violation = Some("trace does not start at t = 0".to_string());
    }
    for pair in trace.samples.windows(2) {
        let (a, b) = (pair[0].time, pair[1].time);
        if violation.is_none() && !(b.t > a.t && b.j >= a.j) {
            violation = Some(format!("samples ({}, {}) -> ({}, {})", a.t, a.j, b.t, b.j));
        }
    }
    for (k, ev) in trace.events.iter().enumerate() {
        if violation.is_none() && ev.time.j != k as u64 + 1 {
            violation = Some(format!("event {k} has j = {}", ev.time.j));
        }
    }
    for pair in trace.events.windows(2) {
        if violation.is_none() && pair[1].time.t < pair[0].time.t {
            violation = Some(format!("event time decreases at t = {}", pair[1].time.t));
        }
    }
    // each sample's j counts the events up to its time
    let mut next = 0;
    for s in &trace.samples {
        while next < trace.events.len() && trace.events[next].time.t <= s.time.t {
            next += 1;
        }
        if violation.is_none() && s.time.j != next as u64 {
            violation = Some(format!(
                "sample at t = {} has j = {}, expected {next}",
                s.time.t, s.time.j
            ));
        }
    }
    Check::from("hybrid-time-validity", violation)
}

/// Bitwise trace equality, so that `-0.0` and `0.0` differ.
pub fn bit_identical(a: &SolutionTrace, b: &SolutionTrace) -> bool {
    fn same(x: &[f64], y: &[f64]) -> bool {
        x.len() == y.len() && x.iter().zip(y).all(|(p, q)| p.to_bits() == q.to_bits())
    }
    a.samples.len() == b.samples.len()
        && a.events.len() == b.events.len()
        && a.samples
            .iter()
            .zip(&b.samples)
            .all(|(s, t)| s.time == t.time && same(s.state.as_slice(), t.state.as_slice()))
        && a.events.iter().zip(&b.events).all(|(e, f)| {
            let flat = |ev: &crate::hybrid::JumpEvent| {
                vec![
                    ev.time.t,
                    ev.pre.x,
                    ev.pre.e,
                    ev.pre.what_w,
                    ev.pre.eta,
                    ev.pre.tau,
                    ev.post.x,
                    ev.post.e,
                    ev.post.what_w,
                    ev.post.eta,
                    ev.post.tau,
                    ev.psi,
                    ev.u,
                    ev.e_tilde,
                    ev.noise,
                    ev.gap.unwrap_or(f64::NAN),
                ]
            };
            e.agent == f.agent && e.time.j == f.time.j && same(&flat(e), &flat(f))
        })
}

/// Re-runs `scenario` and compares bit for bit with `trace`.
pub fn determinism(trace: &SolutionTrace, scenario: &Scenario) -> Result<Check> {
    let again = simulate(scenario)?;
    Ok(if bit_identical(trace, &again) {
        Check::pass("determinism")
    } else {
        Check::fail("determinism", "second run differs".into())
    })
}

/// All trace checks except determinism, which needs a second run.
pub fn check_trace(trace: &SolutionTrace, scenario: &Scenario) -> Vec<Check> {
    vec![
        trigger_consistency(trace, scenario),
        flow_set_membership(trace, scenario),
        eta_nonnegative(trace),
        mean_conservation(trace, scenario),
        zoh_consistency(trace),
        hybrid_time_validity(trace),
    ]
}
