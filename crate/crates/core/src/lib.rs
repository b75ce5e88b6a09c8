//! Hybrid-systems simulation of event-triggered consensus with noisy
//! measurements.
//!
//! The crate covers the communication graph ([`graph`]), the bounded noise
//! model ([`signals`]), the hybrid state and its flow/jump maps ([`hybrid`]),
//! the triggering mechanisms ([`etm`]), and the simulation loop plus metrics
//! ([`engine`], [`metrics`], [`invariants`]). [`batch`] runs independent
//! scenarios, in parallel when the `parallel` feature is on.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod batch;
pub mod engine;
pub mod error;
pub mod etm;
pub mod graph;
pub mod hybrid;
pub mod invariants;
pub mod metrics;
pub mod ode;
pub mod signals;

pub use engine::{simulate, Sample, Scenario, SolutionTrace};
pub use error::{Error, Result};
pub use graph::Graph;
pub use hybrid::{HybridState, HybridTime, JumpEvent, Plant};
pub use signals::{Disturbance, NoiseSignal};
