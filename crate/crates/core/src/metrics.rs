//! Post-processing of solution traces.

use crate::engine::SolutionTrace;
use crate::etm::TriggerScheme;
use crate::hybrid::{HybridTime, Plant};

/// Inter-event statistics of one agent.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InterEventStats {
    /// Smallest gap between consecutive events; absent with fewer than two.
    pub min: Option<f64>,
    pub mean: Option<f64>,
    pub count: usize,
}

impl InterEventStats {
    /// Statistics of a sorted list of event times.
    pub fn from_times(times: &[f64]) -> Self {
        let gaps: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
        if gaps.is_empty() {
            return Self {
                min: None,
                mean: None,
                count: times.len(),
            };
        }
        Self {
            min: Some(gaps.iter().copied().fold(f64::INFINITY, f64::min)),
            mean: Some(gaps.iter().sum::<f64>() / gaps.len() as f64),
            count: times.len(),
        }
    }
}

/// Per-agent inter-event statistics for `n` agents.
pub fn inter_event_stats(trace: &SolutionTrace, n: usize) -> Vec<InterEventStats> {
    let mut times = vec![Vec::new(); n];
    for ev in &trace.events {
        times[ev.agent].push(ev.time.t);
    }
    times
        .iter()
        .map(|t| InterEventStats::from_times(t))
        .collect()
}

/// Smallest same-agent gap among events in `[t_final - window, t_final]`.
///
/// The gap of an event is measured back to the agent's previous event, which
/// may lie before the window.
pub fn zeno_indicator(trace: &SolutionTrace, n: usize, window: f64) -> Vec<Option<f64>> {
    let start = trace.t_final - window;
    let mut out: Vec<Option<f64>> = vec![None; n];
    for ev in trace.events.iter().filter(|ev| ev.time.t >= start) {
        if let Some(gap) = ev.gap {
            let slot = &mut out[ev.agent];
            *slot = Some(slot.map_or(gap, |m| m.min(gap)));
        }
    }
    out
}

/// Lyapunov values along a trace.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LyapunovSeries {
    pub times: Vec<HybridTime>,
    /// Plant part `W(x)`.
    pub plant: Vec<f64>,
    /// Full function `U`: `W` plus the agent-local storage terms.
    pub total: Vec<f64>,
    /// `U(post) - U(pre)` for each event, in event order.
    pub event_delta: Vec<f64>,
}

pub fn lyapunov_series(
    trace: &SolutionTrace,
    plant: &Plant,
    scheme: &TriggerScheme,
) -> LyapunovSeries {
    let mut series = LyapunovSeries::default();
    for sample in &trace.samples {
        let s = &sample.state;
        let w = plant.lyapunov(s.x());
        let local: f64 = (0..s.n())
            .map(|i| scheme.lyapunov_local(i, s.e()[i], s.eta()[i], s.tau()[i]))
            .sum();
        series.times.push(sample.time);
        series.plant.push(w);
        series.total.push(w + local);
    }
    // x is unchanged by a jump, so only the jumping agent's local terms move
    series.event_delta = trace
        .events
        .iter()
        .map(|ev| {
            let i = ev.agent;
            scheme.lyapunov_local(i, ev.post.e, ev.post.eta, ev.post.tau)
                - scheme.lyapunov_local(i, ev.pre.e, ev.pre.eta, ev.pre.tau)
        })
        .collect();
    series
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConsensusMetrics {
    /// Distance to the attractor at each sample.
    pub distance: Vec<f64>,
    pub final_distance: f64,
    /// `max_i |x_i(t_final) - xbar|` with `xbar` the initial mean (zero for a
    /// stabilization plant).
    pub final_max_deviation: f64,
}

pub fn consensus_metrics(trace: &SolutionTrace, plant: &Plant) -> ConsensusMetrics {
    let distance: Vec<f64> = trace
        .samples
        .iter()
        .map(|s| plant.distance_to_attractor(s.state.x()))
        .collect();
    let x0 = trace.samples[0].state.x();
    let target = match plant {
        Plant::Consensus(_) => x0.iter().sum::<f64>() / x0.len() as f64,
        Plant::Integrator { .. } => 0.0,
    };
    let final_max_deviation = trace
        .final_sample()
        .state
        .x()
        .iter()
        .map(|v| (v - target).abs())
        .fold(0.0, f64::max);
    ConsensusMetrics {
        final_distance: *distance.last().unwrap_or(&0.0),
        distance,
        final_max_deviation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_statistics_example() {
        let s = InterEventStats::from_times(&[1.0, 1.5, 2.5]);
        assert_eq!(s.count, 3);
        assert_eq!(s.min, Some(0.5));
        assert_eq!(s.mean, Some(0.75));
    }

    #[test]
    fn empty_and_single_event_lists() {
        assert_eq!(InterEventStats::from_times(&[]), InterEventStats::default());
        let one = InterEventStats::from_times(&[0.3]);
        assert_eq!((one.count, one.min, one.mean), (1, None, None));
    }
}
