//! Bounded, piecewise-constant measurement noise and the process-disturbance
//! channel.
//!
//! Noise values are addressed by `(seed, agent, window)` through a ChaCha8
//! block cipher used in counter mode: the agent selects the stream and the
//! window index selects the word position. Sampling is therefore
//! random-access in time and never depends on query order.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Times within this relative distance of a window boundary are snapped onto
/// it, so grid times like `k * h` land in window `k` despite rounding.
const WINDOW_SNAP: f64 = 1e-9;

/// Uniform piecewise-constant noise, one independent stream per agent.
#[derive(Debug, Clone)]
pub struct NoiseSignal {
    seed: u64,
    amplitude: Vec<f64>,
    sample_rate: f64,
    base: ChaCha8Rng,
}

impl PartialEq for NoiseSignal {
    fn eq(&self, other: &Self) -> bool {
        self.seed == other.seed
            && self.amplitude == other.amplitude
            && self.sample_rate == other.sample_rate
    }
}

impl NoiseSignal {
    pub fn new(seed: u64, amplitude: Vec<f64>, sample_rate: f64) -> Result<Self> {
        if let Some(&bad) = amplitude.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
            return Err(Error::Domain {
                name: "noise.amplitude",
                value: bad,
                domain: "finite and >= 0",
            });
        }
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(Error::Domain {
                name: "noise.sample_rate_hz",
                value: sample_rate,
                domain: "> 0",
            });
        }
        Ok(Self {
            seed,
            amplitude,
            sample_rate,
            base: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    /// Same amplitude for every agent.
    pub fn uniform(seed: u64, n: usize, amplitude: f64, sample_rate: f64) -> Result<Self> {
        Self::new(seed, vec![amplitude; n], sample_rate)
    }

    /// Identically zero noise.
    pub fn silent(n: usize) -> Self {
        Self::uniform(0, n, 0.0, 1.0).expect("zero amplitude is valid")
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n(&self) -> usize {
        self.amplitude.len()
    }

    pub fn amplitude(&self) -> &[f64] {
        &self.amplitude
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    /// Window index `floor(t * sample_rate)`, snapped at boundaries.
    pub fn window_index(&self, t: f64) -> u64 {
        let scaled = (t * self.sample_rate).max(0.0);
        let nearest = scaled.round();
        if (scaled - nearest).abs() <= WINDOW_SNAP * nearest.max(1.0) {
            nearest as u64
        } else {
            scaled.floor() as u64
        }
    }

    /// Noise value of `agent` in window `window`.
    pub fn sample_window(&self, agent: usize, window: u64) -> Result<f64> {
        let amplitude = *self.amplitude.get(agent).ok_or(Error::AgentOutOfRange {
            index: agent,
            n: self.n(),
        })?;
        if amplitude == 0.0 {
            return Ok(0.0);
        }
        let mut rng = self.base.clone();
        rng.set_stream(agent as u64);
        // one u64 (two 32-bit words) per window
        rng.set_word_pos(u128::from(window) * 2);
        let unit: f64 = rng.random();
        Ok(amplitude * (2.0 * unit - 1.0))
    }

    /// `w_i(t)`.
    pub fn sample(&self, agent: usize, t: f64) -> Result<f64> {
        self.sample_window(agent, self.window_index(t))
    }

    /// `w(t)` for all agents.
    pub fn sample_vector(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.n()];
        self.fill(t, &mut out);
        out
    }

    pub(crate) fn fill(&self, t: f64, out: &mut [f64]) {
        let window = self.window_index(t);
        for (agent, slot) in out.iter_mut().enumerate() {
            *slot = self
                .sample_window(agent, window)
                .expect("agent index within range");
        }
    }
}

/// Process disturbance `v` added to the agent dynamics.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Disturbance {
    #[default]
    Zero,
    Constant(Vec<f64>),
}

impl Disturbance {
    pub fn is_zero(&self) -> bool {
        match self {
            Disturbance::Zero => true,
            Disturbance::Constant(v) => v.iter().all(|&x| x == 0.0),
        }
    }

    pub fn value(&self, agent: usize) -> f64 {
        match self {
            Disturbance::Zero => 0.0,
            Disturbance::Constant(v) => v[agent],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_noise(seed: u64) -> NoiseSignal {
        NoiseSignal::uniform(seed, 8, 1e-4, 1e4).unwrap()
    }

    #[test]
    fn zero_amplitude_is_silent() {
        let noise = NoiseSignal::uniform(7, 3, 0.0, 1e4).unwrap();
        for k in 0..100 {
            assert_eq!(noise.sample_vector(k as f64 * 1.3e-3), vec![0.0; 3]);
        }
    }

    #[test]
    fn repeated_queries_agree() {
        let noise = reference_noise(42);
        for t in [0.0, 0.12345, 3.5, 7.99999] {
            assert_eq!(noise.sample(3, t).unwrap(), noise.sample(3, t).unwrap());
        }
        let clone = reference_noise(42);
        assert_eq!(noise.sample_vector(1.0), clone.sample_vector(1.0));
    }

    #[test]
    fn constant_within_a_window() {
        let noise = reference_noise(1);
        let rate = noise.sample_rate();
        for k in [0u64, 1, 17, 9_999, 79_999] {
            let t = k as f64 / rate;
            let a = noise.sample(5, t).unwrap();
            let b = noise.sample(5, t + 0.4 / rate).unwrap();
            assert_eq!(a, b, "window {k}");
        }
    }

    #[test]
    fn grid_times_land_in_their_window() {
        let noise = reference_noise(1);
        let h = 1e-4;
        for k in 0..200_000u64 {
            assert_eq!(noise.window_index(k as f64 * h), k);
        }
    }

    #[test]
    fn bounded_by_amplitude() {
        let noise = NoiseSignal::new(9, vec![1e-4, 0.5, 2.0], 1e3).unwrap();
        for k in 0..5_000 {
            for (i, &bound) in noise.amplitude().iter().enumerate() {
                assert!(noise.sample_window(i, k).unwrap().abs() <= bound);
            }
        }
    }

    #[test]
    fn out_of_range_agent_is_an_error() {
        let noise = reference_noise(0);
        assert!(matches!(
            noise.sample(8, 0.0),
            Err(Error::AgentOutOfRange { index: 8, n: 8 })
        ));
    }

    #[test]
    fn adjacent_seeds_differ() {
        let a = reference_noise(100);
        let b = reference_noise(101);
        let distinct = (0..10_000u64)
            .filter(|&k| {
                let t = k as f64 * 1e-4;
                a.sample_vector(t) != b.sample_vector(t)
            })
            .count();
        assert_eq!(distinct, 10_000);
    }

    #[test]
    fn empirical_mean_within_standard_error() {
        let noise = reference_noise(2024);
        let windows = 100_000u64;
        let bound = 3.0 * 1e-4 / (3.0 * windows as f64).sqrt();
        for agent in 0..8 {
            let mean = (0..windows)
                .map(|k| noise.sample_window(agent, k).unwrap())
                .sum::<f64>()
                / windows as f64;
            assert!(
                mean.abs() <= bound,
                "agent {agent}: mean {mean:e} > {bound:e}"
            );
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(NoiseSignal::uniform(0, 2, -1.0, 1.0).is_err());
        assert!(NoiseSignal::uniform(0, 2, 1.0, 0.0).is_err());
    }
}
