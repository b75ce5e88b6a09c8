//! Hybrid simulation loop.
//!
//! Flows are integrated with fixed-step RK4, holding the noise sample of the
//! window that contains the step start. Jump conditions are checked at every
//! grid point (and, with refinement, at bisected crossing times inside a
//! step). Jumping agents are processed one at a time in ascending index and
//! the whole network is re-checked until nobody is in the jump set.

use crate::error::{Error, Result};
use crate::etm::{trigger_decision, Decision, Observation, TriggerMode, TriggerScheme};
use crate::hybrid::{jump_in_place, FlowMap, HybridState, HybridTime, JumpEvent, Plant};
use crate::ode::Rk4;
use crate::signals::{Disturbance, NoiseSignal};

/// Absolute tolerance used by trace checks on `Psi` and `eta + theta Psi`.
pub const TRIGGER_TOL: f64 = 1e-12;
/// Width of the bracket left by crossing-time bisection.
pub const REFINE_TOL: f64 = 1e-9;
/// Jumps allowed at one continuous time, per agent.
pub const STORM_FACTOR: usize = 10;

#[derive(Debug, Clone)]
pub struct Scenario {
    pub plant: Plant,
    pub scheme: TriggerScheme,
    pub noise: NoiseSignal,
    pub disturbance: Disturbance,
    pub x0: Vec<f64>,
    /// Defaults to zero.
    pub e0: Option<Vec<f64>>,
    /// Defaults to `w(0)`.
    pub what_w0: Option<Vec<f64>>,
    pub eta0: Option<Vec<f64>>,
    pub tau0: Option<Vec<f64>>,
    pub t_final: f64,
    pub step: f64,
    pub refinement: bool,
    /// Keep every `decimate`-th grid sample (the last one is always kept).
    pub decimate: usize,
}

impl Scenario {
    /// Scenario with default initial data, `h = 1e-4`, no refinement and no
    /// decimation.
    pub fn new(
        plant: Plant,
        scheme: TriggerScheme,
        noise: NoiseSignal,
        x0: Vec<f64>,
        t_final: f64,
    ) -> Self {
        Self {
            plant,
            scheme,
            noise,
            disturbance: Disturbance::Zero,
            x0,
            e0: None,
            what_w0: None,
            eta0: None,
            tau0: None,
            t_final,
            step: 1e-4,
            refinement: false,
            decimate: 1,
        }
    }

    pub fn n(&self) -> usize {
        self.plant.n()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Domain {
                name: "sim.step",
                value: self.step,
                domain: "> 0",
            });
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::Domain {
                name: "sim.t_final",
                value: self.t_final,
                domain: "> 0",
            });
        }
        if self.decimate == 0 {
            return Err(Error::Scenario("sim.decimate must be positive".into()));
        }
        let mut dims = vec![
            ("x0", self.x0.len()),
            ("scheme", self.scheme.n()),
            ("noise", self.noise.n()),
        ];
        if let Disturbance::Constant(v) = &self.disturbance {
            dims.push(("disturbance", v.len()));
        }
        for (what, v) in [
            ("e0", &self.e0),
            ("what_w0", &self.what_w0),
            ("eta0", &self.eta0),
            ("tau0", &self.tau0),
        ] {
            if let Some(v) = v {
                dims.push((what, v.len()));
            }
        }
        for (what, got) in dims {
            if got != n {
                return Err(Error::Dimension {
                    what,
                    got,
                    expected: n,
                });
            }
        }
        if let Some(eta0) = &self.eta0 {
            if let Some(&bad) = eta0.iter().find(|v| !(**v >= 0.0)) {
                return Err(Error::Domain {
                    name: "eta0",
                    value: bad,
                    domain: ">= 0",
                });
            }
        }
        if let Some(tau0) = &self.tau0 {
            if let Some(&bad) = tau0.iter().find(|v| !(**v >= 0.0)) {
                return Err(Error::Domain {
                    name: "tau0",
                    value: bad,
                    domain: ">= 0",
                });
            }
        }
        Ok(())
    }

    pub fn initial_state(&self) -> Result<HybridState> {
        let n = self.n();
        let zeros = vec![0.0; n];
        let w0 = self.noise.sample_vector(0.0);
        HybridState::new(
            &self.x0,
            self.e0.as_deref().unwrap_or(&zeros),
            self.what_w0.as_deref().unwrap_or(&w0),
            self.eta0.as_deref().unwrap_or(&zeros),
            self.tau0.as_deref().unwrap_or(&zeros),
        )
    }

    /// Number of grid steps covering `[0, t_final]`.
    pub fn steps(&self) -> u64 {
        let ratio = self.t_final / self.step;
        let nearest = ratio.round();
        if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
            nearest as u64
        } else {
            ratio.ceil() as u64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub time: HybridTime,
    pub state: HybridState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionTrace {
    /// Post-jump states at (decimated) grid points, starting with `(0, 0)`.
    pub samples: Vec<Sample>,
    pub events: Vec<JumpEvent>,
    pub step: f64,
    pub t_final: f64,
    pub seed: u64,
    pub tolerance: f64,
}

impl SolutionTrace {
    pub fn final_sample(&self) -> &Sample {
        self.samples
            .last()
            .expect("a trace always holds the initial sample")
    }

    /// Events of `agent` in time order.
    pub fn agent_events(&self, agent: usize) -> impl Iterator<Item = &JumpEvent> + '_ {
        self.events.iter().filter(move |ev| ev.agent == agent)
    }
}

/// Jump-processing state shared across one run.
struct Jumper<'a> {
    plant: &'a Plant,
    scheme: &'a TriggerScheme,
    u: Vec<f64>,
    last_jump: Vec<Option<f64>>,
    jumps: u64,
    cap: usize,
}

impl<'a> Jumper<'a> {
    fn observation(&self, state: &HybridState, w: &[f64], i: usize) -> Observation {
        Observation {
            u: self.u[i],
            e_tilde: state.e()[i] + state.what_w()[i] - w[i],
            y_tilde: state.x()[i] + w[i],
            tau: state.tau()[i],
        }
    }

    fn wants_jump(&self, state: &HybridState, w: &[f64], i: usize) -> Option<(Observation, f64)> {
        let obs = self.observation(state, w, i);
        let psi = self.scheme.psi(i, &obs);
        let eta = state.eta()[i];
        match trigger_decision(eta, psi, self.scheme.theta(i), self.scheme.mode()) {
            Decision::Jump => Some((obs, psi)),
            Decision::Flow => None,
        }
    }

    /// True if any agent is in the jump set; a jump that would not change the
    /// state is not counted.
    fn any_jump(&mut self, state: &HybridState, w: &[f64]) -> bool {
        self.plant.input(state, &mut self.u);
        (0..state.n())
            .any(|i| self.wants_jump(state, w, i).is_some() && !is_noop(self.scheme, state, w, i))
    }

    /// Processes all jumps at time `t` until the state lies in the flow set.
    fn settle(
        &mut self,
        t: f64,
        state: &mut HybridState,
        w: &[f64],
        events: &mut Vec<JumpEvent>,
    ) -> Result<()> {
        let n = state.n();
        let mut count = 0usize;
        loop {
            let mut jumped = false;
            for i in 0..n {
                self.plant.input(state, &mut self.u);
                let Some((obs, psi)) = self.wants_jump(state, w, i) else {
                    continue;
                };
                if is_noop(self.scheme, state, w, i) {
                    continue;
                }
                count += 1;
                if count > self.cap {
                    return Err(Error::JumpStorm {
                        t,
                        jumps: count,
                        cap: self.cap,
                    });
                }
                let pre = state.agent(i);
                jump_in_place(state, i, w, self.scheme);
                self.jumps += 1;
                let gap = self.last_jump[i].map(|prev| t - prev);
                self.last_jump[i] = Some(t);
                events.push(JumpEvent {
                    time: HybridTime { t, j: self.jumps },
                    agent: i,
                    pre,
                    post: state.agent(i),
                    psi,
                    u: obs.u,
                    e_tilde: obs.e_tilde,
                    gap,
                    noise: w[i],
                });
                jumped = true;
            }
            if !jumped {
                return Ok(());
            }
        }
    }
}

fn is_noop(scheme: &TriggerScheme, state: &HybridState, w: &[f64], i: usize) -> bool {
    let e_tilde = state.e()[i] + state.what_w()[i] - w[i];
    state.e()[i] == 0.0
        && state.what_w()[i] == w[i]
        && state.tau()[i] == 0.0
        && scheme.eta_reset(i, state.eta()[i], e_tilde) == state.eta()[i]
}

fn project_eta(state: &mut HybridState) {
    for eta in state.eta_mut() {
        if *eta < 0.0 {
            *eta = 0.0;
        }
    }
}

/// Runs `scenario` over `[0, t_final]`.
pub fn simulate(scenario: &Scenario) -> Result<SolutionTrace> {
    scenario.validate()?;
    let n = scenario.n();
    let h = scenario.step;
    let steps = scenario.steps();
    let mut state = scenario.initial_state()?;
    let mut flow = FlowMap::new(&scenario.plant, &scenario.scheme, &scenario.disturbance);
    let mut rk4 = Rk4::new(state.as_slice().len());
    let mut jumper = Jumper {
        plant: &scenario.plant,
        scheme: &scenario.scheme,
        u: vec![0.0; n],
        last_jump: vec![None; n],
        jumps: 0,
        cap: n * STORM_FACTOR,
    };
    let dynamic = scenario.scheme.mode() == TriggerMode::Dynamic;

    let mut events = Vec::new();
    let mut samples = Vec::with_capacity((steps / scenario.decimate as u64 + 2) as usize);
    let mut w = vec![0.0; n];
    scenario.noise.fill(0.0, &mut w);
    jumper.settle(0.0, &mut state, &w, &mut events)?;
    samples.push(Sample {
        time: HybridTime {
            t: 0.0,
            j: jumper.jumps,
        },
        state: state.clone(),
    });

    let mut probe = state.clone();
    for k in 0..steps {
        let t_start = k as f64 * h;
        let t_end = if k + 1 == steps {
            scenario.t_final
        } else {
            (k + 1) as f64 * h
        };
        scenario.noise.fill(t_start, &mut w);
        let mut rhs = |_t: f64, y: &[f64], dy: &mut [f64]| flow.eval(y, &w, dy);

        if scenario.refinement {
            let mut t = t_start;
            while t_end - t > REFINE_TOL {
                probe.as_mut_slice().copy_from_slice(state.as_slice());
                rk4.step(&mut rhs, t, probe.as_mut_slice(), t_end - t);
                if dynamic {
                    project_eta(&mut probe);
                }
                if !jumper.any_jump(&probe, &w) {
                    break;
                }
                // bisect on the offset of the first crossing
                let (mut lo, mut hi) = (0.0, t_end - t);
                while hi - lo > REFINE_TOL {
                    let mid = 0.5 * (lo + hi);
                    probe.as_mut_slice().copy_from_slice(state.as_slice());
                    rk4.step(&mut rhs, t, probe.as_mut_slice(), mid);
                    if dynamic {
                        project_eta(&mut probe);
                    }
                    if jumper.any_jump(&probe, &w) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                rk4.step(&mut rhs, t, state.as_mut_slice(), hi);
                if dynamic {
                    project_eta(&mut state);
                }
                t += hi;
                if t_end - t > REFINE_TOL {
                    jumper.settle(t, &mut state, &w, &mut events)?;
                } else {
                    break;
                }
            }
            if t_end > t {
                rk4.step(&mut rhs, t, state.as_mut_slice(), t_end - t);
            }
        } else {
            rk4.step(&mut rhs, t_start, state.as_mut_slice(), t_end - t_start);
        }
        if dynamic {
            project_eta(&mut state);
        }

        scenario.noise.fill(t_end, &mut w);
        jumper.settle(t_end, &mut state, &w, &mut events)?;
        if (k + 1) % scenario.decimate as u64 == 0 || k + 1 == steps {
            samples.push(Sample {
                time: HybridTime {
                    t: t_end,
                    j: jumper.jumps,
                },
                state: state.clone(),
            });
        }
    }

    Ok(SolutionTrace {
        samples,
        events,
        step: h,
        t_final: scenario.t_final,
        seed: scenario.noise.seed(),
        tolerance: TRIGGER_TOL,
    })
}

impl Scenario {
    /// Copy with the noise re-seeded; amplitudes and rate are kept.
    pub fn with_seed(&self, seed: u64) -> Result<Self> {
        let mut next = self.clone();
        next.noise = NoiseSignal::new(
            seed,
            self.noise.amplitude().to_vec(),
            self.noise.sample_rate(),
        )?;
        Ok(next)
    }

    /// Copy with a different integration step.
    pub fn with_step(&self, step: f64) -> Self {
        let mut next = self.clone();
        next.step = step;
        next
    }
}
