//! Time-regularized dynamic trigger for undirected consensus.
//!
//! Each agent runs a clock `tau_i`; the measured-error penalty is gated off by
//! `omega_i(tau_i)` for `tau_i < tau_miet_i`, which enforces a dwell time
//! after every transmission. The dwell time is the time for
//! `dphi/dtau = -gamma (phi^2 / (alpha sigma) + 1)` to travel from
//! `phi(0) = 1 / lambda` down to `lambda`.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ode::Rk4;

use super::CommonParams;

/// Which expression is used for `sigma_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SigmaForm {
    /// `(1 - varrho)(1 - a N_i)`: the printed experiment constants
    /// (0.76 and 0.665) come from this form.
    #[default]
    Original,
    /// `(1 - varrho)(1 - 2 a N_i)`.
    Modified,
}

/// How `eta_i` changes at a transmission of agent `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResetMode {
    /// `eta+ = eta`.
    #[default]
    Standard,
    /// `eta+ = eta + gamma lambda max(|e~| - 2 w_bar, 0)^2`.
    Remark5,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DolkParams {
    pub a: f64,
    pub varrho: f64,
    pub mu: Vec<f64>,
    pub alpha: Vec<f64>,
    pub lambda: Vec<f64>,
    pub sigma_form: SigmaForm,
    pub reset: ResetMode,
    pub common: CommonParams,
}

fn open_unit(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            domain: "(0, 1)",
        })
    }
}

/// `gamma_i = sqrt(N_i / a + mu_i)` and `sigma_i` in the requested form.
pub fn gamma_sigma_from(
    a: f64,
    mu: f64,
    varrho: f64,
    neighbors: usize,
    form: SigmaForm,
) -> Result<(f64, f64)> {
    let n = neighbors as f64;
    if !(a > 0.0 && 2.0 * a * n < 1.0) {
        return Err(Error::Domain {
            name: "etm.a",
            value: a,
            domain: "0 < a < 1 / (2 N_i)",
        });
    }
    if !(mu > 0.0) {
        return Err(Error::Domain {
            name: "etm.mu",
            value: mu,
            domain: "> 0",
        });
    }
    open_unit("etm.varrho", varrho)?;
    let gamma = (n / a + mu).sqrt();
    let sigma = match form {
        SigmaForm::Original => (1.0 - varrho) * (1.0 - a * n),
        SigmaForm::Modified => (1.0 - varrho) * (1.0 - 2.0 * a * n),
    };
    Ok((gamma, sigma))
}

/// Closed-form dwell time
/// `-(sqrt(alpha sigma) / gamma) atan((lambda^2 - 1) sqrt(alpha sigma) / (lambda (alpha sigma + 1)))`.
pub fn tau_miet(alpha: f64, sigma: f64, gamma: f64, lambda: f64) -> Result<f64> {
    open_unit("etm.alpha", alpha)?;
    open_unit("sigma", sigma)?;
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::Domain {
            name: "etm.lambda",
            value: lambda,
            domain: "(0, 1)",
        });
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Domain {
            name: "gamma",
            value: gamma,
            domain: "> 0",
        });
    }
    let root = (alpha * sigma).sqrt();
    let arg = (lambda * lambda - 1.0) * root / (lambda * (alpha * sigma + 1.0));
    Ok(-(root / gamma) * arg.atan())
}

/// Gate: 1 before the dwell time has elapsed, 0 from `tau_miet` on.
///
/// The boundary value is set-valued in the hybrid model; 0 is selected so the
/// trigger is never enabled later than the dwell time.
pub fn omega(tau: f64, tau_miet: f64) -> f64 {
    if tau < tau_miet {
        1.0
    } else {
        0.0
    }
}

/// `Psi_i = (1 - alpha) sigma u^2 + c - (1 - omega) gamma^2 (lambda^2 / (alpha sigma) + 1) e~^2`.
#[allow(clippy::too_many_arguments)]
pub fn dolk_psi(
    u: f64,
    e_tilde: f64,
    tau: f64,
    tau_miet: f64,
    alpha: f64,
    sigma: f64,
    gamma: f64,
    lambda: f64,
    c: f64,
) -> f64 {
    let gate = 1.0 - omega(tau, tau_miet);
    let penalty = gamma * gamma * (lambda * lambda / (alpha * sigma) + 1.0);
    (1.0 - alpha) * sigma * u * u + c - gate * penalty * e_tilde * e_tilde
}

/// `eta+` for the chosen reset mode.
pub fn eta_reset(
    eta: f64,
    e_tilde: f64,
    gamma: f64,
    lambda: f64,
    w_bar: f64,
    mode: ResetMode,
) -> f64 {
    match mode {
        ResetMode::Standard => eta,
        ResetMode::Remark5 => {
            let excess = (e_tilde.abs() - 2.0 * w_bar).max(0.0);
            eta + gamma * lambda * excess * excess
        }
    }
}

fn phi_rate(phi: f64, gamma: f64, alpha_sigma: f64) -> f64 {
    -gamma * (phi * phi / alpha_sigma + 1.0)
}

/// `phi` sampled on `[0, tau_miet]`, constant `lambda` afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiTable {
    gamma: f64,
    alpha_sigma: f64,
    lambda: f64,
    tau_miet: f64,
    spacing: f64,
    values: Vec<f64>,
}

impl PhiTable {
    pub fn tau_miet(&self) -> f64 {
        self.tau_miet
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(k, &v)| (k as f64 * self.spacing, v))
    }

    /// `phi(tau)`, cubic Hermite between samples.
    pub fn eval(&self, tau: f64) -> f64 {
        if tau >= self.tau_miet {
            return self.lambda;
        }
        let tau = tau.max(0.0);
        let pos = tau / self.spacing;
        let k = (pos.floor() as usize).min(self.values.len() - 2);
        let s = pos - k as f64;
        let (p0, p1) = (self.values[k], self.values[k + 1]);
        let m0 = self.spacing * phi_rate(p0, self.gamma, self.alpha_sigma);
        let m1 = self.spacing * phi_rate(p1, self.gamma, self.alpha_sigma);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * p0
            + (s3 - 2.0 * s2 + s) * m0
            + (-2.0 * s3 + 3.0 * s2) * p1
            + (s3 - s2) * m1
    }
}

const PHI_TOL: f64 = 1e-12;
const PHI_MAX_STEPS: usize = 1 << 22;

fn integrate_phi(start: f64, gamma: f64, alpha_sigma: f64, span: f64, steps: usize) -> Vec<f64> {
    let h = span / steps as f64;
    let mut rk = Rk4::new(1);
    let mut y = [start];
    let mut out = Vec::with_capacity(steps + 1);
    out.push(start);
    let mut f = |_t: f64, y: &[f64], dy: &mut [f64]| dy[0] = phi_rate(y[0], gamma, alpha_sigma);
    for k in 0..steps {
        rk.step(&mut f, k as f64 * h, &mut y, h);
        out.push(y[0]);
    }
    out
}

/// Solves the `phi` ODE on `[0, tau_miet]` with step doubling until two
/// successive resolutions agree at the endpoint.
pub fn phi_solve(alpha: f64, sigma: f64, gamma: f64, lambda: f64) -> Result<PhiTable> {
    let tau_miet = tau_miet(alpha, sigma, gamma, lambda)?;
    let alpha_sigma = alpha * sigma;
    let start = 1.0 / lambda;
    let mut steps = 256;
    let mut coarse = integrate_phi(start, gamma, alpha_sigma, tau_miet, steps);
    loop {
        let fine = integrate_phi(start, gamma, alpha_sigma, tau_miet, 2 * steps);
        let diff = (fine[2 * steps] - coarse[steps]).abs();
        steps *= 2;
        if diff <= PHI_TOL {
            return Ok(PhiTable {
                gamma,
                alpha_sigma,
                lambda,
                tau_miet,
                spacing: tau_miet / steps as f64,
                values: fine,
            });
        }
        if steps >= PHI_MAX_STEPS {
            return Err(Error::Integration {
                tol: PHI_TOL,
                steps,
            });
        }
        coarse = fine;
    }
}

/// Time at which the ungated `phi` ODE, started at `1 / lambda`, first reaches
/// `lambda`. Found by marching with fixed RK4 steps and bisecting on the cubic
/// Hermite interpolant of the bracketing step. Independent of the closed form.
pub fn phi_crossing_time(
    alpha: f64,
    sigma: f64,
    gamma: f64,
    lambda: f64,
    step: f64,
) -> Result<f64> {
    let alpha_sigma = alpha * sigma;
    let mut rk = Rk4::new(1);
    let mut f = |_t: f64, y: &[f64], dy: &mut [f64]| dy[0] = phi_rate(y[0], gamma, alpha_sigma);
    let mut y = [1.0 / lambda];
    let mut k = 0usize;
    let max_steps = (1e3 / step) as usize;
    while k < max_steps {
        let prev = y[0];
        rk.step(&mut f, k as f64 * step, &mut y, step);
        if y[0] <= lambda {
            let (p0, p1) = (prev, y[0]);
            let m0 = step * phi_rate(p0, gamma, alpha_sigma);
            let m1 = step * phi_rate(p1, gamma, alpha_sigma);
            let hermite = |s: f64| {
                let s2 = s * s;
                let s3 = s2 * s;
                (2.0 * s3 - 3.0 * s2 + 1.0) * p0
                    + (s3 - 2.0 * s2 + s) * m0
                    + (-2.0 * s3 + 3.0 * s2) * p1
                    + (s3 - s2) * m1
            };
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if hermite(mid) > lambda {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok((k as f64 + 0.5 * (lo + hi)) * step);
        }
        k += 1;
    }
    Err(Error::Integration {
        tol: step,
        steps: max_steps,
    })
}

/// Per-agent constants derived from [`DolkParams`] and the graph.
#[derive(Debug, Clone, PartialEq)]
pub struct DolkScheme {
    params: DolkParams,
    neighbors: Vec<usize>,
    gamma: Vec<f64>,
    sigma: Vec<f64>,
    tau_miet: Vec<f64>,
    phi: Vec<PhiTable>,
}

impl DolkScheme {
    pub fn new(params: DolkParams, graph: &Graph) -> Result<Self> {
        let n = graph.n();
        params.common.check_len(n)?;
        for (what, v) in [
            ("etm.mu", &params.mu),
            ("etm.alpha", &params.alpha),
            ("etm.lambda", &params.lambda),
        ] {
            if v.len() != n {
                return Err(Error::Dimension {
                    what,
                    got: v.len(),
                    expected: n,
                });
            }
        }
        if !graph.is_undirected() {
            return Err(Error::Scenario(
                "the Dolk trigger requires an undirected graph".into(),
            ));
        }
        let neighbors: Vec<usize> = (0..n).map(|i| graph.neighbor_count(i)).collect();
        let mut gamma = Vec::with_capacity(n);
        let mut sigma = Vec::with_capacity(n);
        let mut tau = Vec::with_capacity(n);
        let mut phi = Vec::with_capacity(n);
        for i in 0..n {
            open_unit("etm.alpha", params.alpha[i])?;
            open_unit("etm.lambda", params.lambda[i])?;
            let (g, s) = gamma_sigma_from(
                params.a,
                params.mu[i],
                params.varrho,
                neighbors[i],
                params.sigma_form,
            )?;
            let table = phi_solve(params.alpha[i], s, g, params.lambda[i])?;
            gamma.push(g);
            sigma.push(s);
            tau.push(table.tau_miet());
            phi.push(table);
        }
        Ok(Self {
            params,
            neighbors,
            gamma,
            sigma,
            tau_miet: tau,
            phi,
        })
    }

    pub fn params(&self) -> &DolkParams {
        &self.params
    }

    pub fn neighbors(&self, i: usize) -> usize {
        self.neighbors[i]
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn tau_miet(&self) -> &[f64] {
        &self.tau_miet
    }

    pub fn phi(&self, i: usize) -> &PhiTable {
        &self.phi[i]
    }

    pub fn psi(&self, i: usize, u: f64, e_tilde: f64, tau: f64) -> f64 {
        let p = &self.params;
        dolk_psi(
            u,
            e_tilde,
            tau,
            self.tau_miet[i],
            p.alpha[i],
            self.sigma[i],
            self.gamma[i],
            p.lambda[i],
            p.common.c[i],
        )
    }

    pub fn eta_reset(&self, i: usize, eta: f64, e_tilde: f64) -> f64 {
        eta_reset(
            eta,
            e_tilde,
            self.gamma[i],
            self.params.lambda[i],
            self.params.common.w_bar[i],
            self.params.reset,
        )
    }

    /// `gamma_i phi_i(tau_i) e_i^2`, the clock-dependent storage term.
    pub fn storage(&self, i: usize, e: f64, tau: f64) -> f64 {
        self.gamma[i] * self.phi[i].eval(tau) * e * e
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_dwell_times() {
        let t2 = tau_miet(0.5, 0.76, 4.478, 0.2).unwrap();
        let t3 = tau_miet(0.5, 0.665, 5.482, 0.2).unwrap();
        assert!((t2 - 0.1562).abs() <= 5e-4, "{t2}");
        assert!((t3 - 0.1180).abs() <= 5e-4, "{t3}");
    }

    #[test]
    fn dwell_time_vanishes_as_lambda_tends_to_one() {
        assert_eq!(tau_miet(0.5, 0.76, 4.478, 1.0).unwrap(), 0.0);
        assert!(tau_miet(0.5, 0.76, 4.478, 0.999_999).unwrap() < 1e-6);
    }

    #[test]
    fn dwell_time_domain_errors() {
        assert!(tau_miet(0.0, 0.76, 4.478, 0.2).is_err());
        assert!(tau_miet(0.5, 1.2, 4.478, 0.2).is_err());
        assert!(tau_miet(0.5, 0.76, -1.0, 0.2).is_err());
        assert!(tau_miet(0.5, 0.76, 4.478, 0.0).is_err());
    }

    #[test]
    fn derived_constants() {
        let (g2, s2) = gamma_sigma_from(0.1, 0.05, 0.05, 2, SigmaForm::Original).unwrap();
        let (g3, s3) = gamma_sigma_from(0.1, 0.05, 0.05, 3, SigmaForm::Original).unwrap();
        assert!((g2 - 4.478).abs() <= 1e-3);
        assert!((g3 - 5.482).abs() <= 1e-3);
        assert!((s2 - 0.76).abs() <= 1e-12);
        assert!((s3 - 0.665).abs() <= 1e-12);
        let (_, m2) = gamma_sigma_from(0.1, 0.05, 0.05, 2, SigmaForm::Modified).unwrap();
        assert!((m2 - 0.57).abs() <= 1e-12);
        assert!(gamma_sigma_from(0.2, 0.05, 0.05, 3, SigmaForm::Original).is_err());
    }

    #[test]
    fn omega_selection() {
        assert_eq!(omega(0.0, 0.1562), 1.0);
        assert_eq!(omega(2.0 * 0.1562, 0.1562), 0.0);
        assert_eq!(omega(0.1562, 0.1562), 0.0);
    }

    #[test]
    fn psi_inside_dwell_ignores_error() {
        let t = tau_miet(0.5, 0.76, 4.478, 0.2).unwrap();
        assert_eq!(
            dolk_psi(0.0, 10.0, 0.5 * t, t, 0.5, 0.76, 4.478, 0.2, 0.0),
            0.0
        );
        assert!(dolk_psi(0.1, 10.0, 0.5 * t, t, 0.5, 0.76, 4.478, 0.2, 0.0) > 0.0);
        assert_eq!(
            dolk_psi(0.0, 0.0, 10.0, t, 0.5, 0.76, 4.478, 0.2, 3e-7),
            3e-7
        );
    }

    #[test]
    fn psi_after_dwell_penalizes_error() {
        let t = tau_miet(0.5, 0.76, 4.478, 0.2).unwrap();
        let psi = dolk_psi(0.0, 1.0, 2.0 * t, t, 0.5, 0.76, 4.478, 0.2, 0.0);
        // gamma^2 = 20.052484, lambda^2 / (alpha sigma) + 1 = 0.04 / 0.38 + 1
        let expected = -(4.478f64 * 4.478) * (0.04 / 0.38 + 1.0);
        assert!((psi - expected).abs() < 1e-12);
        assert!((psi + 22.163).abs() < 1e-3);
    }

    #[test]
    fn reset_modes() {
        assert_eq!(
            eta_reset(0.7, 5.0, 4.478, 0.2, 1e-4, ResetMode::Standard),
            0.7
        );
        assert_eq!(
            eta_reset(0.7, 1.5e-4, 4.478, 0.2, 1e-4, ResetMode::Remark5),
            0.7
        );
        let bumped = eta_reset(0.0, 1.0, 4.478, 0.2, 1e-4, ResetMode::Remark5);
        let expected = 4.478 * 0.2 * (1.0 - 2e-4) * (1.0 - 2e-4);
        assert!((bumped - expected).abs() < 1e-15);
        assert!((bumped - 0.89524).abs() < 1e-5);
    }

    #[test]
    fn phi_table_endpoints() {
        let table = phi_solve(0.5, 0.76, 4.478, 0.2).unwrap();
        assert_eq!(table.eval(0.0), 5.0);
        let end = table.samples().last().unwrap().1;
        assert!((end - 0.2).abs() < 1e-6, "{end}");
        assert_eq!(table.eval(1.0), 0.2);
        let values: Vec<f64> = table.samples().map(|(_, v)| v).collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]));
    }
}
