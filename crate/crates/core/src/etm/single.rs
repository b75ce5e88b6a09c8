//! Pluggable trigger for a single plant under static state feedback.
//!
//! Given ISS gains `alpha` (decay) and `varrho` (error gain) of a Lyapunov
//! function `W`, the robust trigger uses `delta(y~) = sigma alpha(|y~| / 2)`
//! and `beta(s) = varrho(2 s)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

use super::{check_zeno_bounds, CommonParams};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `delta` and `beta` as callables plus the usual regularization constants.
#[derive(Clone)]
pub struct SingleSystemHooks {
    pub delta: ScalarFn,
    pub beta: ScalarFn,
    pub common: CommonParams,
    /// Short description echoed into run manifests.
    pub label: String,
}

impl fmt::Debug for SingleSystemHooks {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SingleSystemHooks")
            .field("label", &self.label)
            .field("common", &self.common)
            .finish_non_exhaustive()
    }
}

impl SingleSystemHooks {
    /// Builds the hooks from the ISS gains `alpha` and `varrho` of `W`.
    pub fn from_iss_gains(
        alpha: ScalarFn,
        varrho: ScalarFn,
        sigma: f64,
        common: CommonParams,
        label: impl Into<String>,
    ) -> Result<Self> {
        if !(sigma > 0.0 && sigma < 1.0) {
            return Err(Error::Domain {
                name: "etm.sigma",
                value: sigma,
                domain: "(0, 1)",
            });
        }
        Ok(Self {
            delta: Arc::new(move |y: f64| sigma * alpha(0.5 * y)),
            beta: Arc::new(move |s: f64| varrho(2.0 * s)),
            common,
            label: label.into(),
        })
    }

    /// Scalar integrator `x' = -k (x + e + w^)` with `W = x^2 / 2`.
    ///
    /// `W' = -k x^2 - k x eps <= -(k/2) x^2 + (k/2) eps^2`, so
    /// `alpha(s) = varrho(s) = (k/2) s^2`, `delta(y) = sigma k y^2 / 8` and
    /// `beta(s) = 2 k s^2`.
    pub fn scalar_integrator(gain: f64, sigma: f64, common: CommonParams) -> Result<Self> {
        if !(gain > 0.0 && gain.is_finite()) {
            return Err(Error::Domain {
                name: "etm.gain",
                value: gain,
                domain: "> 0",
            });
        }
        let half = 0.5 * gain;
        Self::from_iss_gains(
            Arc::new(move |s| half * s * s),
            Arc::new(move |s| half * s * s),
            sigma,
            common,
            format!("scalar integrator, gain {gain}, sigma {sigma}"),
        )
    }
}

/// `delta(|y~|) - beta(|e~|) + c`.
pub fn psi_single(y_tilde_norm: f64, e_tilde_norm: f64, hooks: &SingleSystemHooks) -> f64 {
    (hooks.delta)(y_tilde_norm) - (hooks.beta)(e_tilde_norm) + hooks.common.c[0]
}

#[derive(Debug, Clone)]
pub struct SingleScheme {
    hooks: SingleSystemHooks,
}

impl SingleScheme {
    pub fn new(hooks: SingleSystemHooks) -> Result<Self> {
        hooks.common.check_len(1)?;
        let scheme = Self { hooks };
        check_zeno_bounds(&scheme.hooks.common, &scheme.c_lower_bound())?;
        Ok(scheme)
    }

    pub fn hooks(&self) -> &SingleSystemHooks {
        &self.hooks
    }

    pub fn psi(&self, y_tilde: f64, e_tilde: f64) -> f64 {
        psi_single(y_tilde.abs(), e_tilde.abs(), &self.hooks)
    }

    pub fn c_lower_bound(&self) -> Vec<f64> {
        vec![(self.hooks.beta)(2.0 * self.hooks.common.w_bar[0])]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::etm::TriggerMode;

    fn hooks(c: f64, w_bar: f64, allow_zeno: bool) -> SingleSystemHooks {
        let common = CommonParams::uniform(1, TriggerMode::Static, c, 0.0, w_bar, 0.05, allow_zeno);
        SingleSystemHooks::scalar_integrator(1.0, 0.5, common).unwrap()
    }

    #[test]
    fn psi_at_rest_is_c() {
        let h = hooks(3e-7, 0.0, false);
        assert_eq!(psi_single(0.0, 0.0, &h), 3e-7);
    }

    #[test]
    fn scalar_demo_value() {
        let h = hooks(0.0, 0.0, true);
        // delta(2) = 0.5 * 4 / 8 = 0.25, beta(0.1) = 2 * 0.01 = 0.02
        assert!((psi_single(2.0, 0.1, &h) - 0.23).abs() < 1e-15);
    }

    #[test]
    fn zeno_bound_for_scalar_demo() {
        let scheme = SingleScheme::new(hooks(1e-7, 1e-4, false)).unwrap();
        assert!((scheme.c_lower_bound()[0] - 8e-8).abs() < 1e-20);
        assert!(matches!(
            SingleScheme::new(hooks(5e-8, 1e-4, false)),
            Err(Error::ZenoBound { .. })
        ));
    }
}
