//! Classical fixed-step fourth-order Runge-Kutta on flat state slices.

/// Scratch buffers for [`Rk4::step`], sized once per state dimension.
#[derive(Debug, Clone)]
pub struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    stage: Vec<f64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        Self {
            k1: vec![0.0; dim],
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            stage: vec![0.0; dim],
        }
    }

    /// Advances `y` in place from `t` to `t + h` for `dy/dt = f(t, y)`.
    ///
    /// `f` writes the derivative into its third argument.
    pub fn step<F>(&mut self, f: &mut F, t: f64, y: &mut [f64], h: f64)
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        let half = 0.5 * h;
        f(t, y, &mut self.k1);
        for ((s, &yi), &k) in self.stage.iter_mut().zip(y.iter()).zip(&self.k1) {
            *s = yi + half * k;
        }
        f(t + half, &self.stage, &mut self.k2);
        for ((s, &yi), &k) in self.stage.iter_mut().zip(y.iter()).zip(&self.k2) {
            *s = yi + half * k;
        }
        f(t + half, &self.stage, &mut self.k3);
        for ((s, &yi), &k) in self.stage.iter_mut().zip(y.iter()).zip(&self.k3) {
            *s = yi + h * k;
        }
        f(t + h, &self.stage, &mut self.k4);
        let sixth = h / 6.0;
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += sixth * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let mut rk = Rk4::new(1);
        let mut y = [1.0];
        let h = 0.01;
        for k in 0..100 {
            rk.step(
                &mut |_, y: &[f64], dy: &mut [f64]| dy[0] = y[0],
                k as f64 * h,
                &mut y,
                h,
            );
        }
        assert!((y[0] - std::f64::consts::E).abs() < 1e-9);
    }

    #[test]
    fn fourth_order_convergence() {
        // y' = -2 t y, y(0) = 1  =>  y(1) = exp(-1)
        let solve = |steps: usize| {
            let mut rk = Rk4::new(1);
            let mut y = [1.0];
            let h = 1.0 / steps as f64;
            for k in 0..steps {
                rk.step(
                    &mut |t, y: &[f64], dy: &mut [f64]| dy[0] = -2.0 * t * y[0],
                    k as f64 * h,
                    &mut y,
                    h,
                );
            }
            (y[0] - (-1.0f64).exp()).abs()
        };
        let ratio = solve(20) / solve(40);
        assert!(ratio > 14.0 && ratio < 18.0, "error ratio {ratio}");
    }
}
