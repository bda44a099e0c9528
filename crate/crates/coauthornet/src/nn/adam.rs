//! Adam optimizer with bias correction.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct AdamConfig {
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            alpha: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Moment accumulators for one parameter block.
#[derive(Debug, Clone)]
pub struct AdamState {
    cfg: AdamConfig,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl AdamState {
    pub fn new(len: usize, cfg: AdamConfig) -> Self {
        AdamState {
            cfg,
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    pub fn moments(&self) -> (&[f64], &[f64]) {
        (&self.m, &self.v)
    }

    /// One bias-corrected update: `θ ← θ − α·m̂/(√v̂ + ε)`.
    ///
    /// `block` names the parameter block in divergence errors; `epoch` is
    /// carried into the error for reporting only.
    pub fn step(
        &mut self,
        params: &mut [f64],
        grads: &[f64],
        block: &str,
        epoch: usize,
    ) -> Result<()> {
        assert_eq!(params.len(), self.m.len(), "adam state shape mismatch");
        assert_eq!(params.len(), grads.len(), "adam gradient shape mismatch");
        if grads.iter().any(|g| !g.is_finite()) {
            return Err(Error::Divergence {
                block: block.to_string(),
                epoch,
            });
        }
        self.t += 1;
        let t = self.t as i32;
        let AdamConfig {
            alpha,
            beta1,
            beta2,
            eps,
        } = self.cfg;
        let bc1 = 1.0 - beta1.powi(t);
        let bc2 = 1.0 - beta2.powi(t);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = beta1 * self.m[i] + (1.0 - beta1) * g;
            self.v[i] = beta2 * self.v[i] + (1.0 - beta2) * g * g;
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= alpha * m_hat / (v_hat.sqrt() + eps);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_params_and_moments_untouched() {
        let mut st = AdamState::new(3, AdamConfig::default());
        let mut p = vec![1.0, -2.0, 0.5];
        st.step(&mut p, &[0.0, 0.0, 0.0], "w", 0).unwrap();
        assert_eq!(p, vec![1.0, -2.0, 0.5]);
        let (m, v) = st.moments();
        assert!(m.iter().all(|&x| x == 0.0));
        assert!(v.iter().all(|&x| x == 0.0));
        assert_eq!(st.step_count(), 1);
    }

    #[test]
    fn first_step_with_unit_gradient_moves_by_about_alpha() {
        let cfg = AdamConfig::default();
        let mut st = AdamState::new(1, cfg);
        let mut p = vec![0.0];
        st.step(&mut p, &[1.0], "w", 0).unwrap();
        // m_hat = v_hat = 1 after bias correction, so the update is
        // -alpha / (1 + eps).
        let expected = -cfg.alpha / (1.0 + cfg.eps);
        assert!((p[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn descends_a_quadratic() {
        let cfg = AdamConfig {
            alpha: 0.1,
            ..AdamConfig::default()
        };
        let mut st = AdamState::new(1, cfg);
        let mut p = vec![1.0];
        for _ in 0..100 {
            let g = vec![2.0 * p[0]];
            st.step(&mut p, &g, "w", 0).unwrap();
        }
        assert!(p[0].abs() < 1.0, "w should have decreased, got {}", p[0]);
    }

    #[test]
    fn non_finite_gradient_names_the_block() {
        let mut st = AdamState::new(1, AdamConfig::default());
        let mut p = vec![0.0];
        let err = st.step(&mut p, &[f64::NAN], "classifier.w", 3).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("classifier.w"), "{msg}");
        assert!(msg.contains('3'), "{msg}");
    }
}
