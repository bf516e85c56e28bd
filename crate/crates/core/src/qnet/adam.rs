use serde::{Deserialize, Serialize};

use super::network::Real;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 1e-4,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Adam with bias-corrected first and second moments.
#[derive(Clone, Debug)]
pub struct Adam<T: Real> {
    pub config: AdamConfig,
    pub m: Vec<T>,
    pub v: Vec<T>,
    pub step: u64,
}

impl<T: Real> Adam<T> {
    pub fn new(config: AdamConfig, n_params: usize) -> Self {
        Self {
            config,
            m: vec![T::zero(); n_params],
            v: vec![T::zero(); n_params],
            step: 0,
        }
    }

    pub fn update(&mut self, params: &mut [T], grads: &[T]) -> Result<()> {
        for len in [params.len(), grads.len()] {
            if len != self.m.len() {
                return Err(Error::ShapeMismatch {
                    expected: self.m.len(),
                    found: len,
                });
            }
        }
        self.step += 1;
        let c = self.config;
        let (b1, b2) = (T::of(c.beta1), T::of(c.beta2));
        let (ob1, ob2) = (T::of(1.0 - c.beta1), T::of(1.0 - c.beta2));
        let t = self.step as i32;
        let lr_t = T::of(c.lr * (1.0 - c.beta2.powi(t)).sqrt() / (1.0 - c.beta1.powi(t)));
        let eps_hat = T::of(c.eps * (1.0 - c.beta2.powi(t)).sqrt());
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = b1 * self.m[i] + ob1 * g;
            self.v[i] = b2 * self.v[i] + ob2 * g * g;
            params[i] = params[i] - lr_t * self.m[i] / (self.v[i].sqrt() + eps_hat);
        }
        Ok(())
    }
}
