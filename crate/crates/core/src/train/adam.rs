use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // unused whenever std is linked in
use num_traits::Float;
use serde::{Deserialize, Serialize};

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
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Moment estimates and step counter of ADAM, plus an optional running
/// average of the iterates (`avg ← avg + rate·(θ − avg)`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub step: u64,
    pub average: Option<Vec<f64>>,
    pub average_rate: f64,
}

impl AdamState {
    pub fn new(len: usize) -> Self {
        Self {
            m: vec![0.0; len],
            v: vec![0.0; len],
            step: 0,
            average: None,
            average_rate: 0.0,
        }
    }

    /// Also track a running average of the parameters with the given rate.
    pub fn with_averaging(mut self, theta: &[f64], rate: f64) -> Self {
        self.average = Some(theta.to_vec());
        self.average_rate = rate;
        self
    }
}

/// One bias-corrected ADAM update of `theta` in place.
pub fn adam_step(state: &mut AdamState, theta: &mut [f64], grad: &[f64], cfg: &AdamConfig) {
    assert_eq!(
        theta.len(),
        grad.len(),
        "parameter and gradient lengths differ"
    );
    assert_eq!(
        theta.len(),
        state.m.len(),
        "optimizer state has the wrong length"
    );
    state.step += 1;
    let bc1 = 1.0 - cfg.beta1.powi(state.step as i32);
    let bc2 = 1.0 - cfg.beta2.powi(state.step as i32);
    for i in 0..theta.len() {
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grad[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        let m_hat = state.m[i] / bc1;
        let v_hat = state.v[i] / bc2;
        theta[i] -= cfg.lr * m_hat / (v_hat.sqrt() + cfg.eps);
    }
}

/// Moves the running average towards `theta`, if averaging is enabled.
pub fn update_average(state: &mut AdamState, theta: &[f64]) {
    let rate = state.average_rate;
    if let Some(avg) = &mut state.average {
        for (a, t) in avg.iter_mut().zip(theta) {
            *a += rate * (t - *a);
        }
    }
}
