//! AdamW with decoupled weight decay and the one-cycle learning-rate shape.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamWConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
}

impl Default for AdamWConfig {
    fn default() -> Self {
        AdamWConfig {
            beta1: 0.9,
            beta2: 0.95,
            eps: 1e-8,
            weight_decay: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamWState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub step: u64,
}

impl AdamWState {
    pub fn new(n: usize) -> Self {
        AdamWState {
            m: vec![0.0; n],
            v: vec![0.0; n],
            step: 0,
        }
    }
}

/// One update: decay `p ← p(1 − lr·wd)`, then the bias-corrected Adam step.
pub fn adamw_step(
    params: &mut [f64],
    grads: &[f64],
    state: &mut AdamWState,
    lr: f64,
    config: &AdamWConfig,
) -> Result<()> {
    if params.len() != grads.len() || state.m.len() != params.len() || state.v.len() != params.len() {
        return Err(Error::shape(format!(
            "adamw: {} params, {} grads, state {}",
            params.len(),
            grads.len(),
            state.m.len()
        )));
    }
    state.step += 1;
    let t = state.step as i32;
    let bc1 = 1.0 - config.beta1.powi(t);
    let bc2 = 1.0 - config.beta2.powi(t);
    let decay = 1.0 - lr * config.weight_decay;
    for i in 0..params.len() {
        let g = grads[i];
        params[i] *= decay;
        state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * g;
        state.v[i] = config.beta2 * state.v[i] + (1.0 - config.beta2) * g * g;
        let m_hat = state.m[i] / bc1;
        let v_hat = state.v[i] / bc2;
        params[i] -= lr * m_hat / (v_hat.sqrt() + config.eps);
    }
    Ok(())
}

pub const ONE_CYCLE_WARMUP: f64 = 0.3;
pub const ONE_CYCLE_DIV: f64 = 25.0;

/// Linear warmup from `lr_max/25` to `lr_max` over the first 30% of steps,
/// then cosine anneal back to `lr_max/25` at `total_steps`.
pub fn one_cycle_lr(step: usize, total_steps: usize, lr_max: f64) -> f64 {
    let lr_min = lr_max / ONE_CYCLE_DIV;
    if total_steps == 0 {
        return lr_min;
    }
    let s = step.min(total_steps) as f64;
    let warm = ONE_CYCLE_WARMUP * total_steps as f64;
    if s <= warm {
        let frac = if warm > 0.0 { s / warm } else { 1.0 };
        lr_min + (lr_max - lr_min) * frac
    } else {
        let frac = (s - warm) / (total_steps as f64 - warm);
        lr_min + (lr_max - lr_min) * 0.5 * (1.0 + (std::f64::consts::PI * frac).cos())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_grad_no_decay_is_noop() {
        let mut p = vec![0.5, -1.5];
        let mut st = AdamWState::new(2);
        let cfg = AdamWConfig {
            weight_decay: 0.0,
            ..AdamWConfig::default()
        };
        adamw_step(&mut p, &[0.0, 0.0], &mut st, 1e-2, &cfg).unwrap();
        assert_eq!(p, vec![0.5, -1.5]);
    }

    #[test]
    fn zero_grad_shrinks_by_decay() {
        let mut p = vec![2.0, -4.0];
        let mut st = AdamWState::new(2);
        adamw_step(&mut p, &[0.0, 0.0], &mut st, 0.1, &AdamWConfig::default()).unwrap();
        assert!((p[0] - 2.0 * (1.0 - 0.1 * 0.01)).abs() < 1e-15);
        assert!((p[1] + 4.0 * (1.0 - 0.1 * 0.01)).abs() < 1e-15);
    }

    #[test]
    fn one_cycle_shape() {
        assert!((one_cycle_lr(0, 1000, 3e-4) - 3e-4 / 25.0).abs() < 1e-18);
        assert!((one_cycle_lr(300, 1000, 3e-4) - 3e-4).abs() < 1e-18);
        assert!((one_cycle_lr(1000, 1000, 3e-4) - 3e-4 / 25.0).abs() < 1e-18);
    }
}
