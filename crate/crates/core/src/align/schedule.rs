//! Cosine noise schedule and forward corruption.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::FeatureGrid;

pub const COSINE_OFFSET: f64 = 0.008;
pub const ALPHA_BAR_MIN: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSchedule {
    alpha_bar: Vec<f64>,
}

impl NoiseSchedule {
    /// Number of diffusion steps `T`; valid timesteps are `0..=T`.
    pub fn steps(&self) -> usize {
        self.alpha_bar.len() - 1
    }

    pub fn alpha_bar(&self, t: usize) -> f64 {
        self.alpha_bar[t]
    }

    pub fn alpha_bars(&self) -> &[f64] {
        &self.alpha_bar
    }

    fn check(&self, t: usize) -> Result<()> {
        if t > self.steps() {
            return Err(Error::validation(
                "t",
                format!("timestep {t} outside 0..={}", self.steps()),
            ));
        }
        Ok(())
    }
}

/// `ᾱ_t = f(t)/f(0)` with `f(t) = cos²(((t/T + s)/(1 + s))·π/2)`, clamped
/// to `[1e-5, 1]`. Strictly decreasing above the floor; `f(T) = 0`, so the
/// last few steps sit on it.
pub fn cosine_schedule(steps: usize) -> Result<NoiseSchedule> {
    if steps == 0 {
        return Err(Error::validation("steps", "schedule needs at least one step"));
    }
    let f = |t: usize| {
        let x = (t as f64 / steps as f64 + COSINE_OFFSET) / (1.0 + COSINE_OFFSET);
        (x * std::f64::consts::FRAC_PI_2).cos().powi(2)
    };
    let f0 = f(0);
    let alpha_bar = (0..=steps)
        .map(|t| (f(t) / f0).clamp(ALPHA_BAR_MIN, 1.0))
        .collect();
    Ok(NoiseSchedule { alpha_bar })
}

/// `√ᾱ_t · v + √(1−ᾱ_t) · eps`, element-wise on raw buffers.
pub fn corrupt_values(v: &[f64], eps: &[f64], alpha_bar: f64) -> Vec<f64> {
    let (a, b) = (alpha_bar.sqrt(), (1.0 - alpha_bar).sqrt());
    v.iter().zip(eps).map(|(x, e)| a * x + b * e).collect()
}

pub fn corrupt(
    v: &FeatureGrid,
    t: usize,
    eps: &FeatureGrid,
    schedule: &NoiseSchedule,
) -> Result<FeatureGrid> {
    if !v.same_shape(eps) {
        return Err(Error::shape(format!(
            "noise grid {}×{}×{} does not match features {}×{}×{}",
            eps.height(),
            eps.width(),
            eps.dim(),
            v.height(),
            v.width(),
            v.dim()
        )));
    }
    schedule.check(t)?;
    FeatureGrid::new(
        v.height(),
        v.width(),
        v.dim(),
        corrupt_values(v.data(), eps.data(), schedule.alpha_bar(t)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_endpoints_and_order() {
        let s = cosine_schedule(1000).unwrap();
        assert!((s.alpha_bar(0) - 1.0).abs() < 1e-9);
        assert!(s.alpha_bars().windows(2).all(|w| w[1] <= w[0]));
        // strict above the clamp floor; f(T) = 0 so the tail sits on the floor
        assert!(s
            .alpha_bars()
            .windows(2)
            .filter(|w| w[1] > ALPHA_BAR_MIN)
            .all(|w| w[1] < w[0]));
        assert_eq!(s.alpha_bar(1000), ALPHA_BAR_MIN);
        assert!(s.alpha_bars().iter().all(|&a| a > 0.0 && a <= 1.0));
        assert!(cosine_schedule(0).is_err());
        let s1 = cosine_schedule(1).unwrap();
        assert_eq!(s1.steps(), 1);
        assert!(s1.alpha_bar(1) < s1.alpha_bar(0));
    }

    #[test]
    fn corrupt_edge_cases() {
        let s = cosine_schedule(100).unwrap();
        let v = FeatureGrid::new(1, 2, 1, vec![1.0, -2.0]).unwrap();
        let eps = FeatureGrid::new(1, 2, 1, vec![0.5, 0.5]).unwrap();
        assert_eq!(corrupt(&v, 0, &eps, &s).unwrap(), v);
        let zero = FeatureGrid::zeros(1, 2, 1);
        let out = corrupt(&v, 40, &zero, &s).unwrap();
        let a = s.alpha_bar(40).sqrt();
        assert_eq!(out.data(), &[a, -2.0 * a]);
        assert!(corrupt(&v, 101, &eps, &s).is_err());
        assert!(corrupt(&v, 1, &FeatureGrid::zeros(2, 1, 1), &s).is_err());
    }
}
