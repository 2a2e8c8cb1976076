//! Synthetic brain-to-feature task: `target = tanh(W_subject · s) + noise`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BrainSignal, FeatureGrid};
use crate::rng::{RandomStream, Seed};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TaskConfig {
    /// Signal length `L_s`, shared by all subjects.
    pub signal_len: usize,
    pub tokens: usize,
    pub dim: usize,
    pub subjects: usize,
    pub samples_per_subject: usize,
    /// Rank of the shared output basis `G`.
    pub latent: usize,
    pub noise_std: f64,
}

impl Default for TaskConfig {
    fn default() -> Self {
        TaskConfig {
            signal_len: 32,
            tokens: 16,
            dim: 8,
            subjects: 2,
            samples_per_subject: 256,
            latent: 8,
            noise_std: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub signal: BrainSignal,
    pub target: FeatureGrid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticTask {
    pub config: TaskConfig,
    pub samples: Vec<Sample>,
}

impl SyntheticTask {
    pub fn subject_ids(&self) -> Vec<String> {
        (0..self.config.subjects).map(subject_id).collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

pub fn subject_id(k: usize) -> String {
    format!("subj{:02}", k + 1)
}

/// `W_subject = G · A_subject` with each row scaled to unit norm, so every
/// pre-activation is `N(0, 1)` for `s ~ N(0, I)`.
fn subject_map(g: &[f64], cfg: &TaskConfig, rng: &mut RandomStream) -> Vec<f64> {
    let (out, k, l) = (cfg.tokens * cfg.dim, cfg.latent, cfg.signal_len);
    let a = rng.normals(k * l);
    let mut w = vec![0.0; out * l];
    for r in 0..out {
        let row = &mut w[r * l..(r + 1) * l];
        for j in 0..k {
            let gj = g[r * k + j];
            for (x, aj) in row.iter_mut().zip(&a[j * l..(j + 1) * l]) {
                *x += gj * aj;
            }
        }
        let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            row.iter_mut().for_each(|x| *x /= norm);
        }
    }
    w
}

pub fn make_synthetic_task(seed: Seed, config: &TaskConfig) -> Result<SyntheticTask> {
    for (field, v) in [
        ("signal_len", config.signal_len),
        ("tokens", config.tokens),
        ("dim", config.dim),
        ("subjects", config.subjects),
        ("latent", config.latent),
    ] {
        if v == 0 {
            return Err(Error::validation(field, "must be positive"));
        }
    }
    if !(config.noise_std >= 0.0 && config.noise_std.is_finite()) {
        return Err(Error::validation("noise_std", "must be finite and non-negative"));
    }
    let root = RandomStream::new(seed);
    let mut maps_rng = root.substream("task.maps");
    let mut data_rng = root.substream("task.data");
    let out = config.tokens * config.dim;
    let l = config.signal_len;
    let g = maps_rng.normals(out * config.latent);
    let mut samples = Vec::with_capacity(config.subjects * config.samples_per_subject);
    for k in 0..config.subjects {
        let w = subject_map(&g, config, &mut maps_rng);
        for _ in 0..config.samples_per_subject {
            let s = data_rng.normals(l);
            let target: Vec<f64> = (0..out)
                .map(|r| {
                    let z: f64 = w[r * l..(r + 1) * l].iter().zip(&s).map(|(a, b)| a * b).sum();
                    z.tanh() + config.noise_std * data_rng.normal()
                })
                .collect();
            samples.push(Sample {
                signal: BrainSignal::new(subject_id(k), s)?,
                target: FeatureGrid::from_tokens(config.tokens, config.dim, target)?,
            });
        }
    }
    Ok(SyntheticTask {
        config: config.clone(),
        samples,
    })
}

/// `sqrt(E[tanh²(Z)] + σ²)` for `Z ~ N(0, 1)`, by Simpson's rule.
pub fn generator_target_std(noise_std: f64) -> f64 {
    let (lo, hi, n) = (-12.0f64, 12.0f64, 4800usize);
    let h = (hi - lo) / n as f64;
    let f = |z: f64| z.tanh().powi(2) * (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut acc = f(lo) + f(hi);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + i as f64 * h);
    }
    (acc * h / 3.0 + noise_std * noise_std).sqrt()
}
