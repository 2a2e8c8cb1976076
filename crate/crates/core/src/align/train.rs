//! Seeded training loop for `L_R + β·L_D` with AdamW and one-cycle LR.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{RandomStream, Seed};

use super::denoiser::{Conditioning, DenoiserConfig, DenoiserParams, MaskMode};
use super::encoder::{BrainEncoderParams, EncoderConfig};
use super::loss::add_squared_error_grad;
use super::mask::{sample_mask, TokenMask};
use super::optim::{adamw_step, one_cycle_lr, AdamWConfig, AdamWState};
use super::schedule::{corrupt_values, cosine_schedule, NoiseSchedule};
use super::task::{Sample, SyntheticTask, TaskConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub seed: u64,
    pub steps: usize,
    pub batch_size: usize,
    /// Weight of the masked denoising loss.
    pub beta: f64,
    pub lr_max: f64,
    pub adamw: AdamWConfig,
    pub mask_ratio: f64,
    /// Masks drawn per step; `L_D` is their mean.
    pub masks_per_step: usize,
    pub diffusion_steps: usize,
    pub encoder_hidden: usize,
    pub encoder_bias: bool,
    pub denoiser_depth: usize,
    pub denoiser_width: usize,
    pub time_features: usize,
    pub conditioning: Conditioning,
    pub mask_mode: MaskMode,
    pub task: TaskConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            seed: 0,
            steps: 2000,
            batch_size: 16,
            beta: 1.0,
            lr_max: 3e-4,
            adamw: AdamWConfig::default(),
            mask_ratio: 0.5,
            masks_per_step: 1,
            diffusion_steps: 1000,
            encoder_hidden: 64,
            encoder_bias: true,
            denoiser_depth: 1,
            denoiser_width: 64,
            time_features: 32,
            conditioning: Conditioning::default(),
            mask_mode: MaskMode::default(),
            task: TaskConfig::default(),
        }
    }
}

impl TrainConfig {
    /// Full-size denoiser (depth 1, width 1024).
    pub fn full_width() -> Self {
        TrainConfig {
            denoiser_width: 1024,
            ..TrainConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::validation("beta", "must be finite and non-negative"));
        }
        if !(self.lr_max > 0.0 && self.lr_max.is_finite()) {
            return Err(Error::validation("lr_max", "must be positive"));
        }
        if !(self.mask_ratio > 0.0 && self.mask_ratio < 1.0) {
            return Err(Error::validation("mask_ratio", "must lie in (0, 1)"));
        }
        for (field, v) in [
            ("batch_size", self.batch_size),
            ("masks_per_step", self.masks_per_step),
            ("diffusion_steps", self.diffusion_steps),
            ("encoder_hidden", self.encoder_hidden),
            ("denoiser_width", self.denoiser_width),
            ("time_features", self.time_features),
        ] {
            if v == 0 {
                return Err(Error::validation(field, "must be positive"));
            }
        }
        Ok(())
    }

    pub fn encoder_config(&self, task: &SyntheticTask) -> EncoderConfig {
        EncoderConfig {
            subjects: task
                .subject_ids()
                .into_iter()
                .map(|s| (s, task.config.signal_len))
                .collect(),
            hidden: self.encoder_hidden,
            tokens: task.config.tokens,
            dim: task.config.dim,
            bias: self.encoder_bias,
        }
    }

    pub fn denoiser_config(&self, task: &SyntheticTask) -> DenoiserConfig {
        DenoiserConfig {
            tokens: task.config.tokens,
            dim: task.config.dim,
            depth: self.denoiser_depth,
            width: self.denoiser_width,
            time_features: self.time_features,
            conditioning: self.conditioning,
            mask_mode: self.mask_mode,
        }
    }
}

/// Per-sample randomness of the denoising branch.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseDraw {
    pub t: usize,
    pub eps: Vec<f64>,
}

/// Everything random about one optimization step, fixed up front.
#[derive(Debug, Clone, PartialEq)]
pub struct StepInputs<'a> {
    pub samples: Vec<&'a Sample>,
    pub draws: Vec<NoiseDraw>,
    pub masks: Vec<TokenMask>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossEval {
    pub loss_regression: f64,
    pub loss_denoise: Option<f64>,
    pub total: f64,
    pub encoder_grad: Vec<f64>,
    pub denoiser_grad: Vec<f64>,
}

/// Forward and analytic backward of `L_R + β·L_D` on one step's inputs.
/// With `β = 0` the denoiser is never evaluated.
pub fn loss_and_grad(
    encoder: &BrainEncoderParams,
    denoiser: &DenoiserParams,
    schedule: &NoiseSchedule,
    inputs: &StepInputs,
    beta: f64,
) -> Result<LossEval> {
    evaluate(encoder, denoiser, schedule, inputs, beta, true)
}

/// Loss only; the gradient buffers of the result are empty.
pub fn loss_value(
    encoder: &BrainEncoderParams,
    denoiser: &DenoiserParams,
    schedule: &NoiseSchedule,
    inputs: &StepInputs,
    beta: f64,
) -> Result<LossEval> {
    evaluate(encoder, denoiser, schedule, inputs, beta, false)
}

fn evaluate(
    encoder: &BrainEncoderParams,
    denoiser: &DenoiserParams,
    schedule: &NoiseSchedule,
    inputs: &StepInputs,
    beta: f64,
    want_grad: bool,
) -> Result<LossEval> {
    let bsz = inputs.samples.len();
    if bsz == 0 {
        return Err(Error::EmptyCorpus("empty batch".into()));
    }
    let dim = encoder.config().dim;
    let per_sample = encoder.config().tokens * dim;
    let n_reg = (bsz * per_sample) as f64;
    let use_denoiser = beta > 0.0;
    let n_den = if use_denoiser {
        if inputs.draws.len() != bsz || inputs.masks.is_empty() {
            return Err(Error::shape("denoising branch needs one draw per sample and a mask"));
        }
        let masked: usize = inputs.masks.iter().map(TokenMask::n_masked).sum();
        if masked == 0 {
            return Err(Error::DegenerateMask);
        }
        (bsz * masked * dim) as f64
    } else {
        0.0
    };

    let (mut encoder_grad, mut denoiser_grad) = if want_grad {
        (encoder.params.zeros_like(), denoiser.params.zeros_like())
    } else {
        (Vec::new(), Vec::new())
    };
    let (mut sum_r, mut sum_d) = (0.0, 0.0);
    for (k, sample) in inputs.samples.iter().enumerate() {
        let cache = encoder.forward_cached(&sample.signal)?;
        let b = &cache.output;
        let v = sample.target.data();
        sum_r += b.iter().zip(v).map(|(x, y)| (x - y).powi(2)).sum::<f64>();
        let mut d_b = vec![0.0; per_sample];
        if want_grad {
            add_squared_error_grad(b, v, None, 1.0 / n_reg, &mut d_b);
        }
        if use_denoiser {
            let draw = &inputs.draws[k];
            let v_t = corrupt_values(v, &draw.eps, schedule.alpha_bar(draw.t));
            for mask in &inputs.masks {
                let dc = denoiser.forward_cached(&v_t, b, draw.t, mask)?;
                let eps_hat = &dc.output;
                sum_d += (0..mask.len())
                    .filter(|&i| mask.is_masked(i))
                    .flat_map(|i| i * dim..(i + 1) * dim)
                    .map(|j| (eps_hat[j] - draw.eps[j]).powi(2))
                    .sum::<f64>();
                if !want_grad {
                    continue;
                }
                let mut d_eps_hat = vec![0.0; per_sample];
                add_squared_error_grad(eps_hat, &draw.eps, Some((mask, dim)), beta / n_den, &mut d_eps_hat);
                let d_b_den = denoiser.backward(&dc, &d_eps_hat, &mut denoiser_grad);
                for (g, x) in d_b.iter_mut().zip(&d_b_den) {
                    *g += x;
                }
            }
        }
        if want_grad {
            encoder.backward(&cache, &d_b, &mut encoder_grad);
        }
    }
    let loss_regression = sum_r / n_reg;
    let loss_denoise = use_denoiser.then(|| sum_d / n_den);
    Ok(LossEval {
        loss_regression,
        loss_denoise,
        total: loss_regression + beta * loss_denoise.unwrap_or(0.0),
        encoder_grad,
        denoiser_grad,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub lr: f64,
    pub loss_regression: f64,
    /// Absent when `β = 0`.
    pub loss_denoise: Option<f64>,
    pub total: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub records: Vec<StepRecord>,
}

/// Population variance of the last `ceil(fraction · n)` values.
pub fn late_window_variance(values: &[f64], fraction: f64) -> Option<f64> {
    let k = ((values.len() as f64) * fraction).ceil() as usize;
    if k == 0 || values.is_empty() {
        return None;
    }
    let w = &values[values.len() - k.min(values.len())..];
    let mean = w.iter().sum::<f64>() / w.len() as f64;
    Some(w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / w.len() as f64)
}

fn window_mean(values: &[f64], fraction: f64) -> Option<f64> {
    let k = ((values.len() as f64) * fraction).ceil() as usize;
    if k == 0 {
        return None;
    }
    let w = &values[values.len() - k.min(values.len())..];
    Some(w.iter().sum::<f64>() / w.len() as f64)
}

pub const LATE_WINDOW: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistorySummary {
    pub steps: usize,
    pub initial_loss_regression: Option<f64>,
    pub final_loss_regression: Option<f64>,
    /// Mean `L_R` over the late window.
    pub late_loss_regression: Option<f64>,
    pub late_total_variance: Option<f64>,
    pub late_regression_variance: Option<f64>,
}

impl TrainHistory {
    pub fn totals(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.total).collect()
    }

    pub fn regression(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.loss_regression).collect()
    }

    pub fn summary(&self) -> HistorySummary {
        let reg = self.regression();
        HistorySummary {
            steps: self.records.len(),
            initial_loss_regression: reg.first().copied(),
            final_loss_regression: reg.last().copied(),
            late_loss_regression: window_mean(&reg, LATE_WINDOW),
            late_total_variance: late_window_variance(&self.totals(), LATE_WINDOW),
            late_regression_variance: late_window_variance(&reg, LATE_WINDOW),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub history: TrainHistory,
    pub encoder: BrainEncoderParams,
    pub denoiser: DenoiserParams,
}

/// Stateful trainer; randomness for batches, timesteps, noise and masks
/// comes from separate substreams so `β` does not perturb batch order.
#[derive(Debug, Clone)]
pub struct Trainer<'a> {
    task: &'a SyntheticTask,
    config: TrainConfig,
    schedule: NoiseSchedule,
    pub encoder: BrainEncoderParams,
    pub denoiser: DenoiserParams,
    enc_state: AdamWState,
    den_state: AdamWState,
    batch_rng: RandomStream,
    time_rng: RandomStream,
    noise_rng: RandomStream,
    mask_rng: RandomStream,
    step: usize,
}

impl<'a> Trainer<'a> {
    pub fn new(task: &'a SyntheticTask, config: &TrainConfig) -> Result<Self> {
        config.validate()?;
        if task.is_empty() {
            return Err(Error::EmptyCorpus("synthetic task has no samples".into()));
        }
        let root = RandomStream::new(Seed(config.seed));
        let encoder = BrainEncoderParams::new(config.encoder_config(task), &mut root.substream("init.encoder"))?;
        let denoiser = DenoiserParams::new(config.denoiser_config(task), &mut root.substream("init.denoiser"))?;
        Ok(Trainer {
            task,
            config: config.clone(),
            schedule: cosine_schedule(config.diffusion_steps)?,
            enc_state: AdamWState::new(encoder.params.len()),
            den_state: AdamWState::new(denoiser.params.len()),
            encoder,
            denoiser,
            batch_rng: root.substream("train.batch"),
            time_rng: root.substream("train.timestep"),
            noise_rng: root.substream("train.noise"),
            mask_rng: root.substream("train.mask"),
            step: 0,
        })
    }

    fn draw_inputs(&mut self) -> Result<StepInputs<'a>> {
        let task = self.task;
        let samples: Vec<&Sample> = (0..self.config.batch_size)
            .map(|_| &task.samples[self.batch_rng.below(task.len())])
            .collect();
        let (mut draws, mut masks) = (Vec::new(), Vec::new());
        if self.config.beta > 0.0 {
            let n = task.config.tokens * task.config.dim;
            for _ in 0..samples.len() {
                draws.push(NoiseDraw {
                    t: self.time_rng.range_inclusive(1, self.schedule.steps()),
                    eps: self.noise_rng.normals(n),
                });
            }
            for _ in 0..self.config.masks_per_step {
                masks.push(sample_mask(task.config.tokens, self.config.mask_ratio, &mut self.mask_rng)?);
            }
        }
        Ok(StepInputs { samples, draws, masks })
    }

    pub fn step(&mut self) -> Result<StepRecord> {
        let inputs = self.draw_inputs()?;
        let eval = loss_and_grad(&self.encoder, &self.denoiser, &self.schedule, &inputs, self.config.beta)?;
        let step = self.step;
        if !eval.total.is_finite() {
            return Err(Error::Divergence {
                step,
                reason: format!("total loss is {}", eval.total),
            });
        }
        let grads_finite = eval.encoder_grad.iter().chain(&eval.denoiser_grad).all(|g| g.is_finite());
        if !grads_finite {
            return Err(Error::Divergence {
                step,
                reason: "non-finite gradient".into(),
            });
        }
        let lr = one_cycle_lr(step, self.config.steps, self.config.lr_max);
        adamw_step(
            self.encoder.params.data_mut(),
            &eval.encoder_grad,
            &mut self.enc_state,
            lr,
            &self.config.adamw,
        )?;
        if self.config.beta > 0.0 {
            adamw_step(
                self.denoiser.params.data_mut(),
                &eval.denoiser_grad,
                &mut self.den_state,
                lr,
                &self.config.adamw,
            )?;
        }
        self.step += 1;
        Ok(StepRecord {
            step,
            lr,
            loss_regression: eval.loss_regression,
            loss_denoise: eval.loss_denoise,
            total: eval.total,
        })
    }
}

pub fn train(task: &SyntheticTask, config: &TrainConfig) -> Result<TrainOutcome> {
    let mut trainer = Trainer::new(task, config)?;
    let mut history = TrainHistory::default();
    for _ in 0..config.steps {
        let rec = trainer.step()?;
        log::debug!(
            "step {} lr {:.3e} L_R {:.5} total {:.5}",
            rec.step,
            rec.lr,
            rec.loss_regression,
            rec.total
        );
        history.records.push(rec);
    }
    Ok(TrainOutcome {
        history,
        encoder: trainer.encoder,
        denoiser: trainer.denoiser,
    })
}

/// One row of the denoiser ablation table: `β`, depth `d`, width `w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AblationSetting {
    pub name: &'static str,
    pub beta: f64,
    pub depth: usize,
    pub width: usize,
}

pub const ABLATION_SETTINGS: [AblationSetting; 8] = [
    AblationSetting { name: "S0", beta: 0.0, depth: 1, width: 1024 },
    AblationSetting { name: "S1", beta: 1.0, depth: 1, width: 512 },
    AblationSetting { name: "S2", beta: 1.0, depth: 2, width: 1024 },
    AblationSetting { name: "S3", beta: 1.0, depth: 3, width: 1024 },
    AblationSetting { name: "S4", beta: 1.0, depth: 1, width: 1024 },
    AblationSetting { name: "S5", beta: 0.5, depth: 3, width: 1024 },
    AblationSetting { name: "S6", beta: 1.5, depth: 3, width: 1024 },
    AblationSetting { name: "S7", beta: 2.0, depth: 3, width: 1024 },
];

impl AblationSetting {
    pub fn apply(&self, base: &TrainConfig) -> TrainConfig {
        TrainConfig {
            beta: self.beta,
            denoiser_depth: self.depth,
            denoiser_width: self.width,
            ..base.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityRun {
    pub seed: u64,
    pub beta: f64,
    pub summary: HistorySummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub runs: Vec<StabilityRun>,
    /// Seeds where the denoising run has strictly lower late-window
    /// total-loss variance than the regression-only run.
    pub wins: usize,
    pub seeds: usize,
}

/// Paired runs at `β = 0` and `β = beta` for each seed; the task is shared,
/// the seed drives initialization and sampling.
pub fn stability_ablation(
    task: &SyntheticTask,
    base: &TrainConfig,
    seeds: &[u64],
    beta: f64,
) -> Result<StabilityReport> {
    let mut runs = Vec::new();
    let mut wins = 0;
    for &seed in seeds {
        let mut pair = Vec::new();
        for b in [0.0, beta] {
            let cfg = TrainConfig {
                seed,
                beta: b,
                ..base.clone()
            };
            let summary = train(task, &cfg)?.history.summary();
            pair.push(summary.late_total_variance);
            runs.push(StabilityRun { seed, beta: b, summary });
        }
        if let [Some(v0), Some(v1)] = pair[..] {
            if v1 < v0 {
                wins += 1;
            }
        }
    }
    Ok(StabilityReport {
        runs,
        wins,
        seeds: seeds.len(),
    })
}
