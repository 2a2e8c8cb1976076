//! Central finite-difference check of every encoder and denoiser parameter
//! against the analytic backward pass.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rng::{RandomStream, Seed};

use super::denoiser::{Conditioning, DenoiserParams, MaskMode};
use super::encoder::BrainEncoderParams;
use super::mask::sample_mask;
use super::params::ParamSet;
use super::schedule::{cosine_schedule, NoiseSchedule};
use super::task::{make_synthetic_task, TaskConfig};
use super::train::{loss_and_grad, loss_value, NoiseDraw, StepInputs, TrainConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GradcheckConfig {
    pub seed: u64,
    pub tokens: usize,
    pub dim: usize,
    pub depth: usize,
    pub width: usize,
    pub signal_len: usize,
    pub encoder_hidden: usize,
    pub time_features: usize,
    pub batch_size: usize,
    pub beta: f64,
    pub conditioning: Conditioning,
    pub mask_mode: MaskMode,
    /// Standard deviation of the random parameters under test.
    pub param_std: f64,
    pub step: f64,
    pub tolerance: f64,
    /// Denominator floor of the relative error.
    pub abs_floor: f64,
}

impl Default for GradcheckConfig {
    fn default() -> Self {
        GradcheckConfig {
            seed: 0,
            tokens: 16,
            dim: 8,
            depth: 1,
            width: 32,
            signal_len: 12,
            encoder_hidden: 16,
            time_features: 8,
            batch_size: 2,
            beta: 1.0,
            conditioning: Conditioning::default(),
            mask_mode: MaskMode::default(),
            param_std: 0.3,
            step: 1e-5,
            tolerance: 1e-4,
            abs_floor: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentCheck {
    pub model: String,
    pub name: String,
    pub n_params: usize,
    pub max_rel_error: f64,
    pub max_abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradcheckReport {
    pub n_params: usize,
    pub max_rel_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub segments: Vec<SegmentCheck>,
}

pub fn relative_error(analytic: f64, numeric: f64, floor: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(floor)
}

#[derive(Clone, Copy)]
enum Which {
    Encoder,
    Denoiser,
}

struct Fixture<'a> {
    encoder: BrainEncoderParams,
    denoiser: DenoiserParams,
    schedule: NoiseSchedule,
    inputs: StepInputs<'a>,
    beta: f64,
}

impl Fixture<'_> {
    fn loss(&self) -> Result<f64> {
        Ok(loss_value(&self.encoder, &self.denoiser, &self.schedule, &self.inputs, self.beta)?.total)
    }

    fn params_mut(&mut self, which: Which) -> &mut ParamSet {
        match which {
            Which::Encoder => &mut self.encoder.params,
            Which::Denoiser => &mut self.denoiser.params,
        }
    }

    fn check(&mut self, which: Which, analytic: &[f64], cfg: &GradcheckConfig) -> Result<Vec<SegmentCheck>> {
        let segments = self.params_mut(which).segments().to_vec();
        let model = match which {
            Which::Encoder => "encoder",
            Which::Denoiser => "denoiser",
        };
        let mut out = Vec::new();
        for seg in segments {
            let (mut max_rel, mut max_abs) = (0.0f64, 0.0f64);
            for i in seg.range() {
                let orig = self.params_mut(which).data()[i];
                self.params_mut(which).data_mut()[i] = orig + cfg.step;
                let plus = self.loss()?;
                self.params_mut(which).data_mut()[i] = orig - cfg.step;
                let minus = self.loss()?;
                self.params_mut(which).data_mut()[i] = orig;
                let numeric = (plus - minus) / (2.0 * cfg.step);
                max_abs = max_abs.max((analytic[i] - numeric).abs());
                max_rel = max_rel.max(relative_error(analytic[i], numeric, cfg.abs_floor));
            }
            out.push(SegmentCheck {
                model: model.to_string(),
                name: seg.name.clone(),
                n_params: seg.len(),
                max_rel_error: max_rel,
                max_abs_error: max_abs,
            });
        }
        Ok(out)
    }
}

pub fn run_gradcheck(cfg: &GradcheckConfig) -> Result<GradcheckReport> {
    let task_cfg = TaskConfig {
        signal_len: cfg.signal_len,
        tokens: cfg.tokens,
        dim: cfg.dim,
        subjects: 2,
        samples_per_subject: cfg.batch_size.max(1),
        latent: 4,
        noise_std: 0.05,
    };
    let task = make_synthetic_task(Seed(cfg.seed), &task_cfg)?;
    let train_cfg = TrainConfig {
        seed: cfg.seed,
        beta: cfg.beta,
        encoder_hidden: cfg.encoder_hidden,
        denoiser_depth: cfg.depth,
        denoiser_width: cfg.width,
        time_features: cfg.time_features,
        conditioning: cfg.conditioning,
        mask_mode: cfg.mask_mode,
        task: task_cfg.clone(),
        ..TrainConfig::default()
    };
    let root = RandomStream::new(Seed(cfg.seed));
    let mut rng = root.substream("gradcheck");
    let mut encoder = BrainEncoderParams::new(train_cfg.encoder_config(&task), &mut rng)?;
    for p in encoder.params.data_mut() {
        *p = cfg.param_std * rng.normal();
    }
    let mut denoiser = DenoiserParams::new(train_cfg.denoiser_config(&task), &mut rng)?;
    denoiser.randomize(cfg.param_std, &mut rng);
    let schedule = cosine_schedule(train_cfg.diffusion_steps)?;
    // one sample per subject, spread over the schedule
    let samples: Vec<_> = (0..cfg.batch_size)
        .map(|k| &task.samples[(k * task_cfg.samples_per_subject + k / 2) % task.len()])
        .collect();
    let draws = (0..samples.len())
        .map(|k| NoiseDraw {
            t: 1 + (k * 397 + 50) % schedule.steps(),
            eps: rng.normals(cfg.tokens * cfg.dim),
        })
        .collect();
    let masks = vec![sample_mask(cfg.tokens, train_cfg.mask_ratio, &mut rng)?];
    let mut fx = Fixture {
        encoder,
        denoiser,
        schedule,
        inputs: StepInputs { samples, draws, masks },
        beta: cfg.beta,
    };
    let eval = loss_and_grad(&fx.encoder, &fx.denoiser, &fx.schedule, &fx.inputs, fx.beta)?;
    let mut segments = fx.check(Which::Encoder, &eval.encoder_grad, cfg)?;
    if cfg.beta > 0.0 {
        segments.extend(fx.check(Which::Denoiser, &eval.denoiser_grad, cfg)?);
    }
    let max_rel_error = segments.iter().map(|s| s.max_rel_error).fold(0.0, f64::max);
    Ok(GradcheckReport {
        n_params: segments.iter().map(|s| s.n_params).sum(),
        max_rel_error,
        tolerance: cfg.tolerance,
        passed: max_rel_error < cfg.tolerance,
        segments,
    })
}
