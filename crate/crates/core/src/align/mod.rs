//! Brain-to-feature alignment: regression plus masked denoising, with
//! hand-derived gradients and a seeded training loop.

pub mod denoiser;
pub mod encoder;
pub mod gradcheck;
pub mod loss;
pub mod mask;
pub mod nn;
pub mod optim;
pub mod params;
pub mod schedule;
pub mod task;
pub mod train;

pub use denoiser::{denoiser_forward, Conditioning, DenoiserConfig, DenoiserParams, MaskMode};
pub use encoder::{brain_encoder_forward, BrainEncoderParams, EncoderConfig};
pub use mask::{sample_mask, TokenMask};
pub use params::{Init, ParamSet, SegId, Segment};
pub use schedule::{corrupt, cosine_schedule, NoiseSchedule};
pub use loss::{loss_denoise, loss_regression, total_loss};
pub use optim::{adamw_step, one_cycle_lr, AdamWConfig, AdamWState};
pub use task::{make_synthetic_task, SyntheticTask, TaskConfig};
pub use train::{train, TrainConfig, TrainHistory, TrainOutcome};
