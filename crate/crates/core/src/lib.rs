//! Multi-granularity evaluation of brain-decoded captions, grounding and
//! salient QA, plus the masked-denoising feature alignment trainer.

pub mod align;
pub mod caption;
pub mod error;
pub mod features;
pub mod grounding;
pub mod io;
pub mod matching;
pub mod model;
pub mod rng;
pub mod sqa;

pub use error::{Error, Result};
pub use model::{BBox, BrainSignal, FeatureGrid};
pub use rng::{rng_new, RandomStream, Seed};
