//! Training configuration files and seed precedence.

use std::path::Path;

use crate::align::TrainConfig;
use crate::error::{Error, Result};

use super::read_to_string;

/// Overrides the configured seed; an explicit `--seed` flag wins over it.
pub const SEED_ENV: &str = "VINDEX_SEED";

/// Flag, then environment, then config.
pub fn resolve_seed(config_seed: u64, env: Option<&str>, flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match env {
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::validation(SEED_ENV, format!("`{v}` is not an unsigned 64-bit integer"))),
        None => Ok(config_seed),
    }
}

/// JSON object with any subset of the training fields; missing fields take
/// their defaults and unknown fields are rejected.
pub fn parse_train_config(text: &str) -> Result<TrainConfig> {
    let cfg: TrainConfig = serde_json::from_str(text).map_err(|e| Error::format(Some(e.line()), e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_train_config(path: Option<&Path>) -> Result<TrainConfig> {
    match path {
        Some(p) => parse_train_config(&read_to_string(p)?),
        None => Ok(TrainConfig::default()),
    }
}
