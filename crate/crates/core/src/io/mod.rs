//! File formats, configuration and report emission.

pub mod config;
pub mod embeddings;
pub mod jsonl;
pub mod lexicon;
pub mod report;
pub mod tensor;

pub use config::{load_train_config, resolve_seed, SEED_ENV};
pub use embeddings::{load_embedding_table, parse_embedding_table, write_embedding_table};
pub use jsonl::{load_jsonl, parse_jsonl, CaptionPair, QaResponse, Record, Schema};
pub use lexicon::{load_lexicon, parse_lexicon, LoadedLexicon};
pub use report::{sha256_hex, EvalReport, InputDigest};
pub use tensor::{read_tensor, read_tensor_bytes, write_tensor, write_tensor_bytes, TENSOR_MAGIC};

use std::path::Path;

use crate::error::{Error, Result};

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

pub(crate) fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}
