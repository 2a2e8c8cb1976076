//! Random token masks with an exact masked count.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomStream;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenMask {
    flags: Vec<bool>,
}

impl TokenMask {
    pub fn from_flags(flags: Vec<bool>) -> Self {
        TokenMask { flags }
    }

    pub fn all(n_tokens: usize) -> Self {
        TokenMask {
            flags: vec![true; n_tokens],
        }
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn is_masked(&self, i: usize) -> bool {
        self.flags[i]
    }

    pub fn n_masked(&self) -> usize {
        self.flags.iter().filter(|f| **f).count()
    }

    pub fn ratio(&self) -> f64 {
        if self.flags.is_empty() {
            0.0
        } else {
            self.n_masked() as f64 / self.flags.len() as f64
        }
    }
}

/// `round(ratio·n)`, raised to one so the masked loss is always defined.
pub fn masked_count(n_tokens: usize, ratio: f64) -> usize {
    let k = (ratio * n_tokens as f64).round() as usize;
    k.clamp(1, n_tokens.max(1))
}

/// Uniform subset of exactly `round(ratio·n)` tokens via partial
/// Fisher-Yates.
pub fn sample_mask(n_tokens: usize, ratio: f64, rng: &mut RandomStream) -> Result<TokenMask> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::validation("mask_ratio", format!("{ratio} is not in (0, 1)")));
    }
    if n_tokens == 0 {
        return Err(Error::validation("n_tokens", "cannot mask an empty token set"));
    }
    let k = masked_count(n_tokens, ratio);
    let mut idx: Vec<usize> = (0..n_tokens).collect();
    for i in 0..k {
        let j = i + rng.below(n_tokens - i);
        idx.swap(i, j);
    }
    let mut flags = vec![false; n_tokens];
    for &i in &idx[..k] {
        flags[i] = true;
    }
    Ok(TokenMask { flags })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Seed;

    #[test]
    fn exact_count_and_determinism() {
        let mut a = RandomStream::new(Seed(3));
        let mut b = RandomStream::new(Seed(3));
        let m = sample_mask(576, 0.5, &mut a).unwrap();
        assert_eq!(m.n_masked(), 288);
        assert_eq!(m, sample_mask(576, 0.5, &mut b).unwrap());
        assert_eq!(sample_mask(10, 0.25, &mut a).unwrap().n_masked(), 3);
        assert!(sample_mask(10, 0.0, &mut a).is_err());
        assert!(sample_mask(10, 1.0, &mut a).is_err());
    }
}
