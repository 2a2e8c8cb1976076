//! Brain encoder: per-subject linear adapter, shared two-layer SiLU trunk
//! and a linear head onto the `tokens × dim` feature grid.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BrainSignal, FeatureGrid};
use crate::rng::RandomStream;

use super::nn::{silu, silu_backward, Linear};
use super::params::ParamSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderConfig {
    /// Registered subjects and their signal lengths.
    pub subjects: BTreeMap<String, usize>,
    pub hidden: usize,
    pub tokens: usize,
    pub dim: usize,
    pub bias: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrainEncoderParams {
    config: EncoderConfig,
    pub params: ParamSet,
    adapters: BTreeMap<String, Linear>,
    trunk: [Linear; 2],
    head: Linear,
}

/// Activations kept for the backward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderCache {
    subject: String,
    input: Vec<f64>,
    adapted: Vec<f64>,
    pre1: Vec<f64>,
    act1: Vec<f64>,
    pre2: Vec<f64>,
    act2: Vec<f64>,
    pub output: Vec<f64>,
}

impl BrainEncoderParams {
    pub fn new(config: EncoderConfig, rng: &mut RandomStream) -> Result<Self> {
        if config.subjects.is_empty() {
            return Err(Error::validation("subjects", "at least one subject is required"));
        }
        for (field, v) in [("hidden", config.hidden), ("tokens", config.tokens), ("dim", config.dim)] {
            if v == 0 {
                return Err(Error::validation(field, "must be positive"));
            }
        }
        if let Some((s, _)) = config.subjects.iter().find(|(_, &n)| n == 0) {
            return Err(Error::validation(format!("subjects.{s}"), "signal length must be positive"));
        }
        let mut params = ParamSet::new();
        let h = config.hidden;
        let adapters = config
            .subjects
            .iter()
            .map(|(s, &n)| {
                let l = Linear::new(&mut params, &format!("adapter.{s}"), n, h, config.bias, Linear::lecun(n), rng);
                (s.clone(), l)
            })
            .collect();
        let trunk = [
            Linear::new(&mut params, "trunk.0", h, h, config.bias, Linear::lecun(h), rng),
            Linear::new(&mut params, "trunk.1", h, h, config.bias, Linear::lecun(h), rng),
        ];
        let out = config.tokens * config.dim;
        let head = Linear::new(&mut params, "head", h, out, config.bias, Linear::lecun(h), rng);
        Ok(BrainEncoderParams {
            config,
            params,
            adapters,
            trunk,
            head,
        })
    }

    pub fn config(&self) -> &EncoderConfig {
        &self.config
    }

    pub fn subjects(&self) -> impl Iterator<Item = &str> {
        self.adapters.keys().map(String::as_str)
    }

    /// Overwrites every parameter with `value`.
    pub fn fill(&mut self, value: f64) {
        self.params.data_mut().iter_mut().for_each(|p| *p = value);
    }

    fn adapter(&self, s: &BrainSignal) -> Result<&Linear> {
        let a = self
            .adapters
            .get(s.subject_id())
            .ok_or_else(|| Error::UnknownSubject(s.subject_id().to_string()))?;
        if a.n_in != s.len() {
            return Err(Error::shape(format!(
                "subject {} expects {} values, signal has {}",
                s.subject_id(),
                a.n_in,
                s.len()
            )));
        }
        Ok(a)
    }

    pub fn forward_cached(&self, s: &BrainSignal) -> Result<EncoderCache> {
        let adapter = self.adapter(s)?;
        let input = s.values().to_vec();
        let adapted = adapter.forward(&self.params, &input);
        let pre1 = self.trunk[0].forward(&self.params, &adapted);
        let act1 = silu(&pre1);
        let pre2 = self.trunk[1].forward(&self.params, &act1);
        let act2 = silu(&pre2);
        let output = self.head.forward(&self.params, &act2);
        Ok(EncoderCache {
            subject: s.subject_id().to_string(),
            input,
            adapted,
            pre1,
            act1,
            pre2,
            act2,
            output,
        })
    }

    pub fn forward(&self, s: &BrainSignal) -> Result<FeatureGrid> {
        let cache = self.forward_cached(s)?;
        FeatureGrid::from_tokens(self.config.tokens, self.config.dim, cache.output)
    }

    /// Accumulates `dL/dθ` into `grad` given `dL/d output`.
    pub fn backward(&self, cache: &EncoderCache, d_out: &[f64], grad: &mut [f64]) {
        let ps = &self.params;
        let d_act2 = self.head.backward(ps, &cache.act2, d_out, grad);
        let d_pre2 = silu_backward(&cache.pre2, &d_act2);
        let d_act1 = self.trunk[1].backward(ps, &cache.act1, &d_pre2, grad);
        let d_pre1 = silu_backward(&cache.pre1, &d_act1);
        let d_adapted = self.trunk[0].backward(ps, &cache.adapted, &d_pre1, grad);
        let adapter = &self.adapters[&cache.subject];
        adapter.backward(ps, &cache.input, &d_adapted, grad);
    }
}

pub fn brain_encoder_forward(s: &BrainSignal, params: &BrainEncoderParams) -> Result<FeatureGrid> {
    params.forward(s)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Seed;

    fn config(bias: bool) -> EncoderConfig {
        EncoderConfig {
            subjects: [("s1".to_string(), 12), ("s2".to_string(), 12)].into(),
            hidden: 16,
            tokens: 256,
            dim: 64,
            bias,
        }
    }

    #[test]
    fn shape_and_zero_weights() {
        let mut rng = RandomStream::new(Seed(0));
        let mut enc = BrainEncoderParams::new(config(false), &mut rng).unwrap();
        let s = BrainSignal::new("s1", (0..12).map(|i| i as f64 * 0.1).collect()).unwrap();
        let out = enc.forward(&s).unwrap();
        assert_eq!((out.n_tokens(), out.dim()), (256, 64));
        enc.fill(0.0);
        assert!(enc.forward(&s).unwrap().data().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn subjects_have_distinct_adapters() {
        let mut rng = RandomStream::new(Seed(1));
        let enc = BrainEncoderParams::new(config(true), &mut rng).unwrap();
        let v: Vec<f64> = (0..12).map(|i| (i as f64).sin()).collect();
        let a = enc.forward(&BrainSignal::new("s1", v.clone()).unwrap()).unwrap();
        let b = enc.forward(&BrainSignal::new("s2", v.clone()).unwrap()).unwrap();
        assert_ne!(a, b);
        assert!(matches!(
            enc.forward(&BrainSignal::new("s9", v).unwrap()),
            Err(Error::UnknownSubject(_))
        ));
        assert!(enc.forward(&BrainSignal::new("s1", vec![1.0; 3]).unwrap()).is_err());
    }
}
