//! Residual-MLP noise predictor conditioned on brain features and timestep
//! through layer-norm modulation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::FeatureGrid;
use crate::rng::RandomStream;

use super::mask::TokenMask;
use super::nn::{add_assign, silu, silu_backward, sinusoidal, LayerNorm, LayerNormCache, Linear};
use super::params::{Init, ParamSet, SegId};

/// How the brain prediction enters the conditioning vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Conditioning {
    /// Token mean of `b`, one conditioning vector per sample.
    #[default]
    Pooled,
    /// Each token is conditioned on its own row of `b`.
    PerToken,
}

/// What the denoiser sees at each token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MaskMode {
    /// Masked tokens are replaced by the mask vector plus positional
    /// embedding; unmasked tokens pass `v_t` through.
    #[default]
    Replace,
    /// Every token keeps `v_t`; masked tokens additionally receive the
    /// positional embedding.
    KeepVisible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenoiserConfig {
    pub tokens: usize,
    pub dim: usize,
    pub depth: usize,
    pub width: usize,
    pub time_features: usize,
    pub conditioning: Conditioning,
    pub mask_mode: MaskMode,
}

#[derive(Debug, Clone, PartialEq)]
struct Block {
    norm: LayerNorm,
    modulation: Linear,
    fc1: Linear,
    fc2: Linear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenoiserParams {
    config: DenoiserConfig,
    pub params: ParamSet,
    mask_token: SegId,
    in_proj: Linear,
    time_proj: Linear,
    cond_proj: Linear,
    blocks: Vec<Block>,
    out_proj: Linear,
    positions: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
struct BlockCache {
    h_in: Vec<f64>,
    norm: LayerNormCache,
    normed: Vec<f64>,
    modulation: Vec<f64>,
    z: Vec<f64>,
    a1: Vec<f64>,
    s1: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenoiserCache {
    masked: Vec<bool>,
    x0: Vec<f64>,
    time_feat: Vec<f64>,
    cond_in: Vec<f64>,
    c: Vec<f64>,
    sc: Vec<f64>,
    blocks: Vec<BlockCache>,
    h_out: Vec<f64>,
    pub output: Vec<f64>,
}

impl DenoiserParams {
    /// Blocks start as the identity: the second layer of each block and the
    /// modulation projections are zero.
    pub fn new(config: DenoiserConfig, rng: &mut RandomStream) -> Result<Self> {
        for (field, v) in [
            ("tokens", config.tokens),
            ("dim", config.dim),
            ("width", config.width),
            ("time_features", config.time_features),
        ] {
            if v == 0 {
                return Err(Error::validation(field, "must be positive"));
            }
        }
        let (d, w) = (config.dim, config.width);
        let mut ps = ParamSet::new();
        let mask_token = ps.add("mask_token", 1, d, Init::Normal(0.02), rng);
        let in_proj = Linear::new(&mut ps, "in_proj", d, w, true, Linear::lecun(d), rng);
        let tf = config.time_features;
        let time_proj = Linear::new(&mut ps, "time_proj", tf, w, true, Linear::lecun(tf), rng);
        let cond_proj = Linear::new(&mut ps, "cond_proj", d, w, true, Linear::lecun(d), rng);
        let blocks = (0..config.depth)
            .map(|k| Block {
                norm: LayerNorm::new(&mut ps, &format!("block.{k}.norm"), w, rng),
                modulation: Linear::new(&mut ps, &format!("block.{k}.modulation"), w, 2 * w, true, Init::Zeros, rng),
                fc1: Linear::new(&mut ps, &format!("block.{k}.fc1"), w, w, true, Linear::lecun(w), rng),
                fc2: Linear::new(&mut ps, &format!("block.{k}.fc2"), w, w, true, Init::Zeros, rng),
            })
            .collect();
        let out_proj = Linear::new(&mut ps, "out_proj", w, d, true, Linear::lecun(w), rng);
        let positions = (0..config.tokens)
            .flat_map(|i| sinusoidal(i as f64, d))
            .collect();
        Ok(DenoiserParams {
            config,
            params: ps,
            mask_token,
            in_proj,
            time_proj,
            cond_proj,
            blocks,
            out_proj,
            positions,
        })
    }

    pub fn config(&self) -> &DenoiserConfig {
        &self.config
    }

    /// Replaces every parameter with an independent `N(0, std²)` draw.
    pub fn randomize(&mut self, std: f64, rng: &mut RandomStream) {
        for p in self.params.data_mut() {
            *p = std * rng.normal();
        }
    }

    fn n_cond_rows(&self) -> usize {
        match self.config.conditioning {
            Conditioning::Pooled => 1,
            Conditioning::PerToken => self.config.tokens,
        }
    }

    /// Input token features after masking.
    pub fn masked_input(&self, v_t: &[f64], mask: &TokenMask) -> Vec<f64> {
        let d = self.config.dim;
        let mask_token = self.params.get(self.mask_token);
        let mut x0 = v_t.to_vec();
        for i in 0..self.config.tokens {
            if !mask.is_masked(i) {
                continue;
            }
            let row = &mut x0[i * d..(i + 1) * d];
            let pos = &self.positions[i * d..(i + 1) * d];
            match self.config.mask_mode {
                MaskMode::Replace => {
                    for ((x, m), p) in row.iter_mut().zip(mask_token).zip(pos) {
                        *x = m + p;
                    }
                }
                MaskMode::KeepVisible => add_assign(row, pos),
            }
        }
        x0
    }

    pub fn forward_cached(&self, v_t: &[f64], b: &[f64], t: usize, mask: &TokenMask) -> Result<DenoiserCache> {
        let (n, d, w) = (self.config.tokens, self.config.dim, self.config.width);
        if v_t.len() != n * d || b.len() != n * d || mask.len() != n {
            return Err(Error::shape(format!(
                "denoiser expects {n} tokens × {d} dims; got v_t {}, b {}, mask {}",
                v_t.len(),
                b.len(),
                mask.len()
            )));
        }
        let ps = &self.params;
        let x0 = self.masked_input(v_t, mask);
        let mut h = self.in_proj.forward(ps, &x0);

        let time_feat = sinusoidal(t as f64, self.config.time_features);
        let temb = self.time_proj.forward(ps, &time_feat);
        let cond_in = match self.config.conditioning {
            Conditioning::Pooled => {
                let mut m = vec![0.0; d];
                for i in 0..n {
                    add_assign(&mut m, &b[i * d..(i + 1) * d]);
                }
                m.iter_mut().for_each(|x| *x /= n as f64);
                m
            }
            Conditioning::PerToken => b.to_vec(),
        };
        let mut c = self.cond_proj.forward(ps, &cond_in);
        for row in c.chunks_mut(w) {
            add_assign(row, &temb);
        }
        let sc = silu(&c);
        let rows = self.n_cond_rows();

        let mut blocks = Vec::with_capacity(self.blocks.len());
        for blk in &self.blocks {
            let modulation = blk.modulation.forward(ps, &sc);
            let (normed, norm) = blk.norm.forward(ps, &h);
            let mut z = vec![0.0; n * w];
            for i in 0..n {
                let r = if rows == 1 { 0 } else { i };
                let (scale, shift) = modulation[r * 2 * w..(r + 1) * 2 * w].split_at(w);
                for j in 0..w {
                    z[i * w + j] = normed[i * w + j] * (1.0 + scale[j]) + shift[j];
                }
            }
            let a1 = blk.fc1.forward(ps, &z);
            let s1 = silu(&a1);
            let a2 = blk.fc2.forward(ps, &s1);
            let h_in = h.clone();
            add_assign(&mut h, &a2);
            blocks.push(BlockCache {
                h_in,
                norm,
                normed,
                modulation,
                z,
                a1,
                s1,
            });
        }
        let output = self.out_proj.forward(ps, &h);
        Ok(DenoiserCache {
            masked: mask.flags().to_vec(),
            x0,
            time_feat,
            cond_in,
            c,
            sc,
            blocks,
            h_out: h,
            output,
        })
    }

    pub fn forward(&self, v_t: &FeatureGrid, b: &FeatureGrid, t: usize, mask: &TokenMask) -> Result<FeatureGrid> {
        if !v_t.same_shape(b) {
            return Err(Error::shape("v_t and b differ in shape"));
        }
        let cache = self.forward_cached(v_t.data(), b.data(), t, mask)?;
        FeatureGrid::new(v_t.height(), v_t.width(), v_t.dim(), cache.output)
    }

    /// Accumulates `dL/dθ` into `grad` and returns `dL/db`.
    pub fn backward(&self, cache: &DenoiserCache, d_out: &[f64], grad: &mut [f64]) -> Vec<f64> {
        let (n, d, w) = (self.config.tokens, self.config.dim, self.config.width);
        let ps = &self.params;
        let rows = self.n_cond_rows();
        let mut dh = self.out_proj.backward(ps, &cache.h_out, d_out, grad);
        let mut dsc = vec![0.0; rows * w];
        for (blk, bc) in self.blocks.iter().zip(&cache.blocks).rev() {
            let ds1 = blk.fc2.backward(ps, &bc.s1, &dh, grad);
            let da1 = silu_backward(&bc.a1, &ds1);
            let dz = blk.fc1.backward(ps, &bc.z, &da1, grad);
            let mut dnormed = vec![0.0; n * w];
            let mut dmod = vec![0.0; rows * 2 * w];
            for i in 0..n {
                let r = if rows == 1 { 0 } else { i };
                let scale = &bc.modulation[r * 2 * w..r * 2 * w + w];
                for j in 0..w {
                    let g = dz[i * w + j];
                    dnormed[i * w + j] = g * (1.0 + scale[j]);
                    dmod[r * 2 * w + j] += g * bc.normed[i * w + j];
                    dmod[r * 2 * w + w + j] += g;
                }
            }
            let dsc_k = blk.modulation.backward(ps, &cache.sc, &dmod, grad);
            add_assign(&mut dsc, &dsc_k);
            let dh_norm = blk.norm.backward(ps, &bc.norm, &dnormed, grad);
            add_assign(&mut dh, &dh_norm);
            debug_assert_eq!(bc.h_in.len(), dh.len());
        }
        let dx0 = self.in_proj.backward(ps, &cache.x0, &dh, grad);
        if self.config.mask_mode == MaskMode::Replace {
            let gm = ps.grad_of(self.mask_token, grad);
            for i in (0..n).filter(|&i| cache.masked[i]) {
                add_assign(gm, &dx0[i * d..(i + 1) * d]);
            }
        }
        let dc = silu_backward(&cache.c, &dsc);
        let mut dtemb = vec![0.0; w];
        for row in dc.chunks(w) {
            add_assign(&mut dtemb, row);
        }
        self.time_proj.backward(ps, &cache.time_feat, &dtemb, grad);
        let dcond = self.cond_proj.backward(ps, &cache.cond_in, &dc, grad);
        match self.config.conditioning {
            Conditioning::Pooled => (0..n)
                .flat_map(|_| dcond.iter().map(|g| g / n as f64))
                .collect(),
            Conditioning::PerToken => dcond,
        }
    }
}

pub fn denoiser_forward(
    v_t: &FeatureGrid,
    b: &FeatureGrid,
    t: usize,
    mask: &TokenMask,
    params: &DenoiserParams,
) -> Result<FeatureGrid> {
    params.forward(v_t, b, t, mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::mask::sample_mask;
    use crate::rng::Seed;

    fn config(conditioning: Conditioning, mask_mode: MaskMode) -> DenoiserConfig {
        DenoiserConfig {
            tokens: 6,
            dim: 4,
            depth: 2,
            width: 8,
            time_features: 6,
            conditioning,
            mask_mode,
        }
    }

    #[test]
    fn identity_blocks_with_zero_condition() {
        let mut rng = RandomStream::new(Seed(2));
        let den = DenoiserParams::new(config(Conditioning::Pooled, MaskMode::Replace), &mut rng).unwrap();
        let v: Vec<f64> = rng.normals(24);
        let b = vec![0.0; 24];
        let mask = sample_mask(6, 0.5, &mut rng).unwrap();
        let out = den.forward_cached(&v, &b, 10, &mask).unwrap().output;
        let x0 = den.masked_input(&v, &mask);
        let expected = den.out_proj.forward(&den.params, &den.in_proj.forward(&den.params, &x0));
        for (a, e) in out.iter().zip(&expected) {
            assert!((a - e).abs() < 1e-12);
        }
    }

    #[test]
    fn condition_reaches_masked_tokens() {
        for cond in [Conditioning::Pooled, Conditioning::PerToken] {
            let mut rng = RandomStream::new(Seed(4));
            let mut den = DenoiserParams::new(config(cond, MaskMode::Replace), &mut rng).unwrap();
            den.randomize(0.5, &mut rng);
            let v = rng.normals(24);
            let b = rng.normals(24);
            let mut b2 = b.clone();
            b2.iter_mut().for_each(|x| *x += 0.3);
            let mask = sample_mask(6, 0.5, &mut rng).unwrap();
            let o1 = den.forward_cached(&v, &b, 7, &mask).unwrap().output;
            let o2 = den.forward_cached(&v, &b2, 7, &mask).unwrap().output;
            assert_eq!(o1.len(), 24);
            let changed = (0..6).filter(|&i| mask.is_masked(i)).any(|i| {
                (0..4).any(|k| (o1[i * 4 + k] - o2[i * 4 + k]).abs() > 1e-9)
            });
            assert!(changed);
        }
    }

    #[test]
    fn replace_mode_hides_masked_values() {
        let mut rng = RandomStream::new(Seed(5));
        let den = DenoiserParams::new(config(Conditioning::Pooled, MaskMode::Replace), &mut rng).unwrap();
        let mask = TokenMask::from_flags(vec![true, false, true, false, false, false]);
        let v = rng.normals(24);
        let mut v2 = v.clone();
        v2[0] += 5.0;
        assert_eq!(den.masked_input(&v, &mask), den.masked_input(&v2, &mask));
        let kv = DenoiserParams::new(config(Conditioning::Pooled, MaskMode::KeepVisible), &mut rng).unwrap();
        assert_ne!(kv.masked_input(&v, &mask), kv.masked_input(&v2, &mask));
    }

    #[test]
    fn shape_errors() {
        let mut rng = RandomStream::new(Seed(6));
        let den = DenoiserParams::new(config(Conditioning::Pooled, MaskMode::Replace), &mut rng).unwrap();
        let mask = TokenMask::all(6);
        assert!(den.forward_cached(&[0.0; 23], &[0.0; 24], 1, &mask).is_err());
        assert!(den.forward_cached(&[0.0; 24], &[0.0; 24], 1, &TokenMask::all(5)).is_err());
    }
}
