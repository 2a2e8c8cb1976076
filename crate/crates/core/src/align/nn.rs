//! Dense layers, layer normalization and SiLU with hand-written backward
//! passes. Activations are row-major `rows × features` buffers.

use crate::rng::RandomStream;

use super::params::{Init, ParamSet, SegId};

pub const LN_EPS: f64 = 1e-5;

/// `y = x Wᵀ + b` with `W` stored `n_out × n_in`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linear {
    pub w: SegId,
    pub b: Option<SegId>,
    pub n_in: usize,
    pub n_out: usize,
}

impl Linear {
    pub fn new(
        ps: &mut ParamSet,
        name: &str,
        n_in: usize,
        n_out: usize,
        bias: bool,
        init: Init,
        rng: &mut RandomStream,
    ) -> Self {
        let w = ps.add(format!("{name}.weight"), n_out, n_in, init, rng);
        let b = bias.then(|| ps.add(format!("{name}.bias"), 1, n_out, Init::Zeros, rng));
        Linear { w, b, n_in, n_out }
    }

    /// LeCun-normal initialization.
    pub fn lecun(n_in: usize) -> Init {
        Init::Normal(1.0 / (n_in as f64).sqrt())
    }

    pub fn forward(&self, ps: &ParamSet, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len() % self.n_in, 0);
        let rows = x.len() / self.n_in;
        let w = ps.get(self.w);
        let mut y = vec![0.0; rows * self.n_out];
        for r in 0..rows {
            let xr = &x[r * self.n_in..(r + 1) * self.n_in];
            let yr = &mut y[r * self.n_out..(r + 1) * self.n_out];
            for (o, yo) in yr.iter_mut().enumerate() {
                let wo = &w[o * self.n_in..(o + 1) * self.n_in];
                *yo = dot(wo, xr);
            }
            if let Some(b) = self.b {
                for (yo, bo) in yr.iter_mut().zip(ps.get(b)) {
                    *yo += bo;
                }
            }
        }
        y
    }

    /// Accumulates parameter gradients into `grad` and returns `dL/dx`.
    pub fn backward(&self, ps: &ParamSet, x: &[f64], dy: &[f64], grad: &mut [f64]) -> Vec<f64> {
        let rows = x.len() / self.n_in;
        debug_assert_eq!(dy.len(), rows * self.n_out);
        let w = ps.get(self.w);
        let mut dx = vec![0.0; x.len()];
        {
            let gw = ps.grad_of(self.w, grad);
            for r in 0..rows {
                let xr = &x[r * self.n_in..(r + 1) * self.n_in];
                let dyr = &dy[r * self.n_out..(r + 1) * self.n_out];
                let dxr = &mut dx[r * self.n_in..(r + 1) * self.n_in];
                for (o, &g) in dyr.iter().enumerate() {
                    if g == 0.0 {
                        continue;
                    }
                    let wo = &w[o * self.n_in..(o + 1) * self.n_in];
                    let gwo = &mut gw[o * self.n_in..(o + 1) * self.n_in];
                    for i in 0..self.n_in {
                        gwo[i] += g * xr[i];
                        dxr[i] += g * wo[i];
                    }
                }
            }
        }
        if let Some(b) = self.b {
            let gb = ps.grad_of(b, grad);
            for r in 0..rows {
                for (gbo, g) in gb.iter_mut().zip(&dy[r * self.n_out..(r + 1) * self.n_out]) {
                    *gbo += g;
                }
            }
        }
        dx
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

pub fn silu(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| v * sigmoid(v)).collect()
}

/// `dL/dx` given the pre-activation `x` and `dL/dy`.
pub fn silu_backward(x: &[f64], dy: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(dy)
        .map(|(&v, &g)| {
            let s = sigmoid(v);
            g * s * (1.0 + v * (1.0 - s))
        })
        .collect()
}

/// Per-row layer normalization with learnable gain and bias.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerNorm {
    pub gain: SegId,
    pub bias: SegId,
    pub width: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerNormCache {
    pub x_hat: Vec<f64>,
    pub rstd: Vec<f64>,
}

impl LayerNorm {
    pub fn new(ps: &mut ParamSet, name: &str, width: usize, rng: &mut RandomStream) -> Self {
        let gain = ps.add(format!("{name}.gain"), 1, width, Init::Constant(1.0), rng);
        let bias = ps.add(format!("{name}.bias"), 1, width, Init::Zeros, rng);
        LayerNorm { gain, bias, width }
    }

    pub fn forward(&self, ps: &ParamSet, x: &[f64]) -> (Vec<f64>, LayerNormCache) {
        let n = self.width;
        let rows = x.len() / n;
        let (g, b) = (ps.get(self.gain), ps.get(self.bias));
        let mut y = vec![0.0; x.len()];
        let mut x_hat = vec![0.0; x.len()];
        let mut rstd = vec![0.0; rows];
        for r in 0..rows {
            let xr = &x[r * n..(r + 1) * n];
            let mean = xr.iter().sum::<f64>() / n as f64;
            let var = xr.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
            let rs = 1.0 / (var + LN_EPS).sqrt();
            rstd[r] = rs;
            for i in 0..n {
                let h = (xr[i] - mean) * rs;
                x_hat[r * n + i] = h;
                y[r * n + i] = g[i] * h + b[i];
            }
        }
        (y, LayerNormCache { x_hat, rstd })
    }

    pub fn backward(
        &self,
        ps: &ParamSet,
        cache: &LayerNormCache,
        dy: &[f64],
        grad: &mut [f64],
    ) -> Vec<f64> {
        let n = self.width;
        let rows = dy.len() / n;
        let g = ps.get(self.gain);
        {
            let gg = ps.grad_of(self.gain, grad);
            for r in 0..rows {
                for i in 0..n {
                    gg[i] += dy[r * n + i] * cache.x_hat[r * n + i];
                }
            }
        }
        {
            let gb = ps.grad_of(self.bias, grad);
            for r in 0..rows {
                for i in 0..n {
                    gb[i] += dy[r * n + i];
                }
            }
        }
        let mut dx = vec![0.0; dy.len()];
        for r in 0..rows {
            let xh = &cache.x_hat[r * n..(r + 1) * n];
            let dxh: Vec<f64> = (0..n).map(|i| dy[r * n + i] * g[i]).collect();
            let mean_dxh = dxh.iter().sum::<f64>() / n as f64;
            let mean_dxh_xh = dxh.iter().zip(xh).map(|(a, b)| a * b).sum::<f64>() / n as f64;
            for i in 0..n {
                dx[r * n + i] = cache.rstd[r] * (dxh[i] - mean_dxh - xh[i] * mean_dxh_xh);
            }
        }
        dx
    }
}

/// Sinusoidal features of a scalar position: pairs of `sin`, `cos` with
/// geometrically spaced frequencies.
pub fn sinusoidal(position: f64, dim: usize) -> Vec<f64> {
    let half = dim.div_ceil(2).max(1);
    (0..dim)
        .map(|j| {
            let k = j / 2;
            let freq = (-(10_000f64.ln()) * k as f64 / half as f64).exp();
            if j % 2 == 0 {
                (position * freq).sin()
            } else {
                (position * freq).cos()
            }
        })
        .collect()
}

pub fn add_assign(dst: &mut [f64], src: &[f64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}
