//! Regression and masked-denoising losses with their gradients.

use crate::error::{Error, Result};
use crate::model::FeatureGrid;

use super::mask::TokenMask;

fn check_len(a: &[f64], b: &[f64], what: &str) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::shape(format!("{what}: lengths {} and {}", a.len(), b.len())));
    }
    Ok(())
}

/// Mean squared error over all elements.
pub fn mse(a: &[f64], b: &[f64]) -> Result<f64> {
    check_len(a, b, "mse")?;
    if a.is_empty() {
        return Err(Error::shape("mse of empty buffers"));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64)
}

pub fn loss_regression(b: &FeatureGrid, v: &FeatureGrid) -> Result<f64> {
    if !b.same_shape(v) {
        return Err(Error::shape("prediction and target differ in shape"));
    }
    mse(b.data(), v.data())
}

/// Mean of `(eps_hat − eps)²` over masked tokens only; `dim` values per token.
pub fn masked_mse(eps_hat: &[f64], eps: &[f64], mask: &TokenMask, dim: usize) -> Result<f64> {
    check_len(eps_hat, eps, "masked mse")?;
    if eps.len() != mask.len() * dim {
        return Err(Error::shape(format!(
            "mask covers {} tokens of {dim}, buffer has {} values",
            mask.len(),
            eps.len()
        )));
    }
    let k = mask.n_masked();
    if k == 0 {
        return Err(Error::DegenerateMask);
    }
    let sum: f64 = (0..mask.len())
        .filter(|&i| mask.is_masked(i))
        .flat_map(|i| i * dim..(i + 1) * dim)
        .map(|j| (eps_hat[j] - eps[j]).powi(2))
        .sum();
    Ok(sum / (k * dim) as f64)
}

pub fn loss_denoise(eps_hat: &FeatureGrid, eps: &FeatureGrid, mask: &TokenMask) -> Result<f64> {
    if !eps_hat.same_shape(eps) {
        return Err(Error::shape("predicted and true noise differ in shape"));
    }
    if mask.len() != eps.n_tokens() {
        return Err(Error::shape(format!(
            "mask has {} flags for {} tokens",
            mask.len(),
            eps.n_tokens()
        )));
    }
    masked_mse(eps_hat.data(), eps.data(), mask, eps.dim())
}

pub fn total_loss(l_r: f64, l_d: f64, beta: f64) -> f64 {
    l_r + beta * l_d
}

/// Adds `scale · 2(a − b)` element-wise into `out`, restricted to masked
/// tokens when a mask is given.
pub fn add_squared_error_grad(
    a: &[f64],
    b: &[f64],
    mask: Option<(&TokenMask, usize)>,
    scale: f64,
    out: &mut [f64],
) {
    match mask {
        None => {
            for ((o, x), y) in out.iter_mut().zip(a).zip(b) {
                *o += scale * 2.0 * (x - y);
            }
        }
        Some((m, dim)) => {
            for i in (0..m.len()).filter(|&i| m.is_masked(i)) {
                for j in i * dim..(i + 1) * dim {
                    out[j] += scale * 2.0 * (a[j] - b[j]);
                }
            }
        }
    }
}
