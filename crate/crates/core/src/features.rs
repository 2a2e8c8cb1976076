//! Feature-space transforms over token grids: single encoder, mixture of
//! encoders (interleave), aggregated layers and nested pooled levels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::FeatureGrid;

/// Mean of each 2×2 block with stride 2.
pub fn avg_pool_2x2(grid: &FeatureGrid) -> Result<FeatureGrid> {
    let (h, w, d) = (grid.height(), grid.width(), grid.dim());
    if h % 2 != 0 || w % 2 != 0 || h == 0 || w == 0 {
        return Err(Error::shape(format!("2×2 pooling needs even sides, got {h}×{w}")));
    }
    let (oh, ow) = (h / 2, w / 2);
    let mut out = vec![0.0; oh * ow * d];
    for r in 0..oh {
        for c in 0..ow {
            let dst = &mut out[(r * ow + c) * d..(r * ow + c + 1) * d];
            for (dr, dc) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                for (o, v) in dst.iter_mut().zip(grid.at(2 * r + dr, 2 * c + dc)) {
                    *o += v;
                }
            }
            dst.iter_mut().for_each(|o| *o *= 0.25);
        }
    }
    FeatureGrid::new(oh, ow, d, out)
}

/// Mean of all nine tokens of a 3×3 grid.
pub fn pool_3x3_to_one(grid: &FeatureGrid) -> Result<FeatureGrid> {
    if grid.height() != 3 || grid.width() != 3 {
        return Err(Error::shape(format!(
            "3×3 pooling needs a 3×3 grid, got {}×{}",
            grid.height(),
            grid.width()
        )));
    }
    let d = grid.dim();
    let mut out = vec![0.0; d];
    for t in 0..9 {
        for (o, v) in out.iter_mut().zip(grid.token(t)) {
            *o += v;
        }
    }
    out.iter_mut().for_each(|o| *o /= 9.0);
    FeatureGrid::new(1, 1, d, out)
}

/// Coarse-to-fine pyramid, stored finest first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NestedFeatures {
    levels: Vec<FeatureGrid>,
}

impl NestedFeatures {
    pub fn levels(&self) -> &[FeatureGrid] {
        &self.levels
    }

    pub fn token_counts(&self) -> Vec<usize> {
        self.levels.iter().map(FeatureGrid::n_tokens).collect()
    }

    pub fn level_with_tokens(&self, n_tokens: usize) -> Option<&FeatureGrid> {
        self.levels.iter().find(|l| l.n_tokens() == n_tokens)
    }
}

/// Halves the grid until it reaches 3×3 (then pools to one token) or 1×1.
///
/// Accepted sides are 3·2^k and 2^k; a 24×24 grid gives 576/144/36/9/1.
pub fn nested_sequence(grid: &FeatureGrid) -> Result<NestedFeatures> {
    let (h, w) = (grid.height(), grid.width());
    if h != w {
        return Err(Error::shape(format!("nested pooling needs a square grid, got {h}×{w}")));
    }
    let mut side = h;
    while side > 1 && side % 2 == 0 {
        side /= 2;
    }
    if side != 3 && side != 1 {
        return Err(Error::shape(format!(
            "side {h} does not reduce to 3 or 1 by halving"
        )));
    }
    let mut levels = vec![grid.clone()];
    loop {
        let last = levels.last().expect("nonempty");
        let next = match last.height() {
            1 => break,
            3 => pool_3x3_to_one(last)?,
            _ => avg_pool_2x2(last)?,
        };
        levels.push(next);
    }
    Ok(NestedFeatures { levels })
}

/// The pooled level of a grid with exactly `n_tokens` tokens.
pub fn select_nf_level(grid: &FeatureGrid, n_tokens: usize) -> Result<FeatureGrid> {
    let nested = nested_sequence(grid)?;
    nested.level_with_tokens(n_tokens).cloned().ok_or_else(|| {
        Error::shape(format!(
            "no nested level with {n_tokens} tokens; available {:?}",
            nested.token_counts()
        ))
    })
}

/// Encoder layers of identical shape, final layer last.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerStack {
    layers: Vec<FeatureGrid>,
}

impl LayerStack {
    pub fn new(layers: Vec<FeatureGrid>) -> Result<Self> {
        if layers.len() < 2 {
            return Err(Error::shape(format!(
                "a layer stack needs at least 2 layers, got {}",
                layers.len()
            )));
        }
        if let Some((i, _)) = layers.iter().enumerate().find(|(_, l)| !l.same_shape(&layers[0])) {
            return Err(Error::shape(format!("layer {i} differs in shape from layer 0")));
        }
        Ok(LayerStack { layers })
    }

    pub fn layers(&self) -> &[FeatureGrid] {
        &self.layers
    }

    pub fn final_layer(&self) -> &FeatureGrid {
        self.layers.last().expect("at least two layers")
    }
}

/// Contiguous groups over the non-final layers, sizes differing by at most
/// one with larger groups first.
fn group_bounds(n_layers: usize, n_groups: usize) -> Vec<(usize, usize)> {
    let (base, extra) = (n_layers / n_groups, n_layers % n_groups);
    let mut start = 0;
    (0..n_groups)
        .map(|g| {
            let len = base + usize::from(g < extra);
            let b = (start, start + len);
            start += len;
            b
        })
        .collect()
}

/// Per-group element-wise means of the non-final layers, concatenated
/// channel-wise with the final layer. Output dim is `(n_groups + 1)·D`.
pub fn aggregate_layers(stack: &LayerStack, n_groups: usize) -> Result<FeatureGrid> {
    let inner = &stack.layers[..stack.layers.len() - 1];
    if n_groups == 0 || inner.len() < n_groups {
        return Err(Error::shape(format!(
            "{} non-final layers cannot form {n_groups} groups",
            inner.len()
        )));
    }
    let last = stack.final_layer();
    let (h, w, d) = (last.height(), last.width(), last.dim());
    let out_d = (n_groups + 1) * d;
    let mut out = vec![0.0; h * w * out_d];
    for (g, (lo, hi)) in group_bounds(inner.len(), n_groups).into_iter().enumerate() {
        let scale = 1.0 / (hi - lo) as f64;
        for layer in &inner[lo..hi] {
            for t in 0..h * w {
                let dst = &mut out[t * out_d + g * d..t * out_d + (g + 1) * d];
                for (o, v) in dst.iter_mut().zip(layer.token(t)) {
                    *o += v * scale;
                }
            }
        }
    }
    for t in 0..h * w {
        out[t * out_d + n_groups * d..(t + 1) * out_d].copy_from_slice(last.token(t));
    }
    FeatureGrid::new(h, w, out_d, out)
}

/// Alternates tokens of two equally sized grids: `out[2i] = a[i]`,
/// `out[2i+1] = b[i]`. The result is a 1×2N sequence.
pub fn interleave(a: &FeatureGrid, b: &FeatureGrid) -> Result<FeatureGrid> {
    if a.n_tokens() != b.n_tokens() || a.dim() != b.dim() {
        return Err(Error::shape(format!(
            "cannot interleave {}×{} with {}×{} (tokens×dim)",
            a.n_tokens(),
            a.dim(),
            b.n_tokens(),
            b.dim()
        )));
    }
    let mut out = Vec::with_capacity(a.data().len() * 2);
    for i in 0..a.n_tokens() {
        out.extend_from_slice(a.token(i));
        out.extend_from_slice(b.token(i));
    }
    FeatureGrid::from_tokens(2 * a.n_tokens(), a.dim(), out)
}

/// Splits an interleaved sequence by token parity.
pub fn deinterleave(seq: &FeatureGrid) -> Result<(FeatureGrid, FeatureGrid)> {
    let n = seq.n_tokens();
    if n % 2 != 0 {
        return Err(Error::shape(format!("odd token count {n} cannot be de-interleaved")));
    }
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for i in 0..n {
        let dst = if i % 2 == 0 { &mut a } else { &mut b };
        dst.extend_from_slice(seq.token(i));
    }
    Ok((
        FeatureGrid::from_tokens(n / 2, seq.dim(), a)?,
        FeatureGrid::from_tokens(n / 2, seq.dim(), b)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSpace {
    /// Final layer of one encoder.
    Se,
    /// Interleaved final layers of two encoders.
    Me,
    /// Aggregated multi-layer feature.
    Af,
    /// One level of the nested pyramid.
    Nf,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(h: usize, w: usize, d: usize) -> FeatureGrid {
        let n = h * w * d;
        FeatureGrid::new(h, w, d, (0..n).map(|i| ((i * 37) % 101) as f64 * 0.1 - 3.0).collect()).unwrap()
    }

    #[test]
    fn pool_examples() {
        let g = FeatureGrid::new(2, 2, 1, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(avg_pool_2x2(&g).unwrap().data(), &[2.5]);
        let c = FeatureGrid::filled(4, 6, 3, 1.25);
        assert_eq!(avg_pool_2x2(&c).unwrap(), FeatureGrid::filled(2, 3, 3, 1.25));
        assert!(avg_pool_2x2(&FeatureGrid::zeros(3, 2, 1)).is_err());
        let g = FeatureGrid::new(3, 3, 1, (1..=9).map(f64::from).collect()).unwrap();
        assert_eq!(pool_3x3_to_one(&g).unwrap().data(), &[5.0]);
        assert!(pool_3x3_to_one(&FeatureGrid::zeros(2, 2, 1)).is_err());
    }

    #[test]
    fn nested_counts() {
        let n = nested_sequence(&ramp(24, 24, 2)).unwrap();
        assert_eq!(n.token_counts(), vec![576, 144, 36, 9, 1]);
        let n = nested_sequence(&ramp(16, 16, 1)).unwrap();
        assert_eq!(n.token_counts(), vec![256, 64, 16, 4, 1]);
        assert!(nested_sequence(&ramp(10, 10, 1)).is_err());
        assert!(nested_sequence(&ramp(24, 12, 1)).is_err());
        assert_eq!(select_nf_level(&ramp(24, 24, 1), 9).unwrap().n_tokens(), 9);
        assert!(select_nf_level(&ramp(24, 24, 1), 10).is_err());
    }

    #[test]
    fn aggregate_hand_values() {
        let l = |v: f64| FeatureGrid::filled(1, 1, 1, v);
        let stack = LayerStack::new(vec![l(1.0), l(3.0), l(5.0), l(7.0), l(9.0)]).unwrap();
        let out = aggregate_layers(&stack, 2).unwrap();
        assert_eq!(out.data(), &[2.0, 6.0, 9.0]);
        assert!(aggregate_layers(&stack, 5).is_err());
        assert!(LayerStack::new(vec![l(1.0)]).is_err());
    }

    #[test]
    fn aggregate_uneven_groups() {
        let l = |v: f64| FeatureGrid::filled(1, 1, 1, v);
        let stack = LayerStack::new(vec![l(1.0), l(2.0), l(3.0), l(4.0), l(5.0), l(0.0)]).unwrap();
        // groups {1,2,3} and {4,5}
        assert_eq!(aggregate_layers(&stack, 2).unwrap().data(), &[2.0, 4.5, 0.0]);
    }

    #[test]
    fn interleave_round_trip() {
        let a = FeatureGrid::from_tokens(2, 1, vec![1.0, 2.0]).unwrap();
        let b = FeatureGrid::from_tokens(2, 1, vec![10.0, 20.0]).unwrap();
        let s = interleave(&a, &b).unwrap();
        assert_eq!(s.data(), &[1.0, 10.0, 2.0, 20.0]);
        assert_eq!(deinterleave(&s).unwrap(), (a.clone(), b));
        assert!(interleave(&a, &FeatureGrid::zeros(1, 3, 1)).is_err());
    }
}
