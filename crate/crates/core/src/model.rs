//! Shared value types.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An `height × width` grid of `dim`-channel feature tokens, stored row-major
/// with channels innermost.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureGrid {
    height: usize,
    width: usize,
    dim: usize,
    data: Vec<f64>,
}

impl FeatureGrid {
    pub fn new(height: usize, width: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        let expected = height
            .checked_mul(width)
            .and_then(|n| n.checked_mul(dim))
            .ok_or_else(|| Error::shape("grid size overflows"))?;
        if data.len() != expected {
            return Err(Error::shape(format!(
                "grid {height}x{width}x{dim} needs {expected} values, got {}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::validation(
                "data",
                format!("non-finite value at index {i}"),
            ));
        }
        Ok(FeatureGrid {
            height,
            width,
            dim,
            data,
        })
    }

    pub fn zeros(height: usize, width: usize, dim: usize) -> Self {
        FeatureGrid {
            height,
            width,
            dim,
            data: vec![0.0; height * width * dim],
        }
    }

    pub fn filled(height: usize, width: usize, dim: usize, value: f64) -> Self {
        FeatureGrid {
            height,
            width,
            dim,
            data: vec![value; height * width * dim],
        }
    }

    /// Builds a grid from a token-major buffer (`tokens × dim`) laid out as a
    /// single row.
    pub fn from_tokens(tokens: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        Self::new(1, tokens, dim, data)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_tokens(&self) -> usize {
        self.height * self.width
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn same_shape(&self, other: &FeatureGrid) -> bool {
        self.height == other.height && self.width == other.width && self.dim == other.dim
    }

    pub fn token(&self, index: usize) -> &[f64] {
        &self.data[index * self.dim..(index + 1) * self.dim]
    }

    pub fn at(&self, row: usize, col: usize) -> &[f64] {
        self.token(row * self.width + col)
    }

    pub fn mean(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// Same data viewed as `tokens` rows of one token each (height 1).
    pub fn flattened(&self) -> FeatureGrid {
        FeatureGrid {
            height: 1,
            width: self.n_tokens(),
            dim: self.dim,
            data: self.data.clone(),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<FeatureGrid> {
        FeatureGrid::new(
            self.height,
            self.width,
            self.dim,
            self.data.iter().map(|&v| f(v)).collect(),
        )
    }
}

/// One brain response vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrainSignal {
    values: Vec<f64>,
    subject_id: String,
}

impl BrainSignal {
    pub fn new(subject_id: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::validation("values", "brain signal is empty"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("values", "non-finite voxel value"));
        }
        Ok(BrainSignal {
            values,
            subject_id: subject_id.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn subject_id(&self) -> &str {
        &self.subject_id
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Axis-aligned box in corner form `(x_min, y_min, x_max, y_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct BBox {
    x_min: f64,
    y_min: f64,
    x_max: f64,
    y_max: f64,
}

impl BBox {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self> {
        if ![x_min, y_min, x_max, y_max].iter().all(|v| v.is_finite()) {
            return Err(Error::validation("bbox", "non-finite coordinate"));
        }
        if x_min > x_max || y_min > y_max {
            return Err(Error::validation(
                "bbox",
                format!("inverted box ({x_min}, {y_min}, {x_max}, {y_max})"),
            ));
        }
        Ok(BBox {
            x_min,
            y_min,
            x_max,
            y_max,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    pub fn y_min(&self) -> f64 {
        self.y_min
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    pub fn y_max(&self) -> f64 {
        self.y_max
    }

    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min) * (self.y_max - self.y_min)
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.x_min, self.y_min, self.x_max, self.y_max]
    }
}

impl TryFrom<[f64; 4]> for BBox {
    type Error = Error;

    fn try_from(c: [f64; 4]) -> Result<Self> {
        BBox::new(c[0], c[1], c[2], c[3])
    }
}

impl From<BBox> for [f64; 4] {
    fn from(b: BBox) -> Self {
        b.to_array()
    }
}
