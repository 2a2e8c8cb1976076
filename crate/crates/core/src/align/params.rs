//! Flat parameter storage with named segments; gradients and optimizer
//! state share the same layout.

use serde::{Deserialize, Serialize};

use crate::rng::RandomStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SegId(usize);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub name: String,
    pub offset: usize,
    pub rows: usize,
    pub cols: usize,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Init {
    Zeros,
    Constant(f64),
    /// Normal with the given standard deviation.
    Normal(f64),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    data: Vec<f64>,
    segments: Vec<Segment>,
}

impl ParamSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(
        &mut self,
        name: impl Into<String>,
        rows: usize,
        cols: usize,
        init: Init,
        rng: &mut RandomStream,
    ) -> SegId {
        let n = rows * cols;
        let offset = self.data.len();
        match init {
            Init::Zeros => self.data.resize(offset + n, 0.0),
            Init::Constant(c) => self.data.resize(offset + n, c),
            Init::Normal(std) => self.data.extend((0..n).map(|_| std * rng.normal())),
        }
        self.segments.push(Segment {
            name: name.into(),
            offset,
            rows,
            cols,
        });
        SegId(self.segments.len() - 1)
    }

    pub fn get(&self, id: SegId) -> &[f64] {
        &self.data[self.segments[id.0].range()]
    }

    pub fn get_mut(&mut self, id: SegId) -> &mut [f64] {
        let r = self.segments[id.0].range();
        &mut self.data[r]
    }

    pub fn segment(&self, id: SegId) -> &Segment {
        &self.segments[id.0]
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn zeros_like(&self) -> Vec<f64> {
        vec![0.0; self.data.len()]
    }

    /// Slice of a same-layout gradient buffer belonging to `id`.
    pub fn grad_of<'g>(&self, id: SegId, grad: &'g mut [f64]) -> &'g mut [f64] {
        &mut grad[self.segments[id.0].range()]
    }
}
