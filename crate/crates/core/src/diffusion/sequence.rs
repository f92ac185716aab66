use rand::Rng;
use rand_distr::StandardNormal;

use super::{DiffusionError, Result};

/// Dense `frames x dim` row-major sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Sequence {
    frames: usize,
    dim: usize,
    data: Vec<f64>,
}

impl Sequence {
    pub fn new(frames: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if frames.checked_mul(dim) != Some(data.len()) {
            return Err(DiffusionError::Shape(format!(
                "{} values for {frames} x {dim}",
                data.len()
            )));
        }
        Ok(Self { frames, dim, data })
    }

    pub fn zeros(frames: usize, dim: usize) -> Self {
        Self {
            frames,
            dim,
            data: vec![0.0; frames * dim],
        }
    }

    pub fn filled(frames: usize, dim: usize, value: f64) -> Self {
        Self {
            frames,
            dim,
            data: vec![value; frames * dim],
        }
    }

    pub fn standard_normal<R: Rng + ?Sized>(frames: usize, dim: usize, rng: &mut R) -> Self {
        let data = (0..frames * dim)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        Self { frames, dim, data }
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.frames, self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.data[t * self.dim..(t + 1) * self.dim]
    }

    pub fn get(&self, t: usize, d: usize) -> f64 {
        self.data[t * self.dim + d]
    }

    pub(crate) fn check_same(&self, other: &Self, what: &str) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(DiffusionError::Shape(format!(
                "{what}: {:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        Ok(())
    }

    /// Elementwise `f(a, b)` over two equally shaped sequences.
    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same(other, "zip_map")?;
        Ok(Self {
            frames: self.frames,
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// Elementwise map with the column index.
    pub fn map_with_dim(&self, f: impl Fn(usize, f64) -> f64) -> Self {
        let dim = self.dim;
        Self {
            frames: self.frames,
            dim,
            data: self
                .data
                .iter()
                .enumerate()
                .map(|(i, &v)| f(i % dim, v))
                .collect(),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            frames: self.frames,
            dim: self.dim,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
