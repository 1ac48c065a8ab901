use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point `z = (x, y)` of the product space, stored contiguously as `[x; y]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Iterate {
    data: Vec<f64>,
    x_dim: usize,
}

impl Iterate {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        let x_dim = x.len();
        let mut data = x;
        data.extend(y);
        Self { data, x_dim }
    }

    pub fn zeros(x_dim: usize, y_dim: usize) -> Self {
        Self {
            data: vec![0.0; x_dim + y_dim],
            x_dim,
        }
    }

    /// Builds an iterate from a flat `[x; y]` buffer.
    pub fn from_flat(data: Vec<f64>, x_dim: usize) -> Result<Self> {
        if x_dim > data.len() {
            return Err(Error::Dimension {
                expected: x_dim,
                got: data.len(),
            });
        }
        Ok(Self { data, x_dim })
    }

    pub fn x(&self) -> &[f64] {
        &self.data[..self.x_dim]
    }

    pub fn y(&self) -> &[f64] {
        &self.data[self.x_dim..]
    }

    pub fn x_mut(&mut self) -> &mut [f64] {
        &mut self.data[..self.x_dim]
    }

    pub fn y_mut(&mut self) -> &mut [f64] {
        &mut self.data[self.x_dim..]
    }

    pub fn x_dim(&self) -> usize {
        self.x_dim
    }

    pub fn y_dim(&self) -> usize {
        self.data.len() - self.x_dim
    }

    /// Total dimension `n_x + n_y`.
    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_flat(self) -> Vec<f64> {
        self.data
    }

    pub fn same_shape(&self, other: &Iterate) -> bool {
        self.x_dim == other.x_dim && self.data.len() == other.data.len()
    }

    pub fn check_shape(&self, other: &Iterate) -> Result<()> {
        if self.x_dim != other.x_dim {
            return Err(Error::Dimension {
                expected: self.x_dim,
                got: other.x_dim,
            });
        }
        if self.data.len() != other.data.len() {
            return Err(Error::Dimension {
                expected: self.data.len(),
                got: other.data.len(),
            });
        }
        Ok(())
    }

    /// `‖z‖² = ‖x‖² + ‖y‖²`.
    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_l1(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).sum()
    }

    pub fn dot(&self, other: &Iterate) -> f64 {
        debug_assert!(self.same_shape(other));
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn dist_sq(&self, other: &Iterate) -> f64 {
        debug_assert!(self.same_shape(other));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn dist(&self, other: &Iterate) -> f64 {
        self.dist_sq(other).sqrt()
    }

    /// `self += scale * other`.
    pub fn axpy(&mut self, scale: f64, other: &Iterate) {
        debug_assert!(self.same_shape(other));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += scale * b;
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for a in &mut self.data {
            *a *= factor;
        }
    }

    pub fn scaled(&self, factor: f64) -> Iterate {
        let mut out = self.clone();
        out.scale(factor);
        out
    }

    /// `self - other`.
    pub fn sub(&self, other: &Iterate) -> Iterate {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}
