use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Norm used to measure distances on the unit cube.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    /// `max_i |x_i - y_i|`; the unit cube has diameter exactly 1.
    #[default]
    LInf,
    /// Euclidean norm divided by `sqrt(m)`, so the unit cube again has diameter 1.
    L2Scaled,
}

/// The metric space `([0,1]^m, D)` with `diam <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundSpace {
    pub dim: usize,
    #[serde(default)]
    pub norm: Norm,
}

impl GroundSpace {
    pub fn new(dim: usize, norm: Norm) -> Result<Self> {
        if dim == 0 {
            return Err(Error::config("ground space dimension must be positive"));
        }
        Ok(Self { dim, norm })
    }

    pub fn linf(dim: usize) -> Self {
        Self {
            dim: dim.max(1),
            norm: Norm::LInf,
        }
    }

    /// Divisor applied to the raw norm.
    pub fn scale(&self) -> f64 {
        match self.norm {
            Norm::LInf => 1.0,
            Norm::L2Scaled => (self.dim as f64).sqrt(),
        }
    }

    /// Checked distance.
    pub fn distance(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != self.dim || y.len() != self.dim {
            return Err(Error::input(format!(
                "dimension mismatch: space has m={}, got points of length {} and {}",
                self.dim,
                x.len(),
                y.len()
            )));
        }
        Ok(self.dist(x, y))
    }

    /// Unchecked distance for hot loops; both slices must have length `dim`.
    #[inline]
    pub fn dist(&self, x: &[f64], y: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), y.len());
        match self.norm {
            Norm::LInf => x.iter().zip(y).fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs())),
            Norm::L2Scaled => {
                let s: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                (s / self.dim as f64).sqrt()
            }
        }
    }

    /// `D(x, y)^p`.
    #[inline]
    pub fn cost(&self, x: &[f64], y: &[f64], p: f64) -> f64 {
        let d = self.dist(x, y);
        if p == 1.0 {
            d
        } else if p == 2.0 {
            d * d
        } else {
            d.powf(p)
        }
    }

    /// Distance from `x` to the nearest point of a flat point set.
    pub fn distance_to_set(&self, x: &[f64], set: &[f64]) -> Result<f64> {
        if set.is_empty() {
            return Err(Error::input("distance to an empty set is undefined"));
        }
        if x.len() != self.dim || !set.len().is_multiple_of(self.dim) {
            return Err(Error::input("dimension mismatch in distance_to_set"));
        }
        Ok(set
            .chunks_exact(self.dim)
            .map(|s| self.dist(x, s))
            .fold(f64::INFINITY, f64::min))
    }
}
