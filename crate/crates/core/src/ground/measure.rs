use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total mass of a probability measure.
pub const MASS_TOL: f64 = 1e-12;

/// A finitely supported probability measure on `[0,1]^m`.
///
/// Atoms are stored row-major in one flat buffer of length `len() * dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    dim: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(dim: usize, coords: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::input("measure dimension must be positive"));
        }
        if coords.len() != weights.len() * dim {
            return Err(Error::input(format!(
                "{} coordinates do not describe {} atoms in dimension {}",
                coords.len(),
                weights.len(),
                dim
            )));
        }
        if weights.is_empty() {
            return Err(Error::input("measure has no atoms"));
        }
        if let Some(c) = coords.iter().find(|c| !(0.0..=1.0).contains(*c)) {
            return Err(Error::input(format!("coordinate {c} outside [0,1]")));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(Error::input(format!("invalid weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::input(format!(
                "weights sum to {total}, not a probability measure"
            )));
        }
        Ok(Self { dim, coords, weights })
    }

    /// Uniform weights `1/n` on the given atoms.
    pub fn uniform(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || coords.is_empty() || !coords.len().is_multiple_of(dim) {
            return Err(Error::input("bad coordinate buffer for a uniform measure"));
        }
        let n = coords.len() / dim;
        Self::new(dim, coords, vec![1.0 / n as f64; n])
    }

    pub fn dirac(point: &[f64]) -> Result<Self> {
        Self::new(point.len(), point.to_vec(), vec![1.0])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn atom(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn atoms(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    /// True when every weight equals `1/n` to within rounding.
    pub fn is_uniform(&self) -> bool {
        let target = 1.0 / self.len() as f64;
        self.weights
            .iter()
            .all(|w| (w - target).abs() <= 4.0 * f64::EPSILON * target)
    }

    /// Merge atoms at bit-identical locations, summing their weights.
    pub fn merged(&self) -> Self {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            self.atom(a)
                .iter()
                .zip(self.atom(b))
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut coords = Vec::with_capacity(self.coords.len());
        let mut weights: Vec<f64> = Vec::with_capacity(self.len());
        let mut last: Option<usize> = None;
        for i in order {
            match last {
                Some(j) if self.atom(j) == self.atom(i) => {
                    *weights.last_mut().unwrap() += self.weights[i];
                }
                _ => {
                    coords.extend_from_slice(self.atom(i));
                    weights.push(self.weights[i]);
                    last = Some(i);
                }
            }
        }
        Self {
            dim: self.dim,
            coords,
            weights,
        }
    }

    pub(crate) fn from_parts_unchecked(dim: usize, coords: Vec<f64>, weights: Vec<f64>) -> Self {
        debug_assert_eq!(coords.len(), weights.len() * dim);
        Self { dim, coords, weights }
    }
}
