use serde::Serialize;

use crate::error::{Error, Result};
use crate::ground::{DiscreteMeasure, GroundSpace};

/// Kantorovich potentials: `f` on the source atoms and `f^c` on the target
/// atoms, with `f(x_i) - f^c(y_j) <= D(x_i, y_j)^p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualPotential {
    pub source: Vec<f64>,
    pub target: Vec<f64>,
    pub p: f64,
}

impl DualPotential {
    /// `E_μ f - E_ν f^c`.
    pub fn value(&self, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
        let a: f64 = self.source.iter().zip(mu.weights()).map(|(f, w)| f * w).sum();
        let b: f64 = self.target.iter().zip(nu.weights()).map(|(g, w)| g * w).sum();
        a - b
    }

    /// `max_ij f(x_i) - f^c(y_j) - D(x_i,y_j)^p`; nonpositive for a feasible pair.
    pub fn max_violation(&self, space: &GroundSpace, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for (i, x) in mu.atoms().enumerate() {
            for (j, y) in nu.atoms().enumerate() {
                worst = worst.max(self.source[i] - self.target[j] - space.cost(x, y, self.p));
            }
        }
        worst
    }
}

fn check_points(space: &GroundSpace, pts: &[f64], what: &str) -> Result<()> {
    if pts.is_empty() || !pts.len().is_multiple_of(space.dim) {
        return Err(Error::input(format!(
            "{what} must be a nonempty flat list of {}-dimensional points",
            space.dim
        )));
    }
    Ok(())
}

/// `f^c(y) = max_i f(x_i) - D(x_i, y)^p` for each target point.
pub fn c_transform(space: &GroundSpace, f: &[f64], source: &[f64], target: &[f64], p: f64) -> Result<Vec<f64>> {
    check_points(space, source, "source support")?;
    check_points(space, target, "target support")?;
    if f.len() * space.dim != source.len() {
        return Err(Error::input("potential length differs from source support size"));
    }
    Ok(c_transform_unchecked(space, f, source, target, p))
}

pub(crate) fn c_transform_unchecked(
    space: &GroundSpace,
    f: &[f64],
    source: &[f64],
    target: &[f64],
    p: f64,
) -> Vec<f64> {
    target
        .chunks_exact(space.dim)
        .map(|y| {
            source
                .chunks_exact(space.dim)
                .zip(f)
                .map(|(x, fx)| fx - space.cost(x, y, p))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// `g^{c̄}(x) = min_j g(y_j) + D(x, y_j)^p`, the conjugate in the other direction.
pub(crate) fn c_bar_transform(space: &GroundSpace, g: &[f64], source: &[f64], target: &[f64], p: f64) -> Vec<f64> {
    source
        .chunks_exact(space.dim)
        .map(|x| {
            target
                .chunks_exact(space.dim)
                .zip(g)
                .map(|(y, gy)| gy + space.cost(x, y, p))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// Replaces `f` by its double conjugate, shifts so that `max f = 1`, and
/// returns the pair `(f, f^c)`. Both then take values in `[0, 1]` because the
/// cost is bounded by 1.
pub(crate) fn normalize(
    space: &GroundSpace,
    f: &[f64],
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    p: f64,
) -> DualPotential {
    let g = c_transform_unchecked(space, f, mu.coords(), nu.coords(), p);
    let mut f = c_bar_transform(space, &g, mu.coords(), nu.coords(), p);
    let shift = 1.0 - f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    f.iter_mut().for_each(|v| *v += shift);
    let g = c_transform_unchecked(space, &f, mu.coords(), nu.coords(), p);
    DualPotential {
        source: f,
        target: g,
        p,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_potential_transform() {
        let s = GroundSpace::linf(1);
        let g = c_transform(&s, &[0.0, 0.0], &[0.0, 0.5], &[0.5, 0.8, 1.0], 1.0).unwrap();
        assert_eq!(g[0], 0.0);
        assert!((g[1] + 0.3).abs() < 1e-15);
        assert!((g[2] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn single_source_atom() {
        let s = GroundSpace::linf(2);
        let g = c_transform(&s, &[0.7], &[0.1, 0.1], &[0.6, 0.2, 0.1, 0.1], 2.0).unwrap();
        assert!((g[0] - (0.7 - 0.25)).abs() < 1e-15);
        assert!((g[1] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn rejects_mismatched_lengths() {
        let s = GroundSpace::linf(1);
        assert!(c_transform(&s, &[0.0], &[0.0, 0.5], &[0.5], 1.0).is_err());
        assert!(c_transform(&s, &[], &[], &[0.5], 1.0).is_err());
    }
}
