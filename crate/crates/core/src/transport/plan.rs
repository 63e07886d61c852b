use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ground::{DiscreteMeasure, GroundSpace};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanEntry {
    pub i: usize,
    pub j: usize,
    pub mass: f64,
}

/// Sparse coupling between a source measure with `n_source` atoms and a
/// target measure with `n_target` atoms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransportPlan {
    n_source: usize,
    n_target: usize,
    p: f64,
    entries: Vec<PlanEntry>,
}

impl TransportPlan {
    pub fn new(n_source: usize, n_target: usize, p: f64, entries: Vec<PlanEntry>) -> Result<Self> {
        for e in &entries {
            if e.i >= n_source || e.j >= n_target {
                return Err(Error::input(format!(
                    "plan entry ({}, {}) outside a {n_source}x{n_target} plan",
                    e.i, e.j
                )));
            }
            if !(e.mass >= 0.0 && e.mass.is_finite()) {
                return Err(Error::input(format!("plan entry with invalid mass {}", e.mass)));
            }
        }
        Ok(Self {
            n_source,
            n_target,
            p,
            entries,
        })
    }

    pub fn n_source(&self) -> usize {
        self.n_source
    }

    pub fn n_target(&self) -> usize {
        self.n_target
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn entries(&self) -> &[PlanEntry] {
        &self.entries
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.iter().map(|e| e.mass).sum()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let mut r = vec![0.0; self.n_source];
        for e in &self.entries {
            r[e.i] += e.mass;
        }
        r
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.n_target];
        for e in &self.entries {
            c[e.j] += e.mass;
        }
        c
    }

    /// Largest deviation of either marginal from the given weights.
    pub fn marginal_error(&self, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
        let rows = self.row_sums();
        let cols = self.col_sums();
        let r = rows
            .iter()
            .zip(mu.weights())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let c = cols
            .iter()
            .zip(nu.weights())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        r.max(c)
    }

    /// `Σ γ_ij D(x_i, y_j)^p`.
    pub fn cost(&self, space: &GroundSpace, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
        self.entries
            .iter()
            .map(|e| e.mass * space.cost(mu.atom(e.i), nu.atom(e.j), self.p))
            .sum()
    }

    /// CSV rows `i,j,mass,cost` where `cost` is the entry's contribution.
    pub fn write_csv<W: Write>(
        &self,
        out: W,
        space: &GroundSpace,
        mu: &DiscreteMeasure,
        nu: &DiscreteMeasure,
    ) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["i", "j", "mass", "cost"])?;
        for e in &self.entries {
            let c = e.mass * space.cost(mu.atom(e.i), nu.atom(e.j), self.p);
            w.write_record([e.i.to_string(), e.j.to_string(), e.mass.to_string(), c.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}
