//! Covering numbers of point sets and of measures at one scale.
//!
//! Sup-norm balls are cubes, so a group of points fits in one closed ball of
//! diameter `ε` exactly when every pair is within `ε`. The exact mode
//! therefore computes a minimum clique cover of the `ε`-proximity graph,
//! which is the true covering number with arbitrary centres. The greedy mode
//! places balls of radius `ε/2` at data points, and the cell proxy counts the
//! side-`ε` grid cells hit; both are valid coverings, hence upper bounds.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::dyadic::CellHistogram;
use crate::error::{Error, Result};
use crate::ground::{DiscreteMeasure, GroundSpace, Norm};

/// Largest point set accepted by the exact mode.
pub const EXACT_COVER_MAX: usize = 20;

/// Slack on cumulative mass when discarding up to `τ`.
const MASS_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverMethod {
    ExactCover,
    GreedyCover,
    CellProxy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// Groups of point indices, each inside one ball of diameter `ε`.
    Groups(Vec<Vec<usize>>),
    /// Indices of the data points used as ball centres.
    Centers(Vec<usize>),
    /// Integer coordinates of the grid cells used.
    Cells(Vec<Vec<u64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringResult {
    pub eps: f64,
    pub count: usize,
    pub method: CoverMethod,
    pub witness: Witness,
}

impl CoveringResult {
    /// Checks that the witness covers every point with diameter-`ε` balls.
    pub fn covers(&self, space: &GroundSpace, points: &[f64]) -> bool {
        let m = space.dim;
        let pts: Vec<&[f64]> = points.chunks_exact(m).collect();
        match &self.witness {
            Witness::Groups(groups) => {
                let mut seen = vec![false; pts.len()];
                for g in groups {
                    for &a in g {
                        seen[a] = true;
                        if g.iter().any(|&b| space.dist(pts[a], pts[b]) > self.eps) {
                            return false;
                        }
                    }
                }
                seen.into_iter().all(|s| s)
            }
            Witness::Centers(c) => pts
                .iter()
                .all(|x| c.iter().any(|&i| space.dist(x, pts[i]) <= self.eps / 2.0)),
            Witness::Cells(cells) => {
                let set: BTreeSet<&Vec<u64>> = cells.iter().collect();
                pts.iter().all(|x| set.contains(&cell_of(x, self.eps)))
            }
        }
    }
}

fn cells_per_axis(eps: f64) -> f64 {
    (1.0 / eps - 1e-9).ceil().max(1.0)
}

/// Side-`ε` grid cell of `x`; the top cell of each axis is closed above.
fn cell_of(x: &[f64], eps: f64) -> Vec<u64> {
    let side = cells_per_axis(eps);
    x.iter()
        .map(|&v| (v / eps).floor().clamp(0.0, side - 1.0) as u64)
        .collect()
}

/// `N_ε` of a finite point set.
pub fn covering_number(space: &GroundSpace, points: &[f64], eps: f64, method: CoverMethod) -> Result<CoveringResult> {
    let m = space.dim;
    if points.is_empty() || !points.len().is_multiple_of(m) {
        return Err(Error::input("points must be a nonempty flat list"));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::input(format!("covering scale must be positive, got {eps}")));
    }
    let n = points.len() / m;
    let pts: Vec<&[f64]> = points.chunks_exact(m).collect();
    let witness = match method {
        CoverMethod::ExactCover => {
            if n > EXACT_COVER_MAX {
                return Err(Error::capacity(format!(
                    "exact covering handles at most {EXACT_COVER_MAX} points, got {n}"
                )));
            }
            if space.norm != Norm::LInf {
                return Err(Error::input("exact covering is available for the sup norm only"));
            }
            Witness::Groups(clique_cover(&pts, |a, b| space.dist(a, b) <= eps))
        }
        CoverMethod::GreedyCover => {
            let near: Vec<Vec<usize>> = (0..n)
                .map(|i| (0..n).filter(|&j| space.dist(pts[i], pts[j]) <= eps / 2.0).collect())
                .collect();
            let mut covered = vec![false; n];
            let mut left = n;
            let mut centers = Vec::new();
            while left > 0 {
                let (best, gain) = (0..n)
                    .map(|i| (i, near[i].iter().filter(|&&j| !covered[j]).count()))
                    .fold((0, 0), |acc, e| if e.1 > acc.1 { e } else { acc });
                debug_assert!(gain > 0);
                for &j in &near[best] {
                    if !covered[j] {
                        covered[j] = true;
                        left -= 1;
                    }
                }
                centers.push(best);
            }
            Witness::Centers(centers)
        }
        CoverMethod::CellProxy => {
            let cells: BTreeSet<Vec<u64>> = pts.iter().map(|x| cell_of(x, eps)).collect();
            Witness::Cells(cells.into_iter().collect())
        }
    };
    let count = match &witness {
        Witness::Groups(g) => g.len(),
        Witness::Centers(c) => c.len(),
        Witness::Cells(c) => c.len(),
    };
    Ok(CoveringResult {
        eps,
        count,
        method,
        witness,
    })
}

/// Minimum partition of the points into pairwise-compatible groups, by
/// branch and bound over assignments in a fixed point order.
fn clique_cover(pts: &[&[f64]], ok: impl Fn(&[f64], &[f64]) -> bool) -> Vec<Vec<usize>> {
    let n = pts.len();
    let adj: Vec<u32> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && ok(pts[i], pts[j]))
                .fold(0u32, |acc, j| acc | 1 << j)
        })
        .collect();
    // Hardest points first: fewest compatible partners.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (adj[i].count_ones(), i));

    struct Search<'a> {
        adj: &'a [u32],
        order: &'a [usize],
        groups: Vec<u32>,
        best: Vec<u32>,
    }
    impl Search<'_> {
        fn go(&mut self, pos: usize) {
            if self.groups.len() >= self.best.len() {
                return;
            }
            if pos == self.order.len() {
                self.best = self.groups.clone();
                return;
            }
            let v = self.order[pos];
            for g in 0..self.groups.len() {
                if self.groups[g] & !self.adj[v] == 0 {
                    self.groups[g] |= 1 << v;
                    self.go(pos + 1);
                    self.groups[g] &= !(1 << v);
                }
            }
            self.groups.push(1 << v);
            self.go(pos + 1);
            self.groups.pop();
        }
    }
    let mut s = Search {
        adj: &adj,
        order: &order,
        groups: Vec::new(),
        best: (0..n).map(|i| 1u32 << i).collect(),
    };
    s.best.push(0); // force the first complete assignment to be recorded
    s.go(0);
    s.best
        .into_iter()
        .map(|mask| (0..n).filter(|&i| mask & (1 << i) != 0).collect())
        .collect()
}

/// Cell masses at one scale in descending order, run-length encoded so that
/// huge families of equal cells stay compact. Answers `N_ε(μ, τ)` within the
/// cell family for any `τ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassProfile {
    pub eps: f64,
    /// `(mass per cell, number of cells)`, masses strictly decreasing.
    runs: Vec<(f64, u64)>,
    /// Cumulative mass through each run.
    prefix: Vec<f64>,
}

impl MassProfile {
    pub fn from_masses(eps: f64, masses: impl IntoIterator<Item = f64>) -> Self {
        let mut sorted: Vec<f64> = masses.into_iter().filter(|&w| w > 0.0).collect();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let mut runs: Vec<(f64, u64)> = Vec::new();
        for w in sorted {
            match runs.last_mut() {
                Some(r) if r.0 == w => r.1 += 1,
                _ => runs.push((w, 1)),
            }
        }
        Self::from_runs(eps, runs)
    }

    /// `cells` cells of equal mass.
    pub fn uniform(eps: f64, cells: u64) -> Self {
        Self::from_runs(eps, vec![(1.0 / cells.max(1) as f64, cells.max(1))])
    }

    fn from_runs(eps: f64, runs: Vec<(f64, u64)>) -> Self {
        let mut acc = 0.0;
        let prefix = runs
            .iter()
            .map(|&(w, c)| {
                acc += w * c as f64;
                acc
            })
            .collect();
        Self { eps, runs, prefix }
    }

    /// Profile of one level of a grid-partition histogram (`ε = b^{-level}`).
    pub fn from_histogram(hist: &CellHistogram<'_>, level: usize) -> Result<Self> {
        let part = hist.partition();
        if part.base().is_none() {
            return Err(Error::input("mass profiles need a grid partition"));
        }
        if level == 0 || level > part.depth() {
            return Err(Error::input(format!("level {level} outside the histogram")));
        }
        Ok(Self::from_masses(
            part.delta().powi(level as i32),
            hist.level(level).iter().map(|e| e.1),
        ))
    }

    /// Cells with positive mass.
    pub fn support(&self) -> u64 {
        self.runs.iter().map(|r| r.1).sum()
    }

    /// Smallest number of cells holding mass at least `1 - τ`.
    pub fn count(&self, tau: f64) -> u64 {
        if tau <= 0.0 {
            return self.support().max(1);
        }
        let need = 1.0 - tau - MASS_SLACK;
        let mut before_cells = 0u64;
        let mut before_mass = 0.0;
        for (&(w, c), &cum) in self.runs.iter().zip(&self.prefix) {
            if cum >= need {
                let extra = ((need - before_mass) / w).ceil().clamp(1.0, c as f64) as u64;
                return before_cells + extra;
            }
            before_cells += c;
            before_mass = cum;
        }
        self.support().max(1)
    }
}

/// Masses of the side-`ε` grid cells under a discrete measure, for scales
/// off the dyadic grid.
pub fn cell_mass_profile(measure: &DiscreteMeasure, eps: f64) -> Result<MassProfile> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::input(format!("covering scale must be positive, got {eps}")));
    }
    let mut cells: BTreeMap<Vec<u64>, f64> = BTreeMap::new();
    for (x, &w) in measure.atoms().zip(measure.weights()) {
        *cells.entry(cell_of(x, eps)).or_insert(0.0) += w;
    }
    Ok(MassProfile::from_masses(eps, cells.into_values()))
}

/// `N_ε(μ, τ)` in the cell family of one histogram level.
pub fn covering_number_with_mass(hist: &CellHistogram<'_>, level: usize, tau: f64) -> Result<CoveringResult> {
    if !(0.0..1.0).contains(&tau) {
        return Err(Error::input(format!("tau must lie in [0, 1), got {tau}")));
    }
    let profile = MassProfile::from_histogram(hist, level)?;
    let count = profile.count(tau) as usize;
    let mut cells: Vec<(u64, f64)> = hist.level(level).to_vec();
    cells.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(CoveringResult {
        eps: profile.eps,
        count,
        method: CoverMethod::CellProxy,
        witness: Witness::Cells(cells.iter().take(count).map(|e| vec![e.0]).collect()),
    })
}
