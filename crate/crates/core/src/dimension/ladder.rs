//! Scale-indexed dimension estimates: `d_ε`, `d_n`, `m_n` and the ladder
//! report. All of them read covering counts from mass profiles on a grid of
//! scales `ε_ℓ = b^{-ℓ}`, `ℓ = 1..=L`.

use std::io::Write;

use serde::Serialize;

use crate::dyadic::{CellHistogram, DyadicPartition};
use crate::error::{Error, Result};
use crate::ground::{DiscreteMeasure, GroundSpace, MultiscaleMeasure};

use super::covering::MassProfile;

/// Coarsest scale admitted in the supremum defining `d_{≥ε}`.
const SUP_SCALE: f64 = 1.0 / 9.0;
const SCALE_TOL: f64 = 1e-12;

/// `log N / (-log ε)`.
pub fn d_eps(count: u64, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::input(format!("scale must lie in (0, 1), got {eps}")));
    }
    if count == 0 {
        return Err(Error::input("covering count must be at least 1"));
    }
    Ok((count as f64).ln() / -eps.ln())
}

/// Mass profiles of one measure at the scales `b^{-1}, ..., b^{-L}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleGrid {
    base: u32,
    profiles: Vec<MassProfile>,
}

impl ScaleGrid {
    /// Profiles must be listed at `b^{-1}, b^{-2}, ...` in order.
    pub fn new(base: u32, profiles: Vec<MassProfile>) -> Result<Self> {
        if base < 2 {
            return Err(Error::config(format!("scale base must be at least 2, got {base}")));
        }
        if profiles.is_empty() {
            return Err(Error::config("scale grid is empty"));
        }
        for (i, prof) in profiles.iter().enumerate() {
            let want = (base as f64).powi(-(i as i32 + 1));
            if (prof.eps - want).abs() > SCALE_TOL * want {
                return Err(Error::config(format!(
                    "profile {} has scale {}, expected {want}",
                    i + 1,
                    prof.eps
                )));
            }
        }
        Ok(Self { base, profiles })
    }

    /// Cell masses of a discrete measure on the standard `b`-adic grid.
    pub fn from_measure(space: &GroundSpace, measure: &DiscreteMeasure, base: u32, depth: usize) -> Result<Self> {
        let part = DyadicPartition::standard(space, base, depth)?;
        let hist = CellHistogram::new(&part, measure)?;
        Self::from_histogram(&hist)
    }

    pub fn from_histogram(hist: &CellHistogram<'_>) -> Result<Self> {
        let base = hist
            .partition()
            .base()
            .ok_or_else(|| Error::input("scale grids need a grid partition"))?;
        let profiles = (1..=hist.depth())
            .map(|k| MassProfile::from_histogram(hist, k))
            .collect::<Result<_>>()?;
        Self::new(base, profiles)
    }

    /// Exact cell masses of the multiscale measure on the 2-adic grid. Below
    /// the truncation depth each live cube splits evenly.
    pub fn from_multiscale(ms: &MultiscaleMeasure, depth: usize) -> Result<Self> {
        let k = ms.depth();
        let profiles = (1..=depth)
            .map(|l| {
                let live = ms.live_count(l.min(k)) as u64;
                let cells = live
                    .checked_shl((ms.dim() * l.saturating_sub(k)) as u32)
                    .filter(|c| c >> ((ms.dim() * l.saturating_sub(k)) as u32) == live)
                    .ok_or_else(|| Error::capacity(format!("level {l} has too many cells")))?;
                Ok(MassProfile::uniform(0.5f64.powi(l as i32), cells))
            })
            .collect::<Result<_>>()?;
        Self::new(2, profiles)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn depth(&self) -> usize {
        self.profiles.len()
    }

    /// `ε_ℓ` for `ℓ = 1..=L`.
    pub fn eps(&self, level: usize) -> f64 {
        self.profiles[level - 1].eps
    }

    pub fn profile(&self, level: usize) -> &MassProfile {
        &self.profiles[level - 1]
    }

    /// `N_{ε_ℓ}(μ, τ)` in the cell family.
    pub fn count(&self, level: usize, tau: f64) -> u64 {
        self.profile(level).count(tau)
    }

    /// `d_{ε_ℓ}(μ, τ)`.
    pub fn dim_at(&self, level: usize, tau: f64) -> f64 {
        d_eps(self.count(level, tau), self.eps(level)).expect("grid scales lie in (0, 1)")
    }

    /// Keeps only the first `depth` scales.
    pub fn truncated(&self, depth: usize) -> Result<Self> {
        Self::new(self.base, self.profiles[..depth.min(self.depth())].to_vec())
    }

    /// `sup d_{ε'}(μ, τ)` over grid scales `ε' ∈ [ε_ℓ, 1/9]`; 0 when none.
    pub fn d_at_least(&self, level: usize, tau: f64) -> f64 {
        (1..=level)
            .filter(|&l| self.eps(l) <= SUP_SCALE * (1.0 + SCALE_TOL))
            .map(|l| self.dim_at(l, tau))
            .fold(0.0, f64::max)
    }
}

/// Grid value of `d_n` with the scale attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DnEstimate {
    pub n: u64,
    pub value: f64,
    pub eps: f64,
    /// `d_{≥ε}(μ, ε^p)` at the optimal scale.
    pub d_at_least: f64,
}

fn check_np(n: u64, p: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::input("sample size must be at least 1"));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::input(format!("exponent p must be a finite real >= 1, got {p}")));
    }
    Ok(())
}

/// `min_ε max{d_{≥ε}(μ, ε^p), log n / (-log ε)}` over the grid.
pub fn compute_d_n(grid: &ScaleGrid, n: u64, p: f64) -> Result<DnEstimate> {
    check_np(n, p)?;
    let ln_n = (n as f64).ln();
    let mut best: Option<DnEstimate> = None;
    for l in 1..=grid.depth() {
        let eps = grid.eps(l);
        let ge = grid.d_at_least(l, eps.powf(p));
        let value = ge.max(ln_n / -eps.ln());
        if best.is_none_or(|b| value < b.value) {
            best = Some(DnEstimate {
                n,
                value,
                eps,
                d_at_least: ge,
            });
        }
    }
    best.ok_or_else(|| Error::config("scale grid is empty"))
}

/// `min_ε max{N_ε(μ, ε^p), n ε^{2p}}` over the grid.
pub fn compute_m_n(grid: &ScaleGrid, n: u64, p: f64) -> Result<f64> {
    check_np(n, p)?;
    (1..=grid.depth())
        .map(|l| {
            let eps = grid.eps(l);
            (grid.count(l, eps.powf(p)) as f64).max(n as f64 * eps.powf(2.0 * p))
        })
        .reduce(f64::min)
        .ok_or_else(|| Error::config("scale grid is empty"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LadderRow {
    pub eps: f64,
    pub tau: f64,
    pub count: u64,
    pub d_eps: f64,
}

/// Finite-scale dimension report: `d_ε(μ, τ)` for `τ ∈ {0, ε^p, 1/2}` at
/// every grid scale (`τ = 0` is the support), plus `d_n` and `m_n` per sample
/// size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionLadder {
    pub base: u32,
    pub p: f64,
    pub rows: Vec<LadderRow>,
    pub d_n: Vec<DnEstimate>,
    pub m_n: Vec<(u64, f64)>,
    pub reference_dimension: Option<f64>,
}

impl DimensionLadder {
    pub fn build(grid: &ScaleGrid, p: f64, ns: &[u64], reference_dimension: Option<f64>) -> Result<Self> {
        check_np(1, p)?;
        let mut rows = Vec::with_capacity(3 * grid.depth());
        for l in 1..=grid.depth() {
            let eps = grid.eps(l);
            for tau in [0.0, eps.powf(p), 0.5] {
                let count = grid.count(l, tau);
                rows.push(LadderRow {
                    eps,
                    tau,
                    count,
                    d_eps: d_eps(count, eps)?,
                });
            }
        }
        Ok(Self {
            base: grid.base(),
            p,
            rows,
            d_n: ns.iter().map(|&n| compute_d_n(grid, n, p)).collect::<Result<_>>()?,
            m_n: ns
                .iter()
                .map(|&n| Ok((n, compute_m_n(grid, n, p)?)))
                .collect::<Result<_>>()?,
            reference_dimension,
        })
    }

    /// Columns `eps, tau, count, d_eps`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "base": self.base,
            "p": self.p,
            "scales": self.rows.len() / 3,
            "d_n": self.d_n,
            "m_n": self.m_n.iter().map(|&(n, v)| serde_json::json!({"n": n, "value": v})).collect::<Vec<_>>(),
            "reference_dimension": self.reference_dimension,
        })
    }
}
