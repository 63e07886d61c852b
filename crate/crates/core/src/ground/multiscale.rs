//! The multiscale measure whose convergence rate follows a prescribed
//! sequence `δ_n = min(1, c·n^α)`.
//!
//! `N_k` is the smallest power of two `n` with `δ_n ≤ 2^{-k}`. Level `k ≥ 2`
//! of the dyadic grid carries exactly `N_{k-2}` live cubes of equal mass;
//! level 2 is the single cube `[0, 1/4]^m`. Each live cube at level `k` keeps
//! its first `N_{k-1}/N_{k-2}` children (children ordered by reading the
//! offset vector in `{0,1}^m` as a binary number, axis 0 least significant).

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack for comparisons done in the log2 domain.
const LOG_TOL: f64 = 1e-9;

/// Largest exponent of two representable for `N_k`.
const MAX_LOG2_N: u32 = 62;

/// `δ_n = min(1, c·n^α)` with `α ∈ [-1, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaSequence {
    pub c: f64,
    pub alpha: f64,
}

impl DeltaSequence {
    pub fn new(c: f64, alpha: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::config(format!("delta sequence needs c > 0, got {c}")));
        }
        if !(-1.0..0.0).contains(&alpha) {
            return Err(Error::config(format!(
                "delta sequence needs alpha in [-1, 0), got {alpha}"
            )));
        }
        Ok(Self { c, alpha })
    }

    /// `log2 δ_{2^j}`.
    pub fn log2_at(&self, j: f64) -> f64 {
        (self.c.log2() + self.alpha * j).min(0.0)
    }

    pub fn delta(&self, n: f64) -> f64 {
        self.log2_at(n.log2()).exp2()
    }

    /// `log2 N_k`, the smallest `j ≥ 0` with `log2 δ_{2^j} ≤ -k`.
    pub fn log2_n_k(&self, k: u32) -> Option<u32> {
        let j = ((k as f64 + self.c.log2()) / -self.alpha - LOG_TOL).ceil().max(0.0);
        (j <= MAX_LOG2_N as f64).then_some(j as u32)
    }

    /// Checks the three admissibility conditions on `n = 2^j`, `1 ≤ j ≤ j_max`.
    pub fn check(&self, j_max: u32) -> Result<()> {
        let mut prev_delta = f64::INFINITY;
        let mut prev_ratio = 0.0_f64;
        for j in 1..=j_max {
            let jf = j as f64;
            let l = self.log2_at(jf);
            if l > prev_delta + LOG_TOL {
                return Err(Error::config(format!(
                    "delta_n must be nonincreasing; fails at n = 2^{j}"
                )));
            }
            if l >= 0.0 {
                return Err(Error::config(format!(
                    "delta_n must lie in (0, 1) for n >= 2; delta_(2^{j}) = 1"
                )));
            }
            if l < -jf - LOG_TOL {
                return Err(Error::config(format!("delta_n >= 1/n fails at n = 2^{j}")));
            }
            let ratio = jf / -l;
            if ratio < prev_ratio - LOG_TOL {
                return Err(Error::config(format!(
                    "log n / (-log delta_n) must be nondecreasing; fails at n = 2^{j}"
                )));
            }
            prev_delta = l;
            prev_ratio = ratio;
        }
        Ok(())
    }
}

/// Live-cube tree of the multiscale measure, truncated at depth `K`.
///
/// Below depth `K` the measure is uniform on each live cube.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiscaleMeasure {
    seq: DeltaSequence,
    dim: usize,
    depth: usize,
    log2_n: Vec<u32>,
    /// Per level `0..=K`, flat integer cube coordinates (stride `dim`).
    live: Vec<Vec<u32>>,
}

impl MultiscaleMeasure {
    pub fn build(seq: DeltaSequence, depth: usize) -> Result<Self> {
        let seq = DeltaSequence::new(seq.c, seq.alpha)?;
        if !(2..=30).contains(&depth) {
            return Err(Error::config(format!(
                "multiscale depth must lie in [2, 30], got {depth}"
            )));
        }
        // N_k for all k whose ratios the construction can reach, plus a margin
        // so that the cube dimension reflects the sequence, not the truncation.
        let horizon = depth + 8;
        let mut log2_n = Vec::with_capacity(horizon + 1);
        for k in 0..=horizon as u32 {
            match seq.log2_n_k(k) {
                Some(j) => log2_n.push(j),
                None => break,
            }
        }
        if log2_n.len() < depth.max(3) - 1 {
            return Err(Error::config("multiscale depth requires N_k beyond 2^62".to_string()));
        }
        let j_max = (*log2_n.last().unwrap() + 1).min(MAX_LOG2_N);
        seq.check(j_max)?;

        let dim = log2_n.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0).max(1) as usize;
        if dim > 16 {
            return Err(Error::config(format!("multiscale cube dimension {dim} is too large")));
        }
        let live_at_depth = 1u64 << log2_n[depth - 2];
        if live_at_depth.saturating_mul(dim as u64) > 1 << 28 {
            return Err(Error::capacity(format!(
                "multiscale depth {depth} needs {live_at_depth} live cubes"
            )));
        }

        let mut live = vec![vec![0u32; dim], vec![0u32; dim], vec![0u32; dim]];
        for k in 2..depth {
            let keep = 1usize << (log2_n[k - 1] - log2_n[k - 2]);
            let parent = &live[k];
            let mut next = Vec::with_capacity(parent.len() * keep);
            for cube in parent.chunks_exact(dim) {
                for b in 0..keep {
                    next.extend(cube.iter().enumerate().map(|(i, &c)| 2 * c + ((b >> i) & 1) as u32));
                }
            }
            live.push(next);
        }
        live.truncate(depth + 1);
        Ok(Self {
            seq,
            dim,
            depth,
            log2_n,
            live,
        })
    }

    pub fn sequence(&self) -> DeltaSequence {
        self.seq
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `N_k` for the computed range of `k`.
    pub fn n_k(&self, k: usize) -> Option<u64> {
        self.log2_n.get(k).map(|&j| 1u64 << j)
    }

    pub fn n_sequence(&self) -> Vec<u64> {
        self.log2_n.iter().map(|&j| 1u64 << j).collect()
    }

    /// Number of live cubes of side `2^{-k}`, for `k ≤ K`.
    pub fn live_count(&self, level: usize) -> usize {
        self.live[level].len() / self.dim
    }

    /// Integer coordinates of the live cubes at `level`.
    pub fn live_cubes(&self, level: usize) -> impl Iterator<Item = &[u32]> + '_ {
        self.live[level].chunks_exact(self.dim)
    }

    /// Exact mass of the grid cube with integer coordinates `cube` at `level`.
    pub fn cell_mass(&self, level: usize, cube: &[u32]) -> f64 {
        debug_assert_eq!(cube.len(), self.dim);
        if level > self.depth {
            let shift = level - self.depth;
            let anc: Vec<u32> = cube.iter().map(|&c| c >> shift).collect();
            let m = self.cell_mass(self.depth, &anc);
            return m / (1u64 << (shift * self.dim)) as f64;
        }
        if self.is_live(level, cube) {
            1.0 / self.live_count(level) as f64
        } else {
            0.0
        }
    }

    /// Whether the grid cube at `level <= K` is live: its parent is live and
    /// its offset within the parent is among the kept children.
    pub fn is_live(&self, level: usize, cube: &[u32]) -> bool {
        let mut c: Vec<u32> = cube.to_vec();
        for k in (3..=level).rev() {
            let offset = c
                .iter()
                .enumerate()
                .fold(0usize, |acc, (i, &x)| acc | (((x & 1) as usize) << i));
            let keep = 1usize << (self.log2_n[k - 2] - self.log2_n[k - 3]);
            if offset >= keep {
                return false;
            }
            c.iter_mut().for_each(|x| *x >>= 1);
        }
        c.iter().all(|&x| x == 0)
    }

    /// Atoms at live-cube centres of `level` with equal masses; every point of
    /// a live cube lies within `2^{-level-1}` (sup norm) of its centre.
    pub fn center_measure(&self, level: usize) -> Result<super::DiscreteMeasure> {
        if level > self.depth {
            return Err(Error::input(format!(
                "centre level {level} exceeds truncation depth {}",
                self.depth
            )));
        }
        let side = 0.5_f64.powi(level as i32);
        let coords: Vec<f64> = self.live[level].iter().map(|&c| (c as f64 + 0.5) * side).collect();
        super::DiscreteMeasure::uniform(self.dim, coords)
    }

    /// One i.i.d. draw: a uniform live cube at depth `K`, then uniform inside.
    pub fn sample_point(&self, rng: &mut super::Rng, out: &mut Vec<f64>) {
        let level = self.depth;
        let idx = rng.random_range(0..self.live_count(level));
        let side = 0.5_f64.powi(level as i32);
        let cube = &self.live[level][idx * self.dim..(idx + 1) * self.dim];
        for &c in cube {
            let u: f64 = rng.random();
            out.push((c as f64 + u) * side);
        }
    }
}
