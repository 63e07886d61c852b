//! Uniform bucketing of target atoms for row scans of `c(x, y_j) + π_j`.
//!
//! Cells are visited in rings of growing Chebyshev offset from the cell of
//! `x`; a ring at offset `r` is at least `(r - 1) / side` away in every norm
//! we support (after the `1/√m` factor for the scaled Euclidean norm), which
//! bounds the scan once the current threshold is reached.

use crate::ground::{DiscreteMeasure, GroundSpace, Norm};

pub(crate) struct TargetGrid {
    dim: usize,
    side: usize,
    start: Vec<usize>,
    members: Vec<u32>,
    /// Per cell, `[lo_0, hi_0, lo_1, hi_1, ...]` of its members.
    boxes: Vec<f64>,
    /// Offsets sorted by Chebyshev norm; `ring_end[r]` ends ring `r`.
    offsets: Vec<i32>,
    ring_end: Vec<usize>,
    /// Occupied cells and their flat grid coordinates, for sparse rings.
    occupied: Vec<usize>,
    occupied_coords: Vec<i32>,
    cell_min: Vec<i64>,
    global_min: i64,
}

impl TargetGrid {
    pub(crate) fn new(space: &GroundSpace, nu: &DiscreteMeasure) -> Self {
        let m = space.dim;
        let target_cells = (nu.len() / 4).max(1) as f64;
        let mut side = (target_cells.powf(1.0 / m as f64).floor() as usize).max(1);
        while side > 1 && (2 * side - 1).pow(m as u32) > 1 << 20 {
            side -= 1;
        }
        let cells = side.pow(m as u32);
        let mut start = vec![0usize; cells + 1];
        let ids: Vec<usize> = nu.atoms().map(|y| cell_id(y, side)).collect();
        for &c in &ids {
            start[c + 1] += 1;
        }
        for c in 0..cells {
            start[c + 1] += start[c];
        }
        let mut fill = start.clone();
        let mut members = vec![0u32; nu.len()];
        let mut boxes = vec![0.0; cells * 2 * m];
        for c in 0..cells {
            for d in 0..m {
                boxes[(c * m + d) * 2] = f64::INFINITY;
                boxes[(c * m + d) * 2 + 1] = f64::NEG_INFINITY;
            }
        }
        for (j, y) in nu.atoms().enumerate() {
            let c = ids[j];
            members[fill[c]] = j as u32;
            fill[c] += 1;
            for (d, &v) in y.iter().enumerate() {
                let b = (c * m + d) * 2;
                boxes[b] = boxes[b].min(v);
                boxes[b + 1] = boxes[b + 1].max(v);
            }
        }

        let span = 2 * side - 1;
        let mut all: Vec<(usize, Vec<i32>)> = Vec::with_capacity(span.pow(m as u32));
        let mut o = vec![-(side as i32 - 1); m];
        loop {
            let r = o.iter().map(|v| v.unsigned_abs() as usize).max().unwrap_or(0);
            all.push((r, o.clone()));
            let mut d = 0;
            while d < m {
                o[d] += 1;
                if o[d] < side as i32 {
                    break;
                }
                o[d] = -(side as i32 - 1);
                d += 1;
            }
            if d == m {
                break;
            }
        }
        all.sort_by_key(|e| e.0);
        let mut ring_end = vec![0usize; side];
        for (k, e) in all.iter().enumerate() {
            ring_end[e.0] = k + 1;
        }
        let offsets = all.into_iter().flat_map(|e| e.1).collect();
        let occupied: Vec<usize> = (0..cells).filter(|&c| start[c + 1] > start[c]).collect();
        let mut occupied_coords = Vec::with_capacity(occupied.len() * m);
        for &c in &occupied {
            let mut rest = c;
            for _ in 0..m {
                occupied_coords.push((rest % side) as i32);
                rest /= side;
            }
        }

        Self {
            dim: m,
            side,
            start,
            members,
            boxes,
            offsets,
            ring_end,
            occupied,
            occupied_coords,
            cell_min: vec![0; cells],
            global_min: 0,
        }
    }

    /// Caches per-cell minima of the target potentials.
    pub(crate) fn set_potentials(&mut self, pi: &[i64]) {
        for c in 0..self.cell_min.len() {
            self.cell_min[c] = self
                .start_members(c)
                .iter()
                .map(|&j| pi[j as usize])
                .min()
                .unwrap_or(i64::MAX);
        }
        self.global_min = self.cell_min.iter().copied().min().unwrap_or(0);
    }

    fn start_members(&self, c: usize) -> &[u32] {
        &self.members[self.start[c]..self.start[c + 1]]
    }

    /// The `k` targets with the smallest `mult * cost(x, y_j) + pi[j]` below
    /// `bound`, ascending, into `out`. Needs [`Self::set_potentials`] first.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn scan(
        &self,
        space: &GroundSpace,
        nu: &DiscreteMeasure,
        p: f64,
        x: &[f64],
        pi: &[i64],
        mult: i64,
        k: usize,
        bound: i64,
        out: &mut Vec<(i64, u32)>,
    ) {
        out.clear();
        let m = self.dim;
        let side = self.side as i32;
        let home: Vec<i32> = x
            .iter()
            .map(|&v| ((v * self.side as f64) as i32).clamp(0, side - 1))
            .collect();
        let h = 1.0 / self.side as f64;
        let norm_factor = match space.norm {
            Norm::LInf => 1.0,
            Norm::L2Scaled => 1.0 / (m as f64).sqrt(),
        };
        let threshold = |out: &Vec<(i64, u32)>| {
            if out.len() == k {
                bound.min(out[k - 1].0)
            } else {
                bound
            }
        };
        let mut begin = 0;
        for r in 0..self.side {
            let ring_lb = lower_scaled((r as f64 - 1.0).max(0.0) * h * norm_factor, p).saturating_mul(mult);
            if ring_lb.saturating_add(self.global_min) >= threshold(out) {
                break;
            }
            let visit = |c: usize, out: &mut Vec<(i64, u32)>| {
                let ms = self.start_members(c);
                if ms.is_empty() {
                    return;
                }
                let t = threshold(out);
                let lb = lower_scaled(box_distance(space, x, &self.boxes[c * 2 * m..(c + 1) * 2 * m]), p)
                    .saturating_mul(mult);
                if lb.saturating_add(self.cell_min[c]) >= t {
                    return;
                }
                for &j in ms {
                    let pj = pi[j as usize];
                    if lb.saturating_add(pj) >= threshold(out) {
                        continue;
                    }
                    let v = (super::exact::scaled(space.cost(x, nu.atom(j as usize), p)) * mult).saturating_add(pj);
                    if v < threshold(out) {
                        if out.len() == k {
                            out.pop();
                        }
                        let at = out.partition_point(|e| e.0 <= v);
                        out.insert(at, (v, j));
                    }
                }
            };
            if self.occupied.len() < self.ring_end[r] - begin {
                // Sparse grid: filter the occupied cells by ring instead.
                for (c, coords) in self.occupied.iter().zip(self.occupied_coords.chunks_exact(m)) {
                    let ring = coords
                        .iter()
                        .zip(&home)
                        .map(|(a, b)| (a - b).unsigned_abs())
                        .max()
                        .unwrap_or(0);
                    if ring as usize == r {
                        visit(*c, out);
                    }
                }
            } else {
                'cells: for o in self.offsets[begin * m..self.ring_end[r] * m].chunks_exact(m) {
                    let mut c = 0usize;
                    for d in (0..m).rev() {
                        let v = home[d] + o[d];
                        if v < 0 || v >= side {
                            continue 'cells;
                        }
                        c = c * self.side + v as usize;
                    }
                    visit(c, out);
                }
            }
            begin = self.ring_end[r];
        }
    }
}

fn cell_id(y: &[f64], side: usize) -> usize {
    y.iter().rev().fold(0usize, |acc, &v| {
        acc * side + ((v * side as f64) as usize).min(side - 1)
    })
}

fn box_distance(space: &GroundSpace, x: &[f64], bbox: &[f64]) -> f64 {
    let gap = |d: usize| (bbox[2 * d] - x[d]).max(x[d] - bbox[2 * d + 1]).max(0.0);
    match space.norm {
        Norm::LInf => (0..x.len()).map(gap).fold(0.0, f64::max),
        Norm::L2Scaled => ((0..x.len()).map(|d| gap(d) * gap(d)).sum::<f64>() / x.len() as f64).sqrt(),
    }
}

/// Scaled `d^p`, shrunk so that rounding never excludes a qualifying pair.
fn lower_scaled(d: f64, p: f64) -> i64 {
    let d = (d * (1.0 - 1e-12) - 1e-15).max(0.0);
    let c = if p == 1.0 { d } else { d.powf(p) };
    (super::exact::scaled(c) - 1).max(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn scan_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (m, norm) in [
            (1, Norm::LInf),
            (2, Norm::LInf),
            (3, Norm::L2Scaled),
            (5, Norm::L2Scaled),
        ] {
            let space = GroundSpace::new(m, norm).unwrap();
            let n = 300;
            let nu = DiscreteMeasure::uniform(m, (0..n * m).map(|_| rng.random::<f64>()).collect()).unwrap();
            let pi: Vec<i64> = (0..n).map(|_| rng.random_range(-(1i64 << 30)..(1i64 << 30))).collect();
            let mut grid = TargetGrid::new(&space, &nu);
            grid.set_potentials(&pi);
            let mut out = Vec::new();
            for p in [1.0, 2.0] {
                for _ in 0..50 {
                    let x: Vec<f64> = (0..m).map(|_| rng.random()).collect();
                    let bound = rng.random_range(0..(1i64 << 32));
                    grid.scan(&space, &nu, p, &x, &pi, 1, 4, bound, &mut out);
                    let mut all: Vec<(i64, u32)> = (0..n)
                        .map(|j| {
                            (
                                super::super::exact::scaled(space.cost(&x, nu.atom(j), p)) + pi[j],
                                j as u32,
                            )
                        })
                        .filter(|e| e.0 < bound)
                        .collect();
                    all.sort();
                    all.truncate(4);
                    let got: Vec<i64> = out.iter().map(|e| e.0).collect();
                    let want: Vec<i64> = all.iter().map(|e| e.0).collect();
                    assert_eq!(got, want);
                }
            }
        }
    }
}
