//! Nested partitions of (part of) the unit cube.
//!
//! Two layouts share one interface. A grid partition is implicit: level-`k`
//! cells are the half-open boxes of side `b^{-k}`, closed on the upper
//! ambient boundary, identified by their integer coordinates read in base
//! `b^k` with axis 0 least significant. A covering partition is explicit:
//! every cell is a union of raster boxes of side `3^{-(k*+1)}`, built from
//! ball coverings by first-fit subtraction.

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground::{GroundSpace, Norm};

/// Slack for float comparisons of ball membership.
const BALL_TOL: f64 = 1e-12;

/// Raster boxes a covering partition may hold.
const MAX_RASTER_BOXES: usize = 1 << 22;

/// Largest `b^k` kept exact in a double, so box boundaries are exact ratios.
const MAX_SIDE: f64 = 9_007_199_254_740_992.0; // 2^53

/// A closed ball `{x : D(x, center) <= diameter / 2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub diameter: f64,
}

impl Ball {
    pub fn contains(&self, space: &GroundSpace, x: &[f64]) -> bool {
        space.dist(&self.center, x) <= self.diameter / 2.0 + BALL_TOL
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSummary {
    pub level: usize,
    pub cells: u64,
    pub max_diameter: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DyadicPartition {
    space: GroundSpace,
    depth: usize,
    delta: f64,
    layout: Layout,
}

#[derive(Debug, Clone, PartialEq)]
enum Layout {
    Grid { base: u32 },
    Raster(Raster),
}

#[derive(Debug, Clone, PartialEq)]
struct Raster {
    /// Raster boxes have side `3^{-resolution}`.
    resolution: u32,
    index: HashMap<Vec<u32>, u32>,
    boxes: Vec<Vec<u32>>,
    /// Indexed `[level - 1][box]`.
    box_cell: Vec<Vec<u32>>,
    /// Indexed `[level - 1][cell]`; empty at level 1.
    parents: Vec<Vec<u32>>,
    diameters: Vec<Vec<f64>>,
}

/// Integer coordinate of `x` on a grid of `side` boxes per axis, with the
/// upper boundary folded into the last box. Exact against the boundaries
/// `c / side`, which are correctly rounded ratios of exact integers.
fn grid_coord(x: f64, side: f64) -> u64 {
    let mut c = (x * side).floor().clamp(0.0, side - 1.0);
    if c > 0.0 && x < c / side {
        c -= 1.0;
    } else if c < side - 1.0 && x >= (c + 1.0) / side {
        c += 1.0;
    }
    c as u64
}

fn check_point(space: &GroundSpace, x: &[f64]) -> Result<()> {
    if x.len() != space.dim {
        return Err(Error::input(format!(
            "point of length {} in a {}-dimensional partition",
            x.len(),
            space.dim
        )));
    }
    if let Some(v) = x.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::input(format!("coordinate {v} outside [0,1]")));
    }
    Ok(())
}

impl DyadicPartition {
    /// Grid partition with parameter `1/base` and levels `1..=depth`.
    pub fn standard(space: &GroundSpace, base: u32, depth: usize) -> Result<Self> {
        if !(base == 2 || base == 3) {
            return Err(Error::config(format!("partition base must be 2 or 3, got {base}")));
        }
        if depth == 0 {
            return Err(Error::config("partition depth must be at least 1"));
        }
        let bits = space.dim as f64 * depth as f64 * (base as f64).log2();
        if bits >= 64.0 || (base as f64).powi(depth as i32) > MAX_SIDE {
            return Err(Error::config(format!(
                "{base}^({}*{depth}) cells do not fit a 64-bit cell index",
                space.dim
            )));
        }
        Ok(Self {
            space: *space,
            depth,
            delta: 1.0 / base as f64,
            layout: Layout::Grid { base },
        })
    }

    pub fn space(&self) -> &GroundSpace {
        &self.space
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Grid base, or `None` for a covering partition.
    pub fn base(&self) -> Option<u32> {
        match self.layout {
            Layout::Grid { base } => Some(base),
            Layout::Raster(_) => None,
        }
    }

    fn check_level(&self, level: usize) -> Result<()> {
        if level == 0 || level > self.depth {
            return Err(Error::input(format!("level {level} outside 1..={}", self.depth)));
        }
        Ok(())
    }

    /// Number of cells at `level`.
    pub fn cell_count(&self, level: usize) -> u64 {
        match &self.layout {
            Layout::Grid { base } => (*base as u64).pow((level * self.space.dim) as u32),
            Layout::Raster(r) => r.diameters[level - 1].len() as u64,
        }
    }

    /// The cell holding `x` at `level`.
    pub fn locate(&self, x: &[f64], level: usize) -> Result<u64> {
        self.check_level(level)?;
        check_point(&self.space, x)?;
        match &self.layout {
            Layout::Grid { base } => {
                let side = (*base as f64).powi(level as i32);
                let s = side as u64;
                Ok(x.iter().rev().fold(0u64, |acc, &v| acc * s + grid_coord(v, side)))
            }
            Layout::Raster(r) => {
                let b = r
                    .locate_box(x)
                    .ok_or_else(|| Error::input(format!("point {x:?} lies outside the covered region")))?;
                Ok(r.box_cell[level - 1][b as usize] as u64)
            }
        }
    }

    /// Cells of `x` at levels `1..=depth`.
    pub fn locate_all(&self, x: &[f64]) -> Result<Vec<u64>> {
        check_point(&self.space, x)?;
        match &self.layout {
            Layout::Grid { .. } => (1..=self.depth).map(|k| self.locate(x, k)).collect(),
            Layout::Raster(r) => {
                let b = r
                    .locate_box(x)
                    .ok_or_else(|| Error::input(format!("point {x:?} lies outside the covered region")))?
                    as usize;
                Ok(r.box_cell.iter().map(|cells| cells[b] as u64).collect())
            }
        }
    }

    /// Parent of a cell at `level >= 2`; `None` at level 1.
    pub fn parent(&self, level: usize, cell: u64) -> Option<u64> {
        if level <= 1 || level > self.depth {
            return None;
        }
        match &self.layout {
            Layout::Grid { base } => {
                let b = *base as u64;
                let side = b.pow(level as u32);
                let up = side / b;
                let mut rest = cell;
                let mut id = 0u64;
                let mut scale = 1u64;
                for _ in 0..self.space.dim {
                    id += (rest % side) / b * scale;
                    rest /= side;
                    scale *= up;
                }
                Some(id)
            }
            Layout::Raster(r) => Some(r.parents[level - 1][cell as usize] as u64),
        }
    }

    /// Recorded upper bound on the diameter of a cell.
    pub fn diameter_bound(&self, level: usize, cell: u64) -> f64 {
        match &self.layout {
            Layout::Grid { .. } => self.delta.powi(level as i32),
            Layout::Raster(r) => r.diameters[level - 1][cell as usize],
        }
    }

    /// Axis-aligned bounding box `[(lo, hi); m]` of a cell's closure.
    pub fn cell_box(&self, level: usize, cell: u64) -> Vec<(f64, f64)> {
        match &self.layout {
            Layout::Grid { base } => {
                let side = (*base as f64).powi(level as i32);
                let s = side as u64;
                let mut rest = cell;
                (0..self.space.dim)
                    .map(|_| {
                        let c = (rest % s) as f64;
                        rest /= s;
                        (c / side, (c + 1.0) / side)
                    })
                    .collect()
            }
            Layout::Raster(r) => {
                let h = 3f64.powi(-(r.resolution as i32));
                let mut bb = vec![(f64::INFINITY, f64::NEG_INFINITY); self.space.dim];
                for (b, coords) in r.boxes.iter().enumerate() {
                    if r.box_cell[level - 1][b] as u64 == cell {
                        for (d, &c) in coords.iter().enumerate() {
                            bb[d].0 = bb[d].0.min(c as f64 * h);
                            bb[d].1 = bb[d].1.max((c as f64 + 1.0) * h);
                        }
                    }
                }
                bb
            }
        }
    }

    /// Whether `x` lies in the cell, by explicit boundary comparison.
    pub fn contains(&self, level: usize, cell: u64, x: &[f64]) -> bool {
        match &self.layout {
            Layout::Grid { .. } => self
                .cell_box(level, cell)
                .iter()
                .zip(x)
                .all(|(&(lo, hi), &v)| lo <= v && (v < hi || (hi == 1.0 && v == 1.0))),
            Layout::Raster(_) => self.locate(x, level).is_ok_and(|c| c == cell),
        }
    }

    /// Raster boxes of a covering partition as `(lo, hi)` corners, for
    /// sampling points of the covered region.
    pub fn raster_boxes(&self) -> Option<Vec<Vec<(f64, f64)>>> {
        match &self.layout {
            Layout::Grid { .. } => None,
            Layout::Raster(r) => {
                let h = 3f64.powi(-(r.resolution as i32));
                Some(
                    r.boxes
                        .iter()
                        .map(|c| {
                            c.iter()
                                .map(|&v| (v as f64 * h, ((v as f64 + 1.0) * h).min(1.0)))
                                .collect()
                        })
                        .collect(),
                )
            }
        }
    }

    pub fn summary(&self) -> Vec<LevelSummary> {
        (1..=self.depth)
            .map(|k| LevelSummary {
                level: k,
                cells: self.cell_count(k),
                max_diameter: match &self.layout {
                    Layout::Grid { .. } => self.delta.powi(k as i32),
                    Layout::Raster(r) => r.diameters[k - 1].iter().copied().fold(0.0, f64::max),
                },
            })
            .collect()
    }

    pub fn write_summary_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in self.summary() {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Partition with parameter `1/3` driven by one ball covering of `points`
    /// per level: `coverings[k-1]` holds balls of diameter at most
    /// `3^{-(k+1)}`. Level `k*` assigns each raster box to the first ball it
    /// meets; level `k` merges the level-`k+1` cells meeting each ball in
    /// turn. Cells meeting no ball stay alone; they hold no covered point.
    pub fn from_coverings(space: &GroundSpace, points: &[f64], coverings: &[Vec<Ball>]) -> Result<Self> {
        let m = space.dim;
        let depth = coverings.len();
        if depth == 0 {
            return Err(Error::config("at least one covering level is required"));
        }
        if points.is_empty() || !points.len().is_multiple_of(m) {
            return Err(Error::input("points must be a nonempty flat list"));
        }
        let resolution = depth as u32 + 1;
        if resolution > 20 {
            return Err(Error::config(format!("covering depth {depth} exceeds 19")));
        }
        for (k0, balls) in coverings.iter().enumerate() {
            let limit = 3f64.powi(-(k0 as i32 + 2));
            for b in balls {
                if b.center.len() != m || !(b.diameter > 0.0) || b.diameter > limit * (1.0 + 1e-12) {
                    return Err(Error::input(format!(
                        "level {} ball needs dimension {m} and diameter in (0, {limit}]",
                        k0 + 1
                    )));
                }
            }
            for x in points.chunks_exact(m) {
                check_point(space, x)?;
                if !balls.iter().any(|b| b.contains(space, x)) {
                    return Err(Error::input(format!("covering at level {} misses point {x:?}", k0 + 1)));
                }
            }
        }

        let side = 3u32.pow(resolution);
        let h = 1.0 / side as f64;
        let mut raster = Raster {
            resolution,
            index: HashMap::new(),
            boxes: Vec::new(),
            box_cell: vec![Vec::new(); depth],
            parents: vec![Vec::new(); depth],
            diameters: vec![Vec::new(); depth],
        };

        // Deepest level: first-fit assignment of raster boxes to balls.
        let mut deep_cell: Vec<u32> = Vec::new();
        let mut cells = 0u32;
        for ball in &coverings[depth - 1] {
            let mut used = false;
            for coords in boxes_meeting(space, ball, side)? {
                if raster.index.contains_key(&coords) {
                    continue;
                }
                if raster.boxes.len() >= MAX_RASTER_BOXES {
                    return Err(Error::capacity("covering partition needs too many raster boxes"));
                }
                raster.index.insert(coords.clone(), raster.boxes.len() as u32);
                raster.boxes.push(coords);
                deep_cell.push(cells);
                used = true;
            }
            cells += used as u32;
        }
        raster.box_cell[depth - 1] = deep_cell;

        // Coarser levels: merge finer cells meeting each ball.
        for k in (1..depth).rev() {
            let finer = &raster.box_cell[k];
            let n_finer = finer.iter().map(|&c| c + 1).max().unwrap_or(0) as usize;
            let mut assign = vec![u32::MAX; n_finer];
            let mut next = 0u32;
            for ball in &coverings[k - 1] {
                let mut hit = Vec::new();
                for coords in boxes_meeting(space, ball, side)? {
                    if let Some(&b) = raster.index.get(&coords) {
                        let f = finer[b as usize] as usize;
                        if assign[f] == u32::MAX {
                            hit.push(f);
                        }
                    }
                }
                hit.sort_unstable();
                hit.dedup();
                if !hit.is_empty() {
                    for f in hit {
                        assign[f] = next;
                    }
                    next += 1;
                }
            }
            for a in assign.iter_mut().filter(|a| **a == u32::MAX) {
                *a = next;
                next += 1;
            }
            raster.box_cell[k - 1] = finer.iter().map(|&f| assign[f as usize]).collect();
            raster.parents[k] = assign;
        }

        for k in 0..depth {
            let count = raster.box_cell[k].iter().map(|&c| c + 1).max().unwrap_or(0) as usize;
            let mut lo = vec![u32::MAX; count * m];
            let mut hi = vec![0u32; count * m];
            for (b, coords) in raster.boxes.iter().enumerate() {
                let c = raster.box_cell[k][b] as usize;
                for (d, &v) in coords.iter().enumerate() {
                    lo[c * m + d] = lo[c * m + d].min(v);
                    hi[c * m + d] = hi[c * m + d].max(v + 1);
                }
            }
            let proof_bound = 3f64.powi(-(k as i32 + 1));
            raster.diameters[k] = (0..count)
                .map(|c| {
                    let span: Vec<f64> = (0..m).map(|d| (hi[c * m + d] - lo[c * m + d]) as f64 * h).collect();
                    let bbox = match space.norm {
                        Norm::LInf => span.iter().copied().fold(0.0, f64::max),
                        Norm::L2Scaled => (span.iter().map(|s| s * s).sum::<f64>() / m as f64).sqrt(),
                    };
                    bbox.min(proof_bound)
                })
                .collect();
        }

        Ok(Self {
            space: *space,
            depth,
            delta: 1.0 / 3.0,
            layout: Layout::Raster(raster),
        })
    }
}

impl Raster {
    fn locate_box(&self, x: &[f64]) -> Option<u32> {
        let side = 3f64.powi(self.resolution as i32);
        let coords: Vec<u32> = x.iter().map(|&v| grid_coord(v, side) as u32).collect();
        self.index.get(&coords).copied()
    }
}

/// Raster boxes whose closure meets the closed ball.
fn boxes_meeting(space: &GroundSpace, ball: &Ball, side: u32) -> Result<Vec<Vec<u32>>> {
    let m = space.dim;
    let h = 1.0 / side as f64;
    let r = ball.diameter / 2.0 + BALL_TOL;
    let axis_r = r * space.scale();
    let ranges: Vec<(u32, u32)> = ball
        .center
        .iter()
        .map(|&c| {
            let lo = ((c - axis_r) / h).floor().max(0.0) as u32;
            let hi = (((c + axis_r) / h).floor() as u32).min(side - 1);
            (lo.min(side - 1), hi)
        })
        .collect();
    let total: f64 = ranges.iter().map(|&(a, b)| (b - a + 1) as f64).product();
    if total > MAX_RASTER_BOXES as f64 {
        return Err(Error::capacity("ball spans too many raster boxes"));
    }
    let mut out = Vec::new();
    let mut cur: Vec<u32> = ranges.iter().map(|r| r.0).collect();
    loop {
        let gap = |d: usize| {
            let lo = cur[d] as f64 * h;
            (lo - ball.center[d]).max(ball.center[d] - (lo + h)).max(0.0)
        };
        let dist = match space.norm {
            Norm::LInf => (0..m).map(gap).fold(0.0, f64::max),
            Norm::L2Scaled => ((0..m).map(|d| gap(d) * gap(d)).sum::<f64>() / m as f64).sqrt(),
        };
        if dist <= r {
            out.push(cur.clone());
        }
        let mut d = 0;
        while d < m {
            if cur[d] < ranges[d].1 {
                cur[d] += 1;
                break;
            }
            cur[d] = ranges[d].0;
            d += 1;
        }
        if d == m {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unit_interval_halves() {
        let p = DyadicPartition::standard(&GroundSpace::linf(1), 2, 1).unwrap();
        assert_eq!(p.cell_count(1), 2);
        assert_eq!(p.locate(&[0.0], 1).unwrap(), 0);
        assert_eq!(p.locate(&[0.4999], 1).unwrap(), 0);
        assert_eq!(p.locate(&[0.5], 1).unwrap(), 1);
        assert_eq!(p.locate(&[1.0], 1).unwrap(), 1);
    }

    #[test]
    fn ternary_square_nesting() {
        let p = DyadicPartition::standard(&GroundSpace::linf(2), 3, 2).unwrap();
        assert_eq!(p.cell_count(1), 9);
        assert_eq!(p.cell_count(2), 81);
        for c in 0..81 {
            let parent = p.parent(2, c).unwrap();
            let (inner, outer) = (p.cell_box(2, c), p.cell_box(1, parent));
            for (a, b) in inner.iter().zip(&outer) {
                assert!(b.0 <= a.0 && a.1 <= b.1);
            }
        }
    }

    #[test]
    fn upper_corner_has_one_cell_per_level() {
        let p = DyadicPartition::standard(&GroundSpace::linf(3), 3, 4).unwrap();
        for k in 1..=4 {
            let c = p.locate(&[1.0; 3], k).unwrap();
            let holders = (0..p.cell_count(k)).filter(|&q| p.contains(k, q, &[1.0; 3])).count();
            assert_eq!(holders, 1);
            assert!(p.contains(k, c, &[1.0; 3]));
        }
    }

    #[test]
    fn lookup_agrees_with_containment() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (m, base, depth) in [(1, 3, 12), (2, 2, 9), (3, 3, 5)] {
            let p = DyadicPartition::standard(&GroundSpace::linf(m), base, depth).unwrap();
            let side = (base as f64).powi(depth as i32);
            for i in 0..100_000 {
                // Every tenth point sits on a grid boundary.
                let x: Vec<f64> = (0..m)
                    .map(|_| {
                        if i % 10 == 0 {
                            (rng.random_range(0..=side as u64) as f64 / side).min(1.0)
                        } else {
                            rng.random()
                        }
                    })
                    .collect();
                let k = 1 + i % depth;
                let c = p.locate(&x, k).unwrap();
                assert!(p.contains(k, c, &x), "m={m} b={base} k={k} x={x:?}");
                if k > 1 {
                    assert_eq!(p.parent(k, c).unwrap(), p.locate(&x, k - 1).unwrap());
                }
            }
        }
    }

    #[test]
    fn rejects_overflow_and_bad_base() {
        assert!(DyadicPartition::standard(&GroundSpace::linf(8), 3, 6).is_err());
        assert!(DyadicPartition::standard(&GroundSpace::linf(1), 4, 2).is_err());
        assert!(DyadicPartition::standard(&GroundSpace::linf(1), 2, 0).is_err());
    }

    fn ball(center: &[f64], k: usize) -> Ball {
        Ball {
            center: center.to_vec(),
            diameter: 3f64.powi(-(k as i32 + 1)),
        }
    }

    #[test]
    fn single_ball_gives_one_cell_per_level() {
        let space = GroundSpace::linf(2);
        let pts = [0.5, 0.5, 0.501, 0.499];
        let cov: Vec<Vec<Ball>> = (1..=3).map(|k| vec![ball(&[0.5, 0.5], k)]).collect();
        let p = DyadicPartition::from_coverings(&space, &pts, &cov).unwrap();
        for k in 1..=3 {
            assert_eq!(p.cell_count(k), 1);
            if k > 1 {
                assert_eq!(p.parent(k, 0), Some(0));
            }
        }
    }

    #[test]
    fn two_endpoints_give_two_cells() {
        let space = GroundSpace::linf(1);
        let cov: Vec<Vec<Ball>> = (1..=4).map(|k| vec![ball(&[0.0], k), ball(&[1.0], k)]).collect();
        let p = DyadicPartition::from_coverings(&space, &[0.0, 1.0], &cov).unwrap();
        for k in 1..=4 {
            assert_eq!(p.cell_count(k), 2);
            assert_ne!(p.locate(&[0.0], k).unwrap(), p.locate(&[1.0], k).unwrap());
        }
    }

    #[test]
    fn missed_point_is_reported() {
        let space = GroundSpace::linf(1);
        let cov = vec![vec![ball(&[0.0], 1)]];
        let err = DyadicPartition::from_coverings(&space, &[0.0, 0.9], &cov).unwrap_err();
        assert!(err.to_string().contains("0.9"), "{err}");
    }

    /// Greedy covering by balls centred at data points, in point order.
    fn greedy(space: &GroundSpace, pts: &[f64], k: usize) -> Vec<Ball> {
        let m = space.dim;
        let mut balls: Vec<Ball> = Vec::new();
        for x in pts.chunks_exact(m) {
            if !balls.iter().any(|b| b.contains(space, x)) {
                balls.push(ball(x, k));
            }
        }
        balls
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn covering_partition_is_dyadic(seed in any::<u64>(), m in 1usize..3, l2 in any::<bool>(), depth in 1usize..4) {
            let norm = if l2 { Norm::L2Scaled } else { Norm::LInf };
            let space = GroundSpace::new(m, norm).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pts: Vec<f64> = (0..30 * m).map(|_| rng.random()).collect();
            let cov: Vec<Vec<Ball>> = (1..=depth).map(|k| greedy(&space, &pts, k)).collect();
            let p = DyadicPartition::from_coverings(&space, &pts, &cov).unwrap();
            let boxes = p.raster_boxes().unwrap();
            // Sample points of the covered region; check nesting and diameters.
            let mut seen: Vec<HashMap<u64, Vec<Vec<f64>>>> = vec![HashMap::new(); depth];
            for b in &boxes {
                for _ in 0..4 {
                    let x: Vec<f64> = b.iter().map(|&(lo, hi)| lo + (hi - lo) * rng.random::<f64>() * 0.999_999).collect();
                    let cells = p.locate_all(&x).unwrap();
                    for k in 1..=depth {
                        if k > 1 {
                            prop_assert_eq!(p.parent(k, cells[k - 1]), Some(cells[k - 2]));
                        }
                        seen[k - 1].entry(cells[k - 1]).or_default().push(x.clone());
                    }
                }
            }
            for k in 1..=depth {
                for (&c, xs) in &seen[k - 1] {
                    let bound = p.diameter_bound(k, c);
                    prop_assert!(bound <= 3f64.powi(-(k as i32)) + 1e-12);
                    for a in xs {
                        for b in xs {
                            prop_assert!(space.dist(a, b) <= bound + 1e-9);
                        }
                    }
                }
                // Cells meeting the first j balls' points number at most j.
                let balls = &cov[k - 1];
                for j in 1..=balls.len() {
                    let mut hit: Vec<u64> = pts
                        .chunks_exact(m)
                        .filter(|x| balls[..j].iter().any(|b| b.contains(&space, x)))
                        .map(|x| p.locate(x, k).unwrap())
                        .collect();
                    hit.sort_unstable();
                    hit.dedup();
                    prop_assert!(hit.len() <= j);
                }
            }
        }
    }
}
