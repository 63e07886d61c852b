//! Lloyd's algorithm with k-means++ seeding, producing a weighted `k`-point
//! measure: each centre carries the mass of its cluster.

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::ground::{DiscreteMeasure, GroundSpace, Norm, Rng};
use crate::transport::TargetGrid;

use super::config::KMeansOptions;

/// Grid-accelerated assignment pays off from this many centres on.
const GRID_MIN_CENTERS: usize = 64;
const GRID_MAX_DIM: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct Quantizer {
    /// Centres with their cluster masses; empty clusters are dropped.
    pub measure: DiscreteMeasure,
    /// `Σ_i w_i |x_i - c(i)|²` (Euclidean).
    pub inertia: f64,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Best of `opts.seedings` runs of `opts.iterations` Lloyd steps.
pub fn kmeans(data: &DiscreteMeasure, k: usize, opts: &KMeansOptions, rng: &mut Rng) -> Result<Quantizer> {
    if k == 0 || k > data.len() {
        return Err(Error::input(format!(
            "k-means needs 1 <= k <= {} (the data size), got {k}",
            data.len()
        )));
    }
    let mut best: Option<(Vec<f64>, Vec<usize>, f64)> = None;
    for _ in 0..opts.seedings.max(1) {
        let mut centers = seed_plus_plus(data, k, rng);
        let mut assign = vec![usize::MAX; data.len()];
        for _ in 0..opts.iterations {
            let changed = assign_all(data, &centers, &mut assign);
            update_centers(data, &assign, &mut centers);
            if !changed {
                break;
            }
        }
        assign_all(data, &centers, &mut assign);
        let inertia = inertia(data, &centers, &assign);
        if best.as_ref().is_none_or(|b| inertia < b.2) {
            best = Some((centers, assign, inertia));
        }
    }
    let (centers, assign, inertia) = best.expect("at least one seeding");
    let m = data.dim();
    let mut mass = vec![0.0; k];
    for (i, &c) in assign.iter().enumerate() {
        mass[c] += data.weight(i);
    }
    let (mut coords, mut weights) = (Vec::new(), Vec::new());
    for c in 0..k {
        if mass[c] > 0.0 {
            coords.extend_from_slice(&centers[c * m..(c + 1) * m]);
            weights.push(mass[c]);
        }
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    Ok(Quantizer {
        measure: DiscreteMeasure::new(m, coords, weights)?,
        inertia,
    })
}

/// k-means++: each new centre is drawn with probability proportional to
/// weight times squared distance to the chosen ones.
fn seed_plus_plus(data: &DiscreteMeasure, k: usize, rng: &mut Rng) -> Vec<f64> {
    let m = data.dim();
    let n = data.len();
    let draw = |rng: &mut Rng, score: &dyn Fn(usize) -> f64, total: f64| -> usize {
        let mut u = rng.random::<f64>() * total;
        for i in 0..n {
            u -= score(i);
            if u < 0.0 {
                return i;
            }
        }
        (0..n).rev().find(|&i| score(i) > 0.0).unwrap_or(n - 1)
    };
    let first = draw(rng, &|i| data.weight(i), 1.0);
    let mut centers = data.atom(first).to_vec();
    let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(data.atom(i), data.atom(first))).collect();
    while centers.len() < k * m {
        let total: f64 = (0..n).map(|i| data.weight(i) * d2[i]).sum();
        let next = if total > 0.0 {
            draw(rng, &|i| data.weight(i) * d2[i], total)
        } else {
            rng.random_range(0..n)
        };
        let c = data.atom(next).to_vec();
        for i in 0..n {
            d2[i] = d2[i].min(sq_dist(data.atom(i), &c));
        }
        centers.extend(c);
    }
    centers
}

/// Nearest centre per point; returns whether any assignment changed.
fn assign_all(data: &DiscreteMeasure, centers: &[f64], assign: &mut [usize]) -> bool {
    let m = data.dim();
    let k = centers.len() / m;
    let mut changed = false;
    let mut set = |i: usize, c: usize| {
        if assign[i] != c {
            assign[i] = c;
            changed = true;
        }
    };
    if k >= GRID_MIN_CENTERS && m <= GRID_MAX_DIM {
        // Scaled Euclidean with p = 2 orders centres like squared distance.
        let space = GroundSpace {
            dim: m,
            norm: Norm::L2Scaled,
        };
        let cm = DiscreteMeasure::uniform(m, centers.to_vec()).expect("centres lie in the cube");
        let mut grid = TargetGrid::new(&space, &cm);
        let zero = vec![0i64; k];
        grid.set_potentials(&zero);
        let mut out = Vec::with_capacity(1);
        for i in 0..data.len() {
            grid.scan(&space, &cm, 2.0, data.atom(i), &zero, 1, 1, i64::MAX, &mut out);
            set(i, out[0].1 as usize);
        }
    } else {
        for i in 0..data.len() {
            let x = data.atom(i);
            let c = (0..k)
                .map(|c| (sq_dist(x, &centers[c * m..(c + 1) * m]), c))
                .fold((f64::INFINITY, 0), |a, b| if b.0 < a.0 { b } else { a })
                .1;
            set(i, c);
        }
    }
    changed
}

/// Weighted means; an empty cluster keeps its centre.
fn update_centers(data: &DiscreteMeasure, assign: &[usize], centers: &mut [f64]) {
    let m = data.dim();
    let k = centers.len() / m;
    let mut sum = vec![0.0; k * m];
    let mut mass = vec![0.0; k];
    for (i, &c) in assign.iter().enumerate() {
        let w = data.weight(i);
        mass[c] += w;
        for (s, x) in sum[c * m..(c + 1) * m].iter_mut().zip(data.atom(i)) {
            *s += w * x;
        }
    }
    for c in 0..k {
        if mass[c] > 0.0 {
            for d in 0..m {
                centers[c * m + d] = (sum[c * m + d] / mass[c]).clamp(0.0, 1.0);
            }
        }
    }
}

fn inertia(data: &DiscreteMeasure, centers: &[f64], assign: &[usize]) -> f64 {
    let m = data.dim();
    assign
        .iter()
        .enumerate()
        .map(|(i, &c)| data.weight(i) * sq_dist(data.atom(i), &centers[c * m..(c + 1) * m]))
        .sum()
}
