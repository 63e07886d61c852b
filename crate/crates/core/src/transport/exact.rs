//! Exact `W_p^p` between discrete measures by min-cost flow.
//!
//! Costs `D^p` are scaled by `2^32` and rounded; masses are made integral
//! (exactly for uniform measures, by largest-remainder rounding at `2^40`
//! otherwise). The reported value is recomputed in floating point from the
//! integral plan.
//!
//! With [`ArcSelection::Nearest`] the solver starts from nearest-neighbour
//! arcs and then prices every absent pair against the optimal potentials,
//! adding violated arcs until none remain. The result is optimal for the
//! dense problem; only the work is reduced.

use serde::{Deserialize, Serialize};

use super::auction::Auction;
use super::dual::{self, DualPotential};
use super::grid::TargetGrid;
use super::plan::{PlanEntry, TransportPlan};
use super::simplex::{NetworkSimplex, Outcome};
use crate::error::{Error, Result};
use crate::ground::{DiscreteMeasure, GroundSpace};

const COST_SCALE: f64 = 4_294_967_296.0; // 2^32
const MASS_SCALE: i64 = 1 << 40;
const MAX_UNIFORM_LCM: u64 = 1 << 50;
const MAX_PRICING_ROUNDS: usize = 1000;
/// The starting auction stops at ε = max arc cost / 2^shift.
const AUCTION_EPS_SHIFT: u32 = 12;
/// Times sources stranded by the starting auction get a further auction.
const AUCTION_RESCUE_ROUNDS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ArcSelection {
    /// Every source-target pair is an arc.
    #[default]
    Dense,
    /// `k` nearest targets per source, completed by pricing.
    Nearest { k: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Upper bound on arcs held by the solver.
    #[serde(default = "default_max_arcs")]
    pub max_arcs: usize,
    #[serde(default)]
    pub arcs: ArcSelection,
    /// Violated arcs added per source row in one pricing round.
    #[serde(default = "default_pricing_batch")]
    pub pricing_batch: usize,
    /// Whether to extract normalized dual potentials (quadratic extra work).
    #[serde(default = "default_true")]
    pub duals: bool,
}

fn default_max_arcs() -> usize {
    5000 * 5000
}

fn default_pricing_batch() -> usize {
    16
}

fn default_true() -> bool {
    true
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_arcs: default_max_arcs(),
            arcs: ArcSelection::Dense,
            pricing_batch: default_pricing_batch(),
            duals: true,
        }
    }
}

impl SolverOptions {
    pub fn nearest(k: usize) -> Self {
        Self {
            arcs: ArcSelection::Nearest { k },
            ..Self::default()
        }
    }

    pub fn without_duals(mut self) -> Self {
        self.duals = false;
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SolverStats {
    pub sources: usize,
    pub targets: usize,
    pub arcs: usize,
    /// Simplex pivots.
    pub iterations: u64,
    pub pricing_rounds: usize,
    pub mass_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactSolution {
    /// `W_p^p`.
    pub value: f64,
    pub p: f64,
    pub plan: TransportPlan,
    pub dual: Option<DualPotential>,
    /// `|primal - dual|` when duals were extracted.
    pub gap: Option<f64>,
    pub stats: SolverStats,
}

impl ExactSolution {
    /// `W_p`.
    pub fn distance(&self) -> f64 {
        self.value.max(0.0).powf(1.0 / self.p)
    }
}

#[inline]
pub(crate) fn scaled(c: f64) -> i64 {
    (c * COST_SCALE).round() as i64
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn round_to_total(w: &[f64], total: i64) -> Vec<i64> {
    let raw: Vec<f64> = w.iter().map(|x| x * total as f64).collect();
    let mut out: Vec<i64> = raw.iter().map(|x| x.floor() as i64).collect();
    let deficit = total - out.iter().sum::<i64>();
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = raw[a] - raw[a].floor();
        let fb = raw[b] - raw[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    if deficit >= 0 {
        for &i in order.iter().cycle().take(deficit as usize) {
            out[i] += 1;
        }
    } else {
        let mut left = -deficit;
        for &i in order.iter().rev() {
            if left == 0 {
                break;
            }
            if out[i] > 0 {
                out[i] -= 1;
                left -= 1;
            }
        }
    }
    out
}

/// Integral supplies for both sides and their common total.
fn integer_masses(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> (Vec<i64>, Vec<i64>, i64) {
    let (na, nb) = (mu.len() as u64, nu.len() as u64);
    if mu.is_uniform() && nu.is_uniform() {
        let l = na / gcd(na, nb) * nb;
        if l <= MAX_UNIFORM_LCM {
            let l = l as i64;
            return (vec![l / na as i64; na as usize], vec![l / nb as i64; nb as usize], l);
        }
    }
    (
        round_to_total(mu.weights(), MASS_SCALE),
        round_to_total(nu.weights(), MASS_SCALE),
        MASS_SCALE,
    )
}

fn validate(space: &GroundSpace, mu: &DiscreteMeasure, nu: &DiscreteMeasure, p: f64) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::input(format!("exponent p must be a finite real >= 1, got {p}")));
    }
    if mu.dim() != space.dim || nu.dim() != space.dim {
        return Err(Error::input(format!(
            "measures of dimension {} and {} in a space of dimension {}",
            mu.dim(),
            nu.dim(),
            space.dim
        )));
    }
    if mu.is_empty() || nu.is_empty() {
        return Err(Error::input("transport between empty measures"));
    }
    Ok(())
}

/// Sparse solve: `k` nearest targets per source, a starting basis over those
/// arcs, then rounds of exact pricing until no reduced cost is negative.
#[allow(clippy::too_many_arguments)]
fn solve_sparse(
    space: &GroundSpace,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    p: f64,
    supply: &[i64],
    k: usize,
    opts: &SolverOptions,
    arcs: &mut usize,
    rounds: &mut usize,
) -> Result<NetworkSimplex> {
    let (na, nb) = (mu.len(), nu.len());
    let count = |arcs: &mut usize, add: usize| -> Result<()> {
        *arcs += add;
        if *arcs > opts.max_arcs {
            return Err(Error::capacity(format!(
                "transport problem {na}x{nb} needs more than {} arcs",
                opts.max_arcs
            )));
        }
        Ok(())
    };
    let cost = |i: usize, j: usize| scaled(space.cost(mu.atom(i), nu.atom(j), p));
    let art_cost = (COST_SCALE as i64 + 1) * (na + nb + 1) as i64;
    let mut ns = NetworkSimplex::new(supply, art_cost);

    let mut grid = TargetGrid::new(space, nu);
    let zero = vec![0i64; nb];
    grid.set_potentials(&zero);
    let mut row = Vec::with_capacity(k.max(1));
    let mut initial = Vec::new();
    for i in 0..na {
        grid.scan(space, nu, p, mu.atom(i), &zero, 1, k.max(1), i64::MAX, &mut row);
        count(arcs, row.len())?;
        for &(c, j) in &row {
            initial.push((c, i, j));
            ns.add_arc(i, na + j as usize, c);
        }
    }

    let mut room: Vec<i64> = supply[na..].iter().map(|s| -s).collect();
    let mut placed = vec![false; na];
    let mut assigned = Vec::new();
    let mut next_arc = na + nb + initial.len();
    let unit = supply[0];
    if unit > 0 && supply[..na].iter().all(|&s| s == unit) && room.iter().all(|&r| r % unit == 0) {
        // Equal units: an auction over the nearest arcs gives a near-optimal
        // start. Sources it strands then bid, in a smaller auction, for their
        // nearest targets that still have room.
        let mut rows: Vec<Vec<(i64, u32)>> = vec![Vec::new(); na];
        let mut ids: Vec<Vec<usize>> = vec![Vec::new(); na];
        for (e, &(c, i, j)) in initial.iter().enumerate() {
            rows[i].push((c, j));
            ids[i].push(na + nb + e);
        }
        let mut stranded: Vec<usize> = (0..na).collect();
        for round in 0..=AUCTION_RESCUE_ROUNDS {
            if round > 0 {
                stranded.retain(|&i| !placed[i]);
                if stranded.is_empty() {
                    break;
                }
                let full: Vec<i64> = room.iter().map(|&r| if r > 0 { 0 } else { i64::MAX / 4 }).collect();
                grid.set_potentials(&full);
                for &i in &stranded {
                    grid.scan(space, nu, p, mu.atom(i), &full, 1, k.max(1), i64::MAX / 8, &mut row);
                    count(arcs, row.len())?;
                    rows[i].clear();
                    ids[i].clear();
                    for &(c, j) in &row {
                        ns.add_arc(i, na + j as usize, c);
                        rows[i].push((c, j));
                        ids[i].push(next_arc);
                        next_arc += 1;
                    }
                }
            }
            let sub: Vec<Vec<(i64, u32)>> = stranded.iter().map(|&i| std::mem::take(&mut rows[i])).collect();
            let caps: Vec<usize> = room.iter().map(|&r| (r / unit).max(0) as usize).collect();
            let max_cost = sub.iter().flatten().map(|a| a.0).max().unwrap_or(0);
            let mut auction = Auction::new(&caps, sub.len(), max_cost);
            auction.run(&sub, max_cost / 4, max_cost >> AUCTION_EPS_SHIFT);
            for ((&i, c), r) in stranded.iter().zip(auction.choice()).zip(sub) {
                if let Some(pos) = *c {
                    placed[i] = true;
                    room[r[pos].1 as usize] -= unit;
                    assigned.push(ids[i][pos]);
                }
                rows[i] = r;
            }
        }
    } else {
        // Greedy by cost: a source goes whole to the first target with room.
        let mut order: Vec<usize> = (0..initial.len()).collect();
        order.sort_by_key(|&e| initial[e].0);
        for e in order {
            let (_, i, j) = initial[e];
            let j = j as usize;
            if !placed[i] && supply[i] > 0 && room[j] >= supply[i] {
                placed[i] = true;
                room[j] -= supply[i];
                assigned.push(na + nb + e);
            }
        }
    }
    // Leftover sources go to the cheapest target with room anywhere, so the
    // start is feasible whenever whole placement is possible.
    for i in 0..na {
        if placed[i] || supply[i] <= 0 {
            continue;
        }
        let best = (0..nb).filter(|&j| room[j] >= supply[i]).map(|j| (cost(i, j), j)).min();
        if let Some((c, j)) = best {
            count(arcs, 1)?;
            ns.add_arc(i, na + j, c);
            room[j] -= supply[i];
            assigned.push(next_arc);
            next_arc += 1;
        }
    }
    ns.warm_start(supply, &assigned);

    let batch = opts.pricing_batch.max(1);
    let mut pending: Vec<(usize, u32)> = Vec::new();
    loop {
        if ns.run() != Outcome::Optimal {
            return Err(Error::Solver("network simplex reported an unbounded problem".into()));
        }
        let pi: Vec<i64> = ns.potentials().iter().map(|v| -v).collect();
        grid.set_potentials(&pi[na..]);
        pending.clear();
        for i in 0..na {
            grid.scan(space, nu, p, mu.atom(i), &pi[na..], 1, batch, pi[i], &mut row);
            pending.extend(row.iter().map(|&(_, j)| (i, j)));
        }
        if pending.is_empty() {
            return Ok(ns);
        }
        *rounds += 1;
        if *rounds > MAX_PRICING_ROUNDS {
            return Err(Error::Solver("pricing did not converge".into()));
        }
        count(arcs, pending.len())?;
        for &(i, j) in &pending {
            ns.add_arc(i, na + j as usize, cost(i, j as usize));
        }
    }
}

/// Exact `W_p^p(μ, ν)` with the dense default options.
pub fn exact_wp(space: &GroundSpace, mu: &DiscreteMeasure, nu: &DiscreteMeasure, p: f64) -> Result<ExactSolution> {
    exact_wp_with(space, mu, nu, p, &SolverOptions::default())
}

pub fn exact_wp_with(
    space: &GroundSpace,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    p: f64,
    opts: &SolverOptions,
) -> Result<ExactSolution> {
    validate(space, mu, nu, p)?;
    let (na, nb) = (mu.len(), nu.len());
    let (supply_a, supply_b, total) = integer_masses(mu, nu);

    let cost = |i: usize, j: usize| space.cost(mu.atom(i), nu.atom(j), p);
    let mut arcs = 0usize;

    let mut rounds = 0usize;
    let (flows, potentials, iterations): (Vec<(usize, usize, i64)>, Vec<i64>, u64) = match opts.arcs {
        ArcSelection::Dense => {
            if na.saturating_mul(nb) > opts.max_arcs {
                return Err(Error::capacity(format!(
                    "dense transport problem {na}x{nb} exceeds the limit of {} arcs",
                    opts.max_arcs
                )));
            }
            let mut supply = supply_a;
            supply.extend(supply_b.iter().map(|b| -b));
            let art_cost = (COST_SCALE as i64 + 1) * (na + nb + 1) as i64;
            let mut ns = NetworkSimplex::new(&supply, art_cost);
            arcs = na * nb;
            for i in 0..na {
                for j in 0..nb {
                    ns.add_arc(i, na + j, scaled(cost(i, j)));
                }
            }
            if ns.run() != Outcome::Optimal {
                return Err(Error::Solver("network simplex reported an unbounded problem".into()));
            }
            if ns.artificial_flow() != 0 {
                return Err(Error::Solver("no feasible flow on the chosen arcs".into()));
            }
            let flows = ns.real_flows().map(|(u, v, f)| (u, v - na, f)).collect();
            (flows, ns.potentials().to_vec(), ns.pivots)
        }
        ArcSelection::Nearest { k } => {
            let mut supply = supply_a;
            supply.extend(supply_b.iter().map(|b| -b));
            let ns = solve_sparse(space, mu, nu, p, &supply, k, opts, &mut arcs, &mut rounds)?;
            if ns.artificial_flow() != 0 {
                return Err(Error::Solver("no feasible flow on the chosen arcs".into()));
            }
            let flows = ns.real_flows().map(|(u, v, f)| (u, v - na, f)).collect();
            (flows, ns.potentials().to_vec(), ns.pivots)
        }
    };

    let inv = 1.0 / total as f64;
    let mut entries = Vec::new();
    let mut value = 0.0;
    for &(i, j, f) in &flows {
        if f > 0 {
            let mass = f as f64 * inv;
            value += mass * cost(i, j);
            entries.push(PlanEntry { i, j, mass });
        }
    }
    entries.sort_by_key(|e| (e.i, e.j));
    let plan = TransportPlan::new(na, nb, p, entries)?;

    let (dual, gap) = if opts.duals {
        let f: Vec<f64> = potentials[..na].iter().map(|&v| -(v as f64) / COST_SCALE).collect();
        let d = dual::normalize(space, &f, mu, nu, p);
        let gap = (value - d.value(mu, nu)).abs();
        (Some(d), Some(gap))
    } else {
        (None, None)
    };

    Ok(ExactSolution {
        value,
        p,
        plan,
        dual,
        gap,
        stats: SolverStats {
            sources: na,
            targets: nb,
            arcs,
            iterations,
            pricing_rounds: rounds,
            mass_scale: total as f64,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sorted_matching(a: &[f64], b: &[f64], p: f64) -> f64 {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        a.iter().zip(&b).map(|(x, y)| (x - y).abs().powf(p)).sum::<f64>() / a.len() as f64
    }

    #[test]
    fn identical_measures() {
        let s = GroundSpace::linf(2);
        let mu = DiscreteMeasure::uniform(2, vec![0.1, 0.2, 0.5, 0.5, 0.9, 0.0]).unwrap();
        let sol = exact_wp(&s, &mu, &mu, 2.0).unwrap();
        assert_eq!(sol.value, 0.0);
        assert!(sol.plan.marginal_error(&mu, &mu) < 1e-15);
        assert!(sol.gap.unwrap() < 1e-9);
    }

    #[test]
    fn two_diracs() {
        let s = GroundSpace::linf(1);
        let a = DiscreteMeasure::dirac(&[0.2]).unwrap();
        let b = DiscreteMeasure::dirac(&[0.7]).unwrap();
        let sol = exact_wp(&s, &a, &b, 2.0).unwrap();
        assert!((sol.value - 0.25).abs() < 1e-15);
        assert!((sol.distance() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn three_point_line() {
        let s = GroundSpace::linf(1);
        let a = DiscreteMeasure::uniform(1, vec![0.0, 0.4, 1.0]).unwrap();
        let b = DiscreteMeasure::uniform(1, vec![0.1, 0.5, 0.9]).unwrap();
        let sol = exact_wp(&s, &a, &b, 1.0).unwrap();
        assert!((sol.value - 0.1).abs() < 1e-12);
        assert!(sol.gap.unwrap() < 1e-9);
    }

    #[test]
    fn unequal_counts_and_weights() {
        let s = GroundSpace::linf(1);
        let a = DiscreteMeasure::new(1, vec![0.0, 1.0], vec![0.3, 0.7]).unwrap();
        let b = DiscreteMeasure::dirac(&[0.5]).unwrap();
        let sol = exact_wp(&s, &a, &b, 1.0).unwrap();
        assert!((sol.value - 0.5).abs() < 1e-12);
        assert!(sol.plan.marginal_error(&a, &b) < 1e-12);
        // The unique coupling with a Dirac is the product.
        let a = DiscreteMeasure::new(1, vec![0.0, 0.6, 1.0], vec![0.2, 0.3, 0.5]).unwrap();
        let sol = exact_wp(&s, &a, &b, 2.0).unwrap();
        let want = 0.2 * 0.25 + 0.3 * 0.01 + 0.5 * 0.25;
        assert!((sol.value - want).abs() < 1e-12);
    }

    #[test]
    fn capacity_limit() {
        let s = GroundSpace::linf(1);
        let a = DiscreteMeasure::uniform(1, vec![0.1; 10]).unwrap();
        let opts = SolverOptions {
            max_arcs: 50,
            ..SolverOptions::default()
        };
        let e = exact_wp_with(&s, &a, &a, 1.0, &opts).unwrap_err();
        assert_eq!(e.exit_code(), 3);
    }

    #[test]
    fn rejects_bad_exponent() {
        let s = GroundSpace::linf(1);
        let a = DiscreteMeasure::dirac(&[0.1]).unwrap();
        assert!(exact_wp(&s, &a, &a, 0.5).is_err());
    }

    #[test]
    fn pricing_matches_dense() {
        use crate::ground::{stream_rng, Generator, GeneratorKind, GeneratorSpec};
        let g = Generator::new(&GeneratorSpec::new(GeneratorKind::UniformCube { dim: 2 })).unwrap();
        let s = GroundSpace::linf(2);
        for seed in 0..10 {
            let mut rng = stream_rng(seed, 0);
            let (a, _) = g.sample_with(120, &mut rng).unwrap();
            let (b, _) = g.sample_with(40, &mut rng).unwrap();
            let p = if seed % 2 == 0 { 1.0 } else { 2.0 };
            let dense = exact_wp(&s, &a, &b, p).unwrap();
            let sparse = exact_wp_with(&s, &a, &b, p, &SolverOptions::nearest(2)).unwrap();
            assert!((dense.value - sparse.value).abs() < 1e-9);
            assert!(sparse.gap.unwrap() < 1e-6);
            assert!(sparse.stats.arcs < 120 * 40);
        }
    }

    #[test]
    fn pricing_matches_dense_on_unbalanced_clusters() {
        // Clusters hold different shares of the two samples, so nearest arcs
        // alone cannot carry the mass and the starting auction strands sources.
        use crate::ground::{stream_rng, Generator, GeneratorKind, GeneratorSpec};
        let kind = GeneratorKind::Clusterable {
            dim: 3,
            radius: 1e-3,
            clusters: Some(4),
            centers: None,
        };
        let g = Generator::new(&GeneratorSpec::new(kind)).unwrap();
        let s = GroundSpace::linf(3);
        for seed in 0..6 {
            let mut rng = stream_rng(seed, 1);
            let (a, _) = g.sample_with(160, &mut rng).unwrap();
            let (b, _) = g.sample_with(8, &mut rng).unwrap();
            let p = if seed % 2 == 0 { 1.0 } else { 2.0 };
            let dense = exact_wp(&s, &a, &b, p).unwrap();
            let sparse = exact_wp_with(&s, &a, &b, p, &SolverOptions::nearest(2)).unwrap();
            assert!((dense.value - sparse.value).abs() < 1e-9);
            assert!(sparse.plan.marginal_error(&a, &b) < 1e-12);
        }
    }

    fn uniform_line(n: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(0.0..=1.0f64, n)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn one_dimensional_sorted_coupling(
            (a, b) in (1usize..12).prop_flat_map(|n| (uniform_line(n), uniform_line(n))),
            p in prop_oneof![Just(1.0), Just(2.0), Just(1.5)],
        ) {
            let s = GroundSpace::linf(1);
            let mu = DiscreteMeasure::uniform(1, a.clone()).unwrap();
            let nu = DiscreteMeasure::uniform(1, b.clone()).unwrap();
            let sol = exact_wp(&s, &mu, &nu, p).unwrap();
            prop_assert!((sol.value - sorted_matching(&a, &b, p)).abs() < 1e-9);
            prop_assert!(sol.gap.unwrap() < 1e-6);
            let d = sol.dual.as_ref().unwrap();
            prop_assert!(d.max_violation(&s, &mu, &nu) <= 1e-9);
            prop_assert!(d.source.iter().chain(&d.target).all(|v| (-1e-12..=1.0 + 1e-12).contains(v)));
        }

        #[test]
        fn symmetric_and_monotone_in_p(
            a in proptest::collection::vec(0.0..=1.0f64, 2..16),
            b in proptest::collection::vec(0.0..=1.0f64, 2..16),
        ) {
            let s = GroundSpace::linf(2);
            let a = &a[..a.len() / 2 * 2];
            let b = &b[..b.len() / 2 * 2];
            let mu = DiscreteMeasure::uniform(2, a.to_vec()).unwrap();
            let nu = DiscreteMeasure::uniform(2, b.to_vec()).unwrap();
            let ab = exact_wp(&s, &mu, &nu, 1.0).unwrap();
            let ba = exact_wp(&s, &nu, &mu, 1.0).unwrap();
            prop_assert!((ab.value - ba.value).abs() <= 1e-9);
            let w2 = exact_wp(&s, &mu, &nu, 2.0).unwrap().distance();
            prop_assert!(ab.distance() <= w2 + 1e-9);
        }

        #[test]
        fn triangle_inequality(
            pts in proptest::collection::vec(0.0..=1.0f64, 18),
            w in proptest::collection::vec(0.05..1.0f64, 9),
        ) {
            let s = GroundSpace::linf(2);
            let norm = |w: &[f64]| { let t: f64 = w.iter().sum(); w.iter().map(|x| x / t).collect::<Vec<_>>() };
            let m = |k: usize| DiscreteMeasure::new(2, pts[6 * k..6 * k + 6].to_vec(), norm(&w[3 * k..3 * k + 3])).unwrap();
            let (a, b, c) = (m(0), m(1), m(2));
            for p in [1.0, 2.0] {
                let ab = exact_wp(&s, &a, &b, p).unwrap().distance();
                let bc = exact_wp(&s, &b, &c, p).unwrap().distance();
                let ac = exact_wp(&s, &a, &c, p).unwrap().distance();
                prop_assert!(ac <= ab + bc + 1e-7);
            }
        }
    }
}
