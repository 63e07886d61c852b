//! Multiscale transport along a dyadic partition.
//!
//! Level by level, each cell sheds the part of its excess mass that the other
//! measure cannot match there (`π_k`, `ρ_k`); the shed parts balance inside
//! every parent cell and are coupled there, and what survives the deepest
//! level is coupled inside its own cell. Couplings inside a cell use the
//! north-west corner rule in atom order, so any of them costs at most the
//! cell diameter to the power `p` per unit of mass.

use crate::dyadic::CellHistogram;
use crate::error::{Error, Result};
use crate::ground::DiscreteMeasure;

use super::plan::{PlanEntry, TransportPlan};

/// Remainders below this are treated as exhausted when pairing masses.
const PAIR_TOL: f64 = 1e-15;

fn check_pair(hmu: &CellHistogram<'_>, hnu: &CellHistogram<'_>, p: f64) -> Result<()> {
    if !hmu.same_partition(hnu) {
        return Err(Error::input("histograms are built on different partitions"));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::input(format!("exponent p must be a finite real >= 1, got {p}")));
    }
    Ok(())
}

/// `δ^{k*p} + Σ_k δ^{(k-1)p} Σ_i |μ(Q_i^k) - ν(Q_i^k)|`.
pub fn dyadic_upper_bound(hmu: &CellHistogram<'_>, hnu: &CellHistogram<'_>, p: f64) -> Result<f64> {
    check_pair(hmu, hnu, p)?;
    let part = hmu.partition();
    let delta = part.delta();
    let mut value = delta.powf(part.depth() as f64 * p);
    for k in 1..=part.depth() {
        value += delta.powf((k - 1) as f64 * p) * l1_gap(hmu.level(k), hnu.level(k));
    }
    Ok(value)
}

/// `Σ |a - b|` over the union of two sorted sparse mass lists.
fn l1_gap(a: &[(u64, f64)], b: &[(u64, f64)]) -> f64 {
    let (mut i, mut j, mut s) = (0, 0, 0.0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x.0 == y.0 => {
                s += (x.1 - y.1).abs();
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x.0 < y.0 => {
                s += x.1;
                i += 1;
            }
            (Some(x), None) => {
                s += x.1;
                i += 1;
            }
            (_, Some(y)) => {
                s += y.1;
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    s
}

/// The explicit coupling whose cost the dyadic bound controls.
pub fn dyadic_coupling(
    hmu: &CellHistogram<'_>,
    hnu: &CellHistogram<'_>,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    p: f64,
) -> Result<TransportPlan> {
    check_pair(hmu, hnu, p)?;
    let part = hmu.partition();
    let depth = part.depth();
    let loc_mu: Vec<Vec<u64>> = mu.atoms().map(|x| part.locate_all(x)).collect::<Result<_>>()?;
    let loc_nu: Vec<Vec<u64>> = nu.atoms().map(|y| part.locate_all(y)).collect::<Result<_>>()?;
    let mut a = mu.weights().to_vec();
    let mut b = nu.weights().to_vec();
    let mut entries = Vec::new();

    // Atoms grouped by cell at a level, in atom order within each cell.
    let groups = |loc: &[Vec<u64>], k: usize| -> Vec<(u64, Vec<usize>)> {
        let mut idx: Vec<usize> = (0..loc.len()).collect();
        idx.sort_by_key(|&i| (loc[i][k - 1], i));
        let mut out: Vec<(u64, Vec<usize>)> = Vec::new();
        for i in idx {
            let c = loc[i][k - 1];
            match out.last_mut() {
                Some(g) if g.0 == c => g.1.push(i),
                _ => out.push((c, vec![i])),
            }
        }
        out
    };
    let parent_of = |k: usize, cell: u64| {
        if k == 1 {
            0
        } else {
            part.parent(k, cell).unwrap_or(u64::MAX)
        }
    };

    for k in 1..=depth {
        let gm = groups(&loc_mu, k);
        let gn = groups(&loc_nu, k);
        let mass = |g: &[usize], w: &[f64]| g.iter().map(|&i| w[i]).sum::<f64>();
        let find = |gs: &[(u64, Vec<usize>)], c: u64| gs.binary_search_by_key(&c, |e| e.0).ok();
        // Shed excess mass into π (from μ) and ρ (from ν), keyed by parent.
        let mm: Vec<f64> = gm.iter().map(|(_, g)| mass(g, &a)).collect();
        let nn: Vec<f64> = gn.iter().map(|(_, g)| mass(g, &b)).collect();
        let mut shed_mu: Vec<(u64, usize, f64)> = Vec::new();
        let mut shed_nu: Vec<(u64, usize, f64)> = Vec::new();
        for (x, (c, g)) in gm.iter().enumerate() {
            let (m, n) = (mm[x], find(&gn, *c).map_or(0.0, |t| nn[t]));
            if m > n {
                shed(g, &mut a, n / m, parent_of(k, *c), &mut shed_mu);
            }
        }
        for (y, (c, g)) in gn.iter().enumerate() {
            let (n, m) = (nn[y], find(&gm, *c).map_or(0.0, |t| mm[t]));
            if n > m {
                shed(g, &mut b, m / n, parent_of(k, *c), &mut shed_nu);
            }
        }
        shed_mu.sort_by_key(|e| (e.0, e.1));
        shed_nu.sort_by_key(|e| (e.0, e.1));
        let (mut s, mut t) = (0, 0);
        while s < shed_mu.len() && t < shed_nu.len() {
            let pm = shed_mu[s].0;
            let pn = shed_nu[t].0;
            if pm < pn {
                s += 1;
                continue;
            }
            if pn < pm {
                t += 1;
                continue;
            }
            let s_end = s + shed_mu[s..].iter().take_while(|e| e.0 == pm).count();
            let t_end = t + shed_nu[t..].iter().take_while(|e| e.0 == pm).count();
            northwest(
                &shed_mu[s..s_end].iter().map(|e| (e.1, e.2)).collect::<Vec<_>>(),
                &shed_nu[t..t_end].iter().map(|e| (e.1, e.2)).collect::<Vec<_>>(),
                &mut entries,
            );
            s = s_end;
            t = t_end;
        }
    }

    // Residuals balance in every deepest cell.
    let gm = groups(&loc_mu, depth);
    let gn = groups(&loc_nu, depth);
    for (c, g) in &gm {
        if let Ok(t) = gn.binary_search_by_key(c, |e| e.0) {
            let left: Vec<(usize, f64)> = g.iter().map(|&i| (i, a[i])).collect();
            let right: Vec<(usize, f64)> = gn[t].1.iter().map(|&j| (j, b[j])).collect();
            northwest(&left, &right, &mut entries);
        }
    }

    entries.sort_by_key(|e: &PlanEntry| (e.i, e.j));
    let mut merged: Vec<PlanEntry> = Vec::with_capacity(entries.len());
    for e in entries {
        match merged.last_mut() {
            Some(last) if last.i == e.i && last.j == e.j => last.mass += e.mass,
            _ => merged.push(e),
        }
    }
    TransportPlan::new(mu.len(), nu.len(), p, merged)
}

/// Keeps the fraction `keep` of each atom's residual and records the rest.
fn shed(g: &[usize], w: &mut [f64], keep: f64, parent: u64, out: &mut Vec<(u64, usize, f64)>) {
    for &i in g {
        let stay = w[i] * keep;
        out.push((parent, i, w[i] - stay));
        w[i] = stay;
    }
}

/// North-west corner coupling of two mass lists of (nearly) equal total.
fn northwest(left: &[(usize, f64)], right: &[(usize, f64)], out: &mut Vec<PlanEntry>) {
    let (mut s, mut t) = (0, 0);
    let mut rl = left.first().map_or(0.0, |e| e.1);
    let mut rr = right.first().map_or(0.0, |e| e.1);
    while s < left.len() && t < right.len() {
        let f = rl.min(rr);
        if f > 0.0 {
            out.push(PlanEntry {
                i: left[s].0,
                j: right[t].0,
                mass: f,
            });
        }
        rl -= f;
        rr -= f;
        if rl <= PAIR_TOL {
            s += 1;
            rl = left.get(s).map_or(0.0, |e| e.1);
        }
        if rr <= PAIR_TOL {
            t += 1;
            rr = right.get(t).map_or(0.0, |e| e.1);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{CellHistogram, DyadicPartition};
    use crate::ground::GroundSpace;
    use crate::transport::exact_wp;
    use proptest::prelude::*;

    #[test]
    fn identical_measures_cost_the_deepest_scale() {
        let space = GroundSpace::linf(2);
        let part = DyadicPartition::standard(&space, 3, 3).unwrap();
        let mu = DiscreteMeasure::uniform(2, vec![0.1, 0.2, 0.7, 0.7, 0.35, 0.9]).unwrap();
        let h = CellHistogram::new(&part, &mu).unwrap();
        let ub = dyadic_upper_bound(&h, &h, 1.0).unwrap();
        assert!((ub - 1.0 / 27.0).abs() < 1e-15);
        let plan = dyadic_coupling(&h, &h, &mu, &mu, 1.0).unwrap();
        assert!(plan.marginal_error(&mu, &mu) < 1e-12);
        assert!(plan.cost(&space, &mu, &mu) <= ub);
    }

    #[test]
    fn far_diracs() {
        let space = GroundSpace::linf(1);
        let part = DyadicPartition::standard(&space, 3, 1).unwrap();
        let mu = DiscreteMeasure::dirac(&[0.1]).unwrap();
        let nu = DiscreteMeasure::dirac(&[0.9]).unwrap();
        let (hm, hn) = (
            CellHistogram::new(&part, &mu).unwrap(),
            CellHistogram::new(&part, &nu).unwrap(),
        );
        let ub = dyadic_upper_bound(&hm, &hn, 1.0).unwrap();
        assert!((ub - 7.0 / 3.0).abs() < 1e-15);
        let plan = dyadic_coupling(&hm, &hn, &mu, &nu, 1.0).unwrap();
        assert_eq!(plan.entries(), &[PlanEntry { i: 0, j: 0, mass: 1.0 }]);
    }

    #[test]
    fn rejects_foreign_histograms() {
        let space = GroundSpace::linf(1);
        let p1 = DyadicPartition::standard(&space, 3, 2).unwrap();
        let p2 = DyadicPartition::standard(&space, 2, 2).unwrap();
        let mu = DiscreteMeasure::dirac(&[0.1]).unwrap();
        let (h1, h2) = (
            CellHistogram::new(&p1, &mu).unwrap(),
            CellHistogram::new(&p2, &mu).unwrap(),
        );
        assert!(dyadic_upper_bound(&h1, &h2, 1.0).is_err());
        assert!(dyadic_coupling(&h1, &h2, &mu, &mu, 1.0).is_err());
    }

    fn instance() -> impl Strategy<Value = (usize, Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> {
        (1usize..4, 1usize..12, 1usize..12).prop_flat_map(|(m, a, b)| {
            (
                Just(m),
                proptest::collection::vec(0.0..=1.0f64, a * m),
                proptest::collection::vec(0.0..=1.0f64, b * m),
                proptest::collection::vec(0.01..1.0f64, a),
                proptest::collection::vec(0.01..1.0f64, b),
            )
        })
    }

    fn normalized(w: Vec<f64>) -> Vec<f64> {
        let s: f64 = w.iter().sum();
        w.into_iter().map(|v| v / s).collect()
    }

    proptest! {
        #[test]
        fn sandwich((m, xa, xb, wa, wb) in instance(), base in 2u32..4, depth in 1usize..5, p in 1.0..3.0f64) {
            let space = GroundSpace::linf(m);
            let mu = DiscreteMeasure::new(m, xa, normalized(wa));
            let nu = DiscreteMeasure::new(m, xb, normalized(wb));
            prop_assume!(mu.is_ok() && nu.is_ok());
            let (mu, nu) = (mu.unwrap(), nu.unwrap());
            let part = DyadicPartition::standard(&space, base, depth).unwrap();
            let (hm, hn) = (CellHistogram::new(&part, &mu).unwrap(), CellHistogram::new(&part, &nu).unwrap());
            let plan = dyadic_coupling(&hm, &hn, &mu, &nu, p).unwrap();
            prop_assert!(plan.marginal_error(&mu, &nu) <= 1e-9);
            let cost = plan.cost(&space, &mu, &nu);
            let ub = dyadic_upper_bound(&hm, &hn, p).unwrap();
            let exact = exact_wp(&space, &mu, &nu, p).unwrap().value;
            prop_assert!(exact <= cost + 1e-9, "exact {} > coupling {}", exact, cost);
            prop_assert!(cost <= ub + 1e-9, "coupling {} > bound {}", cost, ub);
        }
    }
}
