use crate::error::{Error, Result};
use crate::ground::DiscreteMeasure;

use super::DyadicPartition;

/// Tolerance on per-level mass totals and parent/child consistency.
pub const HIST_TOL: f64 = 1e-12;

/// Per-level cell masses of one measure on one partition. Each level is a
/// list of `(cell, mass)` sorted by cell, with massless cells omitted.
#[derive(Debug, Clone, PartialEq)]
pub struct CellHistogram<'a> {
    partition: &'a DyadicPartition,
    levels: Vec<Vec<(u64, f64)>>,
}

impl<'a> CellHistogram<'a> {
    /// Exact masses by point location.
    pub fn new(partition: &'a DyadicPartition, measure: &DiscreteMeasure) -> Result<Self> {
        if measure.dim() != partition.space().dim {
            return Err(Error::input("measure and partition differ in dimension"));
        }
        let depth = partition.depth();
        let mut raw: Vec<Vec<(u64, f64)>> = vec![Vec::with_capacity(measure.len()); depth];
        for (x, &w) in measure.atoms().zip(measure.weights()) {
            for (k, c) in partition.locate_all(x)?.into_iter().enumerate() {
                raw[k].push((c, w));
            }
        }
        Ok(Self {
            partition,
            levels: raw.into_iter().map(collapse).collect(),
        })
    }

    /// Histogram from given masses per level (levels `1..=depth`), e.g. exact
    /// cell masses of a construction. Checks totals and nesting.
    pub fn from_masses(partition: &'a DyadicPartition, levels: Vec<Vec<(u64, f64)>>) -> Result<Self> {
        if levels.len() != partition.depth() {
            return Err(Error::input(format!(
                "{} mass levels for a partition of depth {}",
                levels.len(),
                partition.depth()
            )));
        }
        let levels: Vec<Vec<(u64, f64)>> = levels.into_iter().map(collapse).collect();
        for (k, level) in levels.iter().enumerate() {
            if level
                .iter()
                .any(|&(c, w)| !(w >= 0.0) || c >= partition.cell_count(k + 1))
            {
                return Err(Error::input(format!("invalid cell mass at level {}", k + 1)));
            }
        }
        let h = Self { partition, levels };
        h.check()?;
        Ok(h)
    }

    pub fn partition(&self) -> &'a DyadicPartition {
        self.partition
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// `(cell, mass)` pairs at `level`, sorted by cell.
    pub fn level(&self, level: usize) -> &[(u64, f64)] {
        &self.levels[level - 1]
    }

    pub fn mass(&self, level: usize, cell: u64) -> f64 {
        let l = self.level(level);
        l.binary_search_by_key(&cell, |e| e.0).map_or(0.0, |i| l[i].1)
    }

    /// Whether both histograms live on the same partition.
    pub fn same_partition(&self, other: &CellHistogram<'_>) -> bool {
        std::ptr::eq(self.partition, other.partition) || self.partition == other.partition
    }

    /// Per-level totals equal 1 and children sum to their parent.
    pub fn check(&self) -> Result<()> {
        for k in 1..=self.depth() {
            let total: f64 = self.level(k).iter().map(|e| e.1).sum();
            if (total - 1.0).abs() > HIST_TOL {
                return Err(Error::input(format!("level {k} masses sum to {total}")));
            }
            if k > 1 {
                let mut up: Vec<(u64, f64)> = self
                    .level(k)
                    .iter()
                    .map(|&(c, w)| (self.partition.parent(k, c).unwrap_or(u64::MAX), w))
                    .collect();
                up = collapse(std::mem::take(&mut up));
                let parent = self.level(k - 1);
                let mismatch = up.len() != parent.len()
                    || up
                        .iter()
                        .zip(parent)
                        .any(|(a, b)| a.0 != b.0 || (a.1 - b.1).abs() > HIST_TOL);
                if mismatch {
                    return Err(Error::input(format!("level {k} masses do not refine level {}", k - 1)));
                }
            }
        }
        Ok(())
    }
}

/// Sort by cell and sum duplicates, in a fixed order.
fn collapse(mut v: Vec<(u64, f64)>) -> Vec<(u64, f64)> {
    v.sort_by_key(|e| e.0);
    let mut out: Vec<(u64, f64)> = Vec::with_capacity(v.len());
    for (c, w) in v {
        match out.last_mut() {
            Some(last) if last.0 == c => last.1 += w,
            _ => out.push((c, w)),
        }
    }
    out.retain(|e| e.1 > 0.0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::GroundSpace;
    use proptest::prelude::*;

    #[test]
    fn dirac_at_origin() {
        let p = DyadicPartition::standard(&GroundSpace::linf(1), 2, 2).unwrap();
        let h = CellHistogram::new(&p, &DiscreteMeasure::dirac(&[0.0]).unwrap()).unwrap();
        assert_eq!(h.level(1), &[(0, 1.0)]);
        assert_eq!(h.level(2), &[(0, 1.0)]);
        assert_eq!(h.mass(2, 1), 0.0);
    }

    #[test]
    fn two_atoms_split_evenly() {
        let p = DyadicPartition::standard(&GroundSpace::linf(1), 2, 2).unwrap();
        let mu = DiscreteMeasure::uniform(1, vec![0.1, 0.6]).unwrap();
        let h = CellHistogram::new(&p, &mu).unwrap();
        assert_eq!(h.level(1), &[(0, 0.5), (1, 0.5)]);
    }

    #[test]
    fn rejects_unnested_masses() {
        let p = DyadicPartition::standard(&GroundSpace::linf(1), 2, 2).unwrap();
        assert!(CellHistogram::from_masses(&p, vec![vec![(0, 1.0)], vec![(3, 1.0)]]).is_err());
        assert!(CellHistogram::from_masses(&p, vec![vec![(1, 1.0)], vec![(3, 1.0)]]).is_ok());
    }

    proptest! {
        #[test]
        fn levels_sum_to_one_and_nest(
            m in 1usize..4,
            base in 2u32..4,
            coords in proptest::collection::vec(0.0..=1.0f64, 1..60),
        ) {
            let n = coords.len() / m;
            prop_assume!(n > 0);
            let mu = DiscreteMeasure::uniform(m, coords[..n * m].to_vec()).unwrap();
            let p = DyadicPartition::standard(&GroundSpace::linf(m), base, 4).unwrap();
            let h = CellHistogram::new(&p, &mu).unwrap();
            prop_assert!(h.check().is_ok());
        }
    }
}
