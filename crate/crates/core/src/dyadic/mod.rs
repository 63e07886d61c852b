//! Dyadic partitions of the cube and per-cell histograms of measures.

mod histogram;
mod partition;

pub use histogram::{CellHistogram, HIST_TOL};
pub use partition::{Ball, DyadicPartition, LevelSummary};

use crate::error::Result;
use crate::ground::{DiscreteMeasure, GroundSpace};

/// Grid partition with parameter `1/base`.
pub fn standard_cube_partition(space: &GroundSpace, base: u32, depth: usize) -> Result<DyadicPartition> {
    DyadicPartition::standard(space, base, depth)
}

/// Covering-driven partition with parameter `1/3`.
pub fn partition_from_coverings(
    space: &GroundSpace,
    points: &[f64],
    coverings: &[Vec<Ball>],
) -> Result<DyadicPartition> {
    DyadicPartition::from_coverings(space, points, coverings)
}

pub fn histogram<'a>(partition: &'a DyadicPartition, measure: &DiscreteMeasure) -> Result<CellHistogram<'a>> {
    CellHistogram::new(partition, measure)
}
