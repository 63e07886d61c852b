//! Covering numbers and finite-scale dimension estimates.

mod covering;
mod ladder;

pub use covering::{
    cell_mass_profile, covering_number, covering_number_with_mass, CoverMethod, CoveringResult, MassProfile, Witness,
    EXACT_COVER_MAX,
};
pub use ladder::{compute_d_n, compute_m_n, d_eps, DimensionLadder, DnEstimate, LadderRow, ScaleGrid};
