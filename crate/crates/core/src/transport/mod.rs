mod auction;
mod brute;
mod dual;
mod dyadic;
mod exact;
mod grid;
mod lossy;
mod plan;
mod simplex;

pub use brute::{brute_force_wp, BRUTE_FORCE_MAX};
pub use dual::{c_transform, DualPotential};
pub use dyadic::{dyadic_coupling, dyadic_upper_bound};
pub use exact::{exact_wp, exact_wp_with, ArcSelection, ExactSolution, SolverOptions, SolverStats};
pub use lossy::{lossy_lower_value, lossy_scale};
pub use plan::{PlanEntry, TransportPlan};

pub(crate) use grid::TargetGrid;
