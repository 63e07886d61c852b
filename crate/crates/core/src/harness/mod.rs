//! Experiment drivers behind the command-line interface.

pub mod config;
pub mod experiments;
pub mod kmeans;
pub mod output;
pub mod reference;
pub mod stats;

pub use config::{
    BoundInputs, ExperimentConfig, ExperimentParams, GaussianTailParams, KMeansOptions, SolverLimits, REFERENCE_FACTOR,
};
pub use experiments::{
    lossy_premise, run_bound_comparison, run_concentration, run_dims, run_gaussian_tail, run_kmeans_demo,
    run_multiscale_converse, run_quadrature_demo, run_rate_experiment, ApproxKind, ApproxRow, BoundComparison,
    BoundRow, BoundSide, Concentration, ConcentrationRow, GaussianTailResult, KMeansDemo, KMeansRow, LiveCountRow,
    MultiscaleConverse, PremiseCheck, Quadrature, QuadratureRow, RateRun, Setup, Verdict, WindowRow,
};
pub use kmeans::{kmeans, Quantizer};
pub use output::{write_report, Report, Table};
pub use reference::{best_dyadic_bound, build_reference, ProxyError, Reference, ReferenceKind};
pub use stats::{exceedance, log_log_fit, mean_se, RateEstimate, RatePoint};
