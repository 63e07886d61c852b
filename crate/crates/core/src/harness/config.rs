use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bounds::BoundId;
use crate::error::{Error, Result};
use crate::ground::{GeneratorSpec, GroundSpace, Norm};
use crate::transport::{ArcSelection, SolverOptions};

/// Minimum ratio between an i.i.d. reference and the largest sample.
pub const REFERENCE_FACTOR: usize = 10;

fn one_usize() -> usize {
    1
}

/// Limits handed to the exact solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverLimits {
    /// Hard cap on arcs held by one solve.
    pub max_arcs: usize,
    /// Problems with at most this many source-target pairs are solved densely.
    pub dense_pairs: usize,
    /// Initial neighbours per source for larger problems.
    pub nearest_k: usize,
}

impl Default for SolverLimits {
    fn default() -> Self {
        Self {
            max_arcs: 5000 * 5000,
            dense_pairs: 250_000,
            nearest_k: 8,
        }
    }
}

impl SolverLimits {
    /// Options for an `a x b` problem.
    pub fn options(&self, a: usize, b: usize, duals: bool) -> SolverOptions {
        SolverOptions {
            max_arcs: self.max_arcs,
            arcs: if a.saturating_mul(b) <= self.dense_pairs {
                ArcSelection::Dense
            } else {
                ArcSelection::Nearest { k: self.nearest_k }
            },
            duals,
            ..SolverOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KMeansOptions {
    pub iterations: usize,
    pub seedings: usize,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        Self {
            iterations: 50,
            seedings: 5,
        }
    }
}

/// Knobs used by individual subcommands; all have defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentParams {
    /// Deviations for the concentration table.
    pub t_values: Vec<f64>,
    /// Discarded mass and exponent of the lossy lower bound.
    pub tau: f64,
    pub lossy_t: Option<f64>,
    /// Support sizes for the k-means demo (defaults to the n grid).
    pub k_grid: Option<Vec<u64>>,
    pub kmeans: KMeansOptions,
    /// Dense sample used by k-means, as a multiple of `k`.
    pub kmeans_factor: usize,
    pub ladder_base: u32,
    pub ladder_depth: Option<usize>,
    /// Level of the cell-centre reference for the multiscale measure.
    pub reference_level: Option<usize>,
    /// Bounds evaluated by the comparison; all applicable ones when empty.
    pub bounds: Vec<BoundId>,
    /// Hypotheses of the bounds that cannot be read off the generator.
    pub bound_inputs: BoundInputs,
    /// Gaussian tail simulation run by the bound comparison.
    pub gaussian_tail: Option<GaussianTailParams>,
    /// Worker threads for replicates; the global pool when absent.
    pub threads: Option<usize>,
}

/// Optional hypotheses: `s` and `ε'` of the relaxed bound, and the regular
/// dimension `d` with fattening `eps` or sub-Gaussian scale `sigma`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundInputs {
    pub s: Option<f64>,
    pub eps_prime: Option<f64>,
    pub d: Option<f64>,
    pub eps: Option<f64>,
    pub sigma: Option<f64>,
}

/// `Z ~ N(0, diag(variances))`, tested at `‖Z‖² > c² tr Σ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianTailParams {
    pub variances: Vec<f64>,
    pub c: f64,
    pub samples: usize,
}

impl Default for ExperimentParams {
    fn default() -> Self {
        Self {
            t_values: vec![0.02, 0.05],
            tau: 0.5,
            lossy_t: None,
            k_grid: None,
            kmeans: KMeansOptions::default(),
            kmeans_factor: 10,
            ladder_base: 3,
            ladder_depth: None,
            reference_level: None,
            bounds: Vec::new(),
            bound_inputs: BoundInputs::default(),
            gaussian_tail: None,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub generator: GeneratorSpec,
    /// Transport exponent; 2 for the k-means demo and 1 elsewhere when absent.
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub norm: Norm,
    pub n_grid: Vec<u64>,
    #[serde(default = "one_usize")]
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    /// Atoms of the i.i.d. reference; `10 * max(n_grid)` when absent.
    #[serde(default)]
    pub reference_size: Option<usize>,
    #[serde(default)]
    pub solver: SolverLimits,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub params: ExperimentParams,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(p) = self.p {
            if !(p >= 1.0 && p.is_finite()) {
                return Err(Error::config(format!("p must be a finite real >= 1, got {p}")));
            }
        }
        if self.n_grid.is_empty() || self.n_grid[0] == 0 {
            return Err(Error::config("n grid must be nonempty with positive entries"));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("n grid must be strictly increasing"));
        }
        if self.replicates == 0 {
            return Err(Error::config("replicates must be at least 1"));
        }
        let max_n = self.max_n();
        if let Some(r) = self.reference_size {
            if (r as u64) < REFERENCE_FACTOR as u64 * max_n {
                return Err(Error::config(format!(
                    "reference size {r} is below {REFERENCE_FACTOR} x max n = {}",
                    REFERENCE_FACTOR as u64 * max_n
                )));
            }
        }
        if self.solver.nearest_k == 0 {
            return Err(Error::config("solver nearest_k must be positive"));
        }
        let pr = &self.params;
        if !(0.0..1.0).contains(&pr.tau) {
            return Err(Error::config(format!("tau must lie in [0, 1), got {}", pr.tau)));
        }
        if pr.t_values.iter().any(|t| !(*t >= 0.0)) {
            return Err(Error::config("deviations t must be nonnegative"));
        }
        if pr.lossy_t.is_some_and(|t| !(t > 0.0)) {
            return Err(Error::config("lossy exponent t must be positive"));
        }
        if !(2..=3).contains(&pr.ladder_base) {
            return Err(Error::config("ladder base must be 2 or 3"));
        }
        if pr.kmeans.iterations == 0 || pr.kmeans.seedings == 0 || pr.kmeans_factor == 0 {
            return Err(Error::config(
                "k-means iterations, seedings and factor must be positive",
            ));
        }
        if let Some(k) = &pr.k_grid {
            if k.is_empty() || k.contains(&0) {
                return Err(Error::config("k grid must be nonempty with positive entries"));
            }
        }
        if let Some(g) = &pr.gaussian_tail {
            if g.variances.is_empty() || g.variances.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(Error::config("gaussian tail variances must be positive"));
            }
            if !(g.c > 0.0) || g.samples == 0 {
                return Err(Error::config("gaussian tail needs c > 0 and at least one sample"));
            }
        }
        if pr.threads == Some(0) {
            return Err(Error::config("threads must be positive"));
        }
        Ok(())
    }

    /// `p`, or `default` when the config leaves it out.
    pub fn p_or(&self, default: f64) -> f64 {
        self.p.unwrap_or(default)
    }

    pub fn max_n(&self) -> u64 {
        *self.n_grid.last().unwrap_or(&0)
    }

    /// Atoms of the i.i.d. reference.
    pub fn reference_atoms(&self) -> usize {
        self.reference_size.unwrap_or(REFERENCE_FACTOR * self.max_n() as usize)
    }

    pub fn space(&self, dim: usize) -> Result<GroundSpace> {
        GroundSpace::new(dim, self.norm)
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("configs serialize");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}
