//! The experiment drivers. Every random draw comes from a stream keyed by
//! (config seed, purpose, n) and the replicate index, so replicates can run
//! on any number of threads and still reduce in index order.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{
    approx_low_dim_bound, clusterable_bound, concentrate_near_s_bound, concentration_tail, finite_sample_upper,
    gaussian_mixture_bound, gaussian_tail, relaxed_upper, sqrt_bound, BoundId, BoundReport,
};
use crate::dimension::{cell_mass_profile, compute_d_n, compute_m_n, DimensionLadder, ScaleGrid};
use crate::error::{Error, Result};
use crate::ground::{derive_seed, stream_rng, DiscreteMeasure, Generator, GeneratorKind, GroundSpace, Norm, Rng};
use crate::transport::{exact_wp_with, lossy_lower_value, lossy_scale, ExactSolution};

use super::config::{ExperimentConfig, GaussianTailParams};
use super::kmeans::kmeans;
use super::reference::{build_reference, ProxyError, Reference, ReferenceKind};
use super::stats::{exceedance, mean_se, RateEstimate};

const SAMPLE_LABEL: u64 = 0x5341_0000;
const DENSE_LABEL: u64 = 0x4445_0000;
const KMEANS_LABEL: u64 = 0x4b4d_0000;
const BOOTSTRAP_LABEL: u64 = 0x4253_0000;
const TAIL_LABEL: u64 = 0x5441_0000;
/// Finest grid level used for dimension estimates from samples.
const MAX_LADDER_DEPTH: usize = 20;
/// Levels appended below the multiscale truncation depth.
const MULTISCALE_EXTRA_LEVELS: usize = 10;
/// Chunk of Gaussian draws handled by one stream.
const TAIL_CHUNK: usize = 1 << 16;

/// A validated config with its generator, ground space and reference.
#[derive(Debug, Clone)]
pub struct Setup {
    pub config: ExperimentConfig,
    pub generator: Generator,
    pub space: GroundSpace,
    pub reference: Reference,
    pub p: f64,
}

impl Setup {
    /// `default_p` applies when the config leaves `p` out.
    pub fn new(config: &ExperimentConfig, default_p: f64) -> Result<Self> {
        config.validate()?;
        let generator = Generator::new(&config.generator)?;
        let space = config.space(generator.dim())?;
        let p = config.p_or(default_p);
        let reference = build_reference(
            &generator,
            &space,
            p,
            config.reference_atoms(),
            config.params.reference_level,
            config.seed,
        )?;
        Ok(Self {
            config: config.clone(),
            generator,
            space,
            reference,
            p,
        })
    }

    fn rng(&self, label: u64, n: u64, replicate: usize) -> Rng {
        stream_rng(derive_seed(self.config.seed, label.wrapping_add(n)), replicate as u64)
    }

    /// `n` i.i.d. draws, duplicates merged.
    fn empirical(&self, n: u64, replicate: usize) -> Result<DiscreteMeasure> {
        let mut rng = self.rng(SAMPLE_LABEL, n, replicate);
        Ok(self.generator.sample_with(n as usize, &mut rng)?.0.merged())
    }

    /// A `k`-point quantizer fitted to a fresh dense sample of
    /// `kmeans_factor * k` draws.
    fn quantized(&self, k: u64, replicate: usize) -> Result<DiscreteMeasure> {
        let dense_size = self.config.params.kmeans_factor * k as usize;
        let mut rng = self.rng(DENSE_LABEL, k, replicate);
        let dense = self.generator.sample_with(dense_size, &mut rng)?.0;
        let mut rng = self.rng(KMEANS_LABEL, k, replicate);
        Ok(kmeans(&dense, k as usize, &self.config.params.kmeans, &mut rng)?.measure)
    }

    /// Exact solve against the reference; capacity errors name `n`.
    fn solve(&self, nu: &DiscreteMeasure, duals: bool, n: u64) -> Result<ExactSolution> {
        let mu = &self.reference.measure;
        let opts = self.config.solver.options(mu.len(), nu.len(), duals);
        exact_wp_with(&self.space, mu, nu, self.p, &opts).map_err(|e| match e {
            Error::Capacity(msg) => Error::capacity(format!("n = {n}: {msg}")),
            e => e,
        })
    }

    fn replicates<T: Send>(&self, count: usize, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
        let run = || (0..count).into_par_iter().map(&f).collect::<Result<Vec<T>>>();
        match self.config.params.threads {
            Some(t) => rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::config(format!("cannot start {t} worker threads: {e}")))?
                .install(run),
            None => run(),
        }
    }

    /// Scale grid of `μ`: exact for the multiscale measure, from the
    /// reference otherwise.
    pub fn scale_grid(&self) -> Result<ScaleGrid> {
        let pr = &self.config.params;
        if let Some(ms) = self.generator.multiscale() {
            let depth = pr.ladder_depth.unwrap_or(ms.depth() + MULTISCALE_EXTRA_LEVELS);
            return ScaleGrid::from_multiscale(ms, depth);
        }
        let base = pr.ladder_base;
        let depth = pr.ladder_depth.unwrap_or_else(|| {
            // Cells finer than the reference's atom spacing only count atoms.
            let atoms = self.reference.measure.len().max(2) as f64;
            let by_size = (atoms.ln() / (base as f64).ln()).ceil() as usize;
            let by_index = (63.0 / (self.space.dim as f64 * (base as f64).log2())).floor() as usize;
            by_size.clamp(1, MAX_LADDER_DEPTH).min(by_index.max(1))
        });
        ScaleGrid::from_measure(&self.space, &self.reference.measure, base, depth)
    }
}

/// `E W_p` per n from exact solves against the reference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRun {
    pub estimate: RateEstimate,
    /// `W_p(μ_ref, μ̂_n)`, one row per grid n.
    pub distances: Vec<Vec<f64>>,
    /// `W_p^p(μ_ref, μ̂_n)`.
    pub powers: Vec<Vec<f64>>,
    pub proxy: ProxyError,
    pub reference: ReferenceKind,
}

pub fn run_rate_experiment(setup: &Setup) -> Result<RateRun> {
    let cfg = &setup.config;
    let mut powers = Vec::with_capacity(cfg.n_grid.len());
    for &n in &cfg.n_grid {
        let values = setup.replicates(cfg.replicates, |r| {
            let nu = setup.empirical(n, r)?;
            Ok(setup.solve(&nu, false, n)?.value.max(0.0))
        })?;
        powers.push(values);
    }
    let distances: Vec<Vec<f64>> = powers
        .iter()
        .map(|v| v.iter().map(|x| x.powf(1.0 / setup.p)).collect())
        .collect();
    let estimate = RateEstimate::from_replicates(&cfg.n_grid, &distances, derive_seed(cfg.seed, BOOTSTRAP_LABEL));
    Ok(RateRun {
        estimate,
        distances,
        powers,
        proxy: setup.reference.proxy.clone(),
        reference: setup.reference.kind,
    })
}

/// Whether the covering premise of the lossy lower bound holds at the scale
/// it is consumed: `N_ε(μ, τ) ≥ ε^{-t}` at `ε = n^{-1/t}/2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PremiseCheck {
    pub n: u64,
    pub t: f64,
    pub tau: f64,
    pub eps: f64,
    /// `ε^{-t}`.
    pub required: f64,
    /// Largest mass of a diameter-`ε` ball under `μ`, when known.
    pub ball_mass: Option<f64>,
    /// `(1 - τ) / ball_mass`, a lower bound on `N_ε(μ, τ)`.
    pub certified_count: Option<f64>,
    /// Side-`ε` cells of the reference needed to hold `1 - τ` of its mass.
    pub cell_count: u64,
    pub holds: bool,
}

pub fn lossy_premise(setup: &Setup, tau: f64, t: f64, n: u64) -> Result<PremiseCheck> {
    let eps = lossy_scale(t, n as f64);
    let required = eps.powf(-t);
    let ball_mass = setup.generator.max_ball_mass(eps, setup.space.norm);
    let certified_count = ball_mass.map(|b| (1.0 - tau) / b);
    let cell_count = cell_mass_profile(&setup.reference.measure, eps)?.count(tau);
    Ok(PremiseCheck {
        n,
        t,
        tau,
        eps,
        required,
        ball_mass,
        certified_count,
        cell_count,
        holds: certified_count.is_some_and(|c| c >= required),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSide {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
    NotApplicable,
}

/// One bound at one n next to the measured `W_p^p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub n: u64,
    pub bound_id: &'static str,
    pub side: BoundSide,
    pub value: f64,
    pub applicable: bool,
    /// Mean, standard error and minimum of `W_p^p(μ_ref, μ̂_n)`.
    pub measured_mean: f64,
    pub measured_se: f64,
    pub measured_min: f64,
    pub proxy_error: f64,
    /// Upper: mean ≤ value + 2 SE. Lower: every replicate ≥ value.
    pub verdict: Verdict,
}

/// Simulated `P[‖Z‖² > c² tr Σ]` for a centred Gaussian.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianTailResult {
    pub c: f64,
    pub samples: usize,
    pub frequency: f64,
    pub mc_se: f64,
    pub bound: f64,
    /// Frequency ≤ bound + 3 SE.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundComparison {
    pub rates: RateRun,
    pub reports: Vec<BoundReport>,
    pub rows: Vec<BoundRow>,
    pub premises: Vec<PremiseCheck>,
    pub gaussian_tail: Option<GaussianTailResult>,
}

fn wanted(selected: &[BoundId], id: BoundId) -> bool {
    selected.is_empty() || selected.contains(&id)
}

/// Upper bounds whose hypotheses can be evaluated for this generator.
fn upper_bounds(setup: &Setup, grid: &ScaleGrid, n: u64) -> Result<Vec<BoundReport>> {
    let p = setup.p;
    let pr = &setup.config.params;
    let sel = &pr.bounds;
    let inputs = &pr.bound_inputs;
    let mut out = Vec::new();
    if wanted(sel, BoundId::SqrtBound) {
        out.push(sqrt_bound(p, compute_m_n(grid, n, p)?, n)?);
    }
    if wanted(sel, BoundId::FiniteSampleUpper) {
        out.push(finite_sample_upper(p, compute_d_n(grid, n, p)?.value, n)?);
    }
    match &setup.config.generator.kind {
        GeneratorKind::Clusterable { radius, .. } if wanted(sel, BoundId::Clusterable) => {
            let (centers, _) = setup.generator.cluster_centers().expect("clusterable generator");
            let m = (centers.len() / setup.space.dim) as u64;
            out.push(clusterable_bound(p, m, *radius, n)?);
        }
        GeneratorKind::GaussianMixture { means, sigma } if wanted(sel, BoundId::GaussianMixture) => {
            out.push(gaussian_mixture_bound(p, means.len() as u64, *sigma, n)?);
        }
        _ => {}
    }
    if let (Some(s), Some(e)) = (inputs.s, inputs.eps_prime) {
        if wanted(sel, BoundId::RelaxedUpper) {
            out.push(relaxed_upper(p, s, e, n)?);
        }
    }
    if let (Some(d), Some(e)) = (inputs.d, inputs.eps) {
        if wanted(sel, BoundId::ApproxLowDim) {
            out.push(approx_low_dim_bound(p, d, e, n)?);
        }
    }
    if let (Some(d), Some(s)) = (inputs.d, inputs.sigma) {
        if wanted(sel, BoundId::ConcentrateNearS) {
            out.push(concentrate_near_s_bound(p, d, s, n)?);
        }
    }
    Ok(out)
}

pub fn run_bound_comparison(setup: &Setup) -> Result<BoundComparison> {
    let rates = run_rate_experiment(setup)?;
    let grid = setup.scale_grid()?;
    let pr = &setup.config.params;
    let proxy_error = setup.reference.proxy.value_pp;
    let (mut reports, mut rows, mut premises) = (Vec::new(), Vec::new(), Vec::new());
    for (i, &n) in setup.config.n_grid.iter().enumerate() {
        let values = &rates.powers[i];
        let (mean, se) = mean_se(values);
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let row = |bound_id, side, value: f64, applicable: bool| {
            let verdict = match (applicable, side) {
                (false, _) => Verdict::NotApplicable,
                (true, BoundSide::Upper) if mean <= value + 2.0 * se => Verdict::Holds,
                (true, BoundSide::Lower) if min >= value => Verdict::Holds,
                _ => Verdict::Violated,
            };
            BoundRow {
                n,
                bound_id,
                side,
                value,
                applicable,
                measured_mean: mean,
                measured_se: se,
                measured_min: min,
                proxy_error,
                verdict,
            }
        };
        for rep in upper_bounds(setup, &grid, n)? {
            rows.push(row(rep.id.as_str(), BoundSide::Upper, rep.value, rep.applicable()));
            reports.push(rep);
        }
        if let Some(t) = pr.lossy_t {
            let premise = lossy_premise(setup, pr.tau, t, n)?;
            let value = lossy_lower_value(pr.tau, setup.p, t, n as f64);
            rows.push(row("lossy_lower", BoundSide::Lower, value, premise.holds));
            premises.push(premise);
        }
    }
    let gaussian_tail = match &pr.gaussian_tail {
        Some(g) => Some(run_gaussian_tail(g, derive_seed(setup.config.seed, TAIL_LABEL))?),
        None => None,
    };
    Ok(BoundComparison {
        rates,
        reports,
        rows,
        premises,
        gaussian_tail,
    })
}

/// Draws `Z ~ N(0, diag(variances))` in fixed-size chunks, each from its own
/// stream, and counts `‖Z‖² > c² tr Σ`.
pub fn run_gaussian_tail(params: &GaussianTailParams, seed: u64) -> Result<GaussianTailResult> {
    let bound = gaussian_tail(params.c)?.value;
    let trace: f64 = params.variances.iter().sum();
    let threshold = params.c * params.c * trace;
    let sd: Vec<f64> = params.variances.iter().map(|v| v.sqrt()).collect();
    let chunks = params.samples.div_ceil(TAIL_CHUNK);
    let hits: usize = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let len = TAIL_CHUNK.min(params.samples - c * TAIL_CHUNK);
            (0..len)
                .filter(|_| {
                    let r2: f64 = sd
                        .iter()
                        .map(|s| {
                            let z: f64 = StandardNormal.sample(&mut rng);
                            (s * z).powi(2)
                        })
                        .sum();
                    r2 > threshold
                })
                .count()
        })
        .sum();
    let r = params.samples as f64;
    let frequency = hits as f64 / r;
    let mc_se = (frequency * (1.0 - frequency) / r).sqrt();
    Ok(GaussianTailResult {
        c: params.c,
        samples: params.samples,
        frequency,
        mc_se,
        bound,
        holds: frequency <= bound + 3.0 * mc_se,
    })
}

/// Tail frequency of `W_p^p` above its mean at one `(n, t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationRow {
    pub n: u64,
    pub t: f64,
    pub mean: f64,
    pub frequency: f64,
    pub mc_se: f64,
    pub bound: f64,
    pub proxy_error: f64,
    /// Frequency ≤ bound + 3 SE.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Concentration {
    pub rates: RateRun,
    pub rows: Vec<ConcentrationRow>,
}

pub fn run_concentration(setup: &Setup) -> Result<Concentration> {
    let rates = run_rate_experiment(setup)?;
    let mut rows = Vec::new();
    for (i, &n) in setup.config.n_grid.iter().enumerate() {
        let values = &rates.powers[i];
        let (mean, _) = mean_se(values);
        for &t in &setup.config.params.t_values {
            let (frequency, mc_se) = exceedance(values, mean + t);
            let bound = concentration_tail(n, t)?.value;
            rows.push(ConcentrationRow {
                n,
                t,
                mean,
                frequency,
                mc_se,
                bound,
                proxy_error: setup.reference.proxy.value_pp,
                holds: frequency <= bound + 3.0 * mc_se,
            });
        }
    }
    Ok(Concentration { rates, rows })
}

/// Live cubes at level `k` against `N_{k-2}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiveCountRow {
    pub k: usize,
    pub live: u64,
    pub n_k_minus_2: Option<u64>,
    pub ok: bool,
}

/// The `d_n` window at one n, with `N_k ≤ n < N_{k+1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowRow {
    pub n: u64,
    pub k: usize,
    pub d_n: f64,
    /// `n^{-1/d_n}`.
    pub scale: f64,
    pub bracket_ok: bool,
    /// `N_{2^{-k-4}}(μ, 1/2)` from the scale grid, when resolved.
    pub count_k_plus_4: Option<u64>,
    pub count_exceeds_n: Option<bool>,
    /// `2^{-6} n^{-1/d_n}`.
    pub lower: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ApproxKind {
    Empirical,
    Kmeans,
}

/// `W_p(μ_ref, ν)` for one `n`-point `ν`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxRow {
    pub n: u64,
    pub replicate: usize,
    pub kind: ApproxKind,
    pub atoms: usize,
    pub w_p: f64,
    /// `w_p` minus the proxy error: a lower bound on `W_p(μ, ν)`.
    pub certified: f64,
    pub lower: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiscaleConverse {
    pub live_counts: Vec<LiveCountRow>,
    pub windows: Vec<WindowRow>,
    pub approximations: Vec<ApproxRow>,
    pub proxy: ProxyError,
}

/// Largest `k` with `N_k ≤ n`.
fn bracket_index(ns: &[u64], n: u64) -> Option<usize> {
    ns.iter().rposition(|&nk| nk <= n)
}

pub fn run_multiscale_converse(setup: &Setup) -> Result<MultiscaleConverse> {
    let Some(ms) = setup.generator.multiscale() else {
        return Err(Error::config(
            "the multiscale experiment needs the multiscale_converse generator",
        ));
    };
    if setup.space.norm != Norm::LInf {
        return Err(Error::config("the multiscale construction is stated for the sup norm"));
    }
    let p = setup.p;
    let live_counts: Vec<LiveCountRow> = (2..=ms.depth().min(8))
        .map(|k| {
            let live = ms.live_count(k) as u64;
            let expected = ms.n_k(k - 2);
            LiveCountRow {
                k,
                live,
                n_k_minus_2: expected,
                ok: expected == Some(live),
            }
        })
        .collect();
    let grid = setup.scale_grid()?;
    let n_seq = ms.n_sequence();
    let mut windows = Vec::new();
    for &n in &setup.config.n_grid {
        let k = bracket_index(&n_seq, n)
            .ok_or_else(|| Error::config(format!("n = {n} lies below N_0 = {}", n_seq.first().unwrap_or(&0))))?;
        let d_n = compute_d_n(&grid, n, p)?.value;
        let scale = (n as f64).powf(-1.0 / d_n);
        let slack = 1e-12;
        let bracket_ok =
            scale >= 0.5f64.powi(k as i32 + 4) * (1.0 - slack) && scale <= 0.5f64.powi(k as i32) * (1.0 + slack);
        let count = (k + 4 <= grid.depth()).then(|| grid.count(k + 4, 0.5));
        windows.push(WindowRow {
            n,
            k,
            d_n,
            scale,
            bracket_ok,
            count_k_plus_4: count,
            count_exceeds_n: count.map(|c| c > n),
            lower: scale / 64.0,
        });
    }
    let proxy = setup.reference.proxy.value;
    let mut approximations = Vec::new();
    for w in &windows {
        let rows = setup.replicates(setup.config.replicates, |r| {
            let mut out = Vec::with_capacity(2);
            for (kind, nu) in [
                (ApproxKind::Empirical, setup.empirical(w.n, r)?),
                (ApproxKind::Kmeans, setup.quantized(w.n, r)?),
            ] {
                let w_p = setup.solve(&nu, false, w.n)?.distance();
                out.push(ApproxRow {
                    n: w.n,
                    replicate: r,
                    kind,
                    atoms: nu.len(),
                    w_p,
                    certified: w_p - proxy,
                    lower: w.lower,
                    holds: w_p - proxy >= w.lower,
                });
            }
            Ok(out)
        })?;
        approximations.extend(rows.into_iter().flatten());
    }
    Ok(MultiscaleConverse {
        live_counts,
        windows,
        approximations,
        proxy: setup.reference.proxy.clone(),
    })
}

/// Worst-case Lipschitz quadrature error of one `n`-point rule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureRow {
    pub n: u64,
    pub replicate: usize,
    pub kind: ApproxKind,
    pub atoms: usize,
    /// `W_1(μ_ref, ν)`, the primal value.
    pub error: f64,
    /// `E_μref f - E_ν f^c` at the optimal potential.
    pub dual_value: Option<f64>,
    pub gap: Option<f64>,
    pub lossy_lower: Option<f64>,
    pub premise_holds: Option<bool>,
    pub above_lower: Option<bool>,
    pub proxy_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quadrature {
    pub rows: Vec<QuadratureRow>,
    pub premises: Vec<PremiseCheck>,
    pub proxy: ProxyError,
}

pub fn run_quadrature_demo(setup: &Setup) -> Result<Quadrature> {
    if setup.p != 1.0 {
        return Err(Error::input(format!(
            "the quadrature demo needs p = 1, got {}",
            setup.p
        )));
    }
    let pr = &setup.config.params;
    let mut rows = Vec::new();
    let mut premises = Vec::new();
    for &n in &setup.config.n_grid {
        let premise = pr.lossy_t.map(|t| lossy_premise(setup, pr.tau, t, n)).transpose()?;
        let lower = pr.lossy_t.map(|t| lossy_lower_value(pr.tau, 1.0, t, n as f64));
        let holds = premise.as_ref().map(|c| c.holds);
        premises.extend(premise);
        let batch = setup.replicates(setup.config.replicates, |r| {
            let mut out = Vec::with_capacity(2);
            for (kind, nu) in [
                (ApproxKind::Empirical, setup.empirical(n, r)?),
                (ApproxKind::Kmeans, setup.quantized(n, r)?),
            ] {
                let sol = setup.solve(&nu, true, n)?;
                let dual_value = sol.dual.as_ref().map(|d| d.value(&setup.reference.measure, &nu));
                out.push(QuadratureRow {
                    n,
                    replicate: r,
                    kind,
                    atoms: nu.len(),
                    error: sol.value,
                    dual_value,
                    gap: sol.gap,
                    lossy_lower: lower,
                    premise_holds: holds,
                    above_lower: lower.map(|l| sol.value >= l),
                    proxy_error: setup.reference.proxy.value,
                });
            }
            Ok(out)
        })?;
        rows.extend(batch.into_iter().flatten());
    }
    Ok(Quadrature {
        rows,
        premises,
        proxy: setup.reference.proxy.clone(),
    })
}

/// k-means against empirical support of the same size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KMeansRow {
    pub k: u64,
    pub replicate: usize,
    /// `W_p(μ_ref, μ̃_k)` with `μ̃_k` fitted to the reference itself.
    pub w_kmeans: f64,
    /// `W_p(μ_ref, μ̂_k)`.
    pub w_empirical: f64,
    pub kmeans_le_empirical: bool,
    /// `(τ 4^{-p} k^{-p/t})^{1/p}`, on the scale of `W_p`.
    pub lossy_lower: Option<f64>,
    pub premise_holds: Option<bool>,
    pub both_above_lower: Option<bool>,
    pub proxy_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KMeansDemo {
    pub rows: Vec<KMeansRow>,
    pub premises: Vec<PremiseCheck>,
    pub proxy: ProxyError,
}

pub fn run_kmeans_demo(setup: &Setup) -> Result<KMeansDemo> {
    let pr = &setup.config.params;
    let dense = &setup.reference.measure;
    let ks = pr.k_grid.clone().unwrap_or_else(|| setup.config.n_grid.clone());
    if let Some(&k) = ks.iter().find(|&&k| k as usize > dense.len()) {
        return Err(Error::input(format!(
            "k = {k} exceeds the dense sample size {}",
            dense.len()
        )));
    }
    let p = setup.p;
    let mut rows = Vec::new();
    let mut premises = Vec::new();
    for &k in &ks {
        let premise = pr.lossy_t.map(|t| lossy_premise(setup, pr.tau, t, k)).transpose()?;
        let lower = pr
            .lossy_t
            .map(|t| lossy_lower_value(pr.tau, p, t, k as f64).powf(1.0 / p));
        let holds = premise.as_ref().map(|c| c.holds);
        premises.extend(premise);
        let batch = setup.replicates(setup.config.replicates, |r| {
            let mut rng = setup.rng(KMEANS_LABEL, k, r);
            let tilde = kmeans(dense, k as usize, &pr.kmeans, &mut rng)?.measure;
            let hat = setup.empirical(k, r)?;
            let w_kmeans = setup.solve(&tilde, false, k)?.distance();
            let w_empirical = setup.solve(&hat, false, k)?.distance();
            Ok(KMeansRow {
                k,
                replicate: r,
                w_kmeans,
                w_empirical,
                kmeans_le_empirical: w_kmeans <= w_empirical,
                lossy_lower: lower,
                premise_holds: holds,
                both_above_lower: lower.map(|l| w_kmeans >= l && w_empirical >= l),
                proxy_error: setup.reference.proxy.value,
            })
        })?;
        rows.extend(batch);
    }
    Ok(KMeansDemo {
        rows,
        premises,
        proxy: setup.reference.proxy.clone(),
    })
}

/// Dimension ladder of `μ` (from the reference unless exact), with `d_n`
/// and `m_n` on the n grid.
pub fn run_dims(setup: &Setup) -> Result<DimensionLadder> {
    let grid = setup.scale_grid()?;
    DimensionLadder::build(
        &grid,
        setup.p,
        &setup.config.n_grid,
        setup.generator.reference_dimension(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::GeneratorSpec;

    fn config(kind: GeneratorKind, n_grid: Vec<u64>, replicates: usize) -> ExperimentConfig {
        ExperimentConfig {
            generator: GeneratorSpec::new(kind),
            p: None,
            norm: Norm::LInf,
            n_grid,
            replicates,
            seed: 7,
            reference_size: None,
            solver: Default::default(),
            out_dir: None,
            params: Default::default(),
        }
    }

    #[test]
    fn dirac_rates_are_zero_and_slope_undefined() {
        let cfg = config(
            GeneratorKind::DiracMix {
                atoms: vec![vec![0.3, 0.6]],
                weights: None,
            },
            vec![4, 8, 16],
            3,
        );
        let run = run_rate_experiment(&Setup::new(&cfg, 1.0).unwrap()).unwrap();
        assert!(run.distances.iter().flatten().all(|&d| d == 0.0));
        assert!(run.estimate.slope.is_none());
        assert_eq!(run.reference, ReferenceKind::Exact);
    }

    #[test]
    fn rates_do_not_depend_on_thread_count() {
        let mut cfg = config(GeneratorKind::UniformCube { dim: 2 }, vec![8, 16], 6);
        cfg.params.threads = Some(1);
        let a = run_rate_experiment(&Setup::new(&cfg, 1.0).unwrap()).unwrap();
        cfg.params.threads = Some(3);
        let b = run_rate_experiment(&Setup::new(&cfg, 1.0).unwrap()).unwrap();
        assert_eq!(a, b);
        assert!(a.powers.iter().flatten().all(|&v| v > 0.0));
    }

    #[test]
    fn capacity_errors_name_n() {
        let mut cfg = config(GeneratorKind::UniformCube { dim: 2 }, vec![5, 50], 1);
        cfg.solver.max_arcs = 100;
        cfg.solver.dense_pairs = 0;
        let e = run_rate_experiment(&Setup::new(&cfg, 1.0).unwrap()).unwrap_err();
        assert_eq!(e.exit_code(), 3);
        assert!(e.to_string().contains("n = 5"), "{e}");
    }

    #[test]
    fn concentration_frequencies_fall_with_t() {
        let mut cfg = config(GeneratorKind::UniformCube { dim: 1 }, vec![20], 100);
        cfg.params.t_values = vec![0.0, 0.01, 0.05, 1.0];
        let c = run_concentration(&Setup::new(&cfg, 1.0).unwrap()).unwrap();
        let f: Vec<f64> = c.rows.iter().map(|r| r.frequency).collect();
        assert!(f.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(f[3], 0.0);
        assert!(c.rows.iter().all(|r| r.holds));
    }

    #[test]
    fn quadrature_needs_p_one() {
        let mut cfg = config(GeneratorKind::UniformCube { dim: 1 }, vec![4], 1);
        cfg.p = Some(2.0);
        let e = run_quadrature_demo(&Setup::new(&cfg, 1.0).unwrap()).unwrap_err();
        assert!(matches!(e, Error::Input(_)));
    }

    #[test]
    fn quadrature_primal_matches_dual() {
        let mut cfg = config(GeneratorKind::UniformCube { dim: 2 }, vec![8], 2);
        cfg.params.lossy_t = Some(1.5);
        let q = run_quadrature_demo(&Setup::new(&cfg, 1.0).unwrap()).unwrap();
        assert_eq!(q.rows.len(), 4);
        for r in &q.rows {
            assert!((r.error - r.dual_value.unwrap()).abs() < 1e-6);
            assert!(r.above_lower.unwrap());
        }
        assert!(q.premises[0].holds);
    }

    #[test]
    fn kmeans_rejects_oversized_k() {
        let mut cfg = config(GeneratorKind::UniformCube { dim: 1 }, vec![4], 1);
        cfg.params.k_grid = Some(vec![41]);
        let e = run_kmeans_demo(&Setup::new(&cfg, 2.0).unwrap()).unwrap_err();
        assert!(matches!(e, Error::Input(_)));
    }

    #[test]
    fn kmeans_with_k_at_dense_size_is_exact() {
        let mut cfg = config(GeneratorKind::UniformCube { dim: 1 }, vec![4], 1);
        cfg.params.k_grid = Some(vec![5, 40]);
        let d = run_kmeans_demo(&Setup::new(&cfg, 2.0).unwrap()).unwrap();
        assert!(d.rows[1].w_kmeans < 1e-6);
        assert!(d.rows.iter().all(|r| r.kmeans_le_empirical));
    }

    #[test]
    fn multiscale_window_and_lower_bound() {
        let mut cfg = config(
            GeneratorKind::MultiscaleConverse {
                c: 1.0,
                alpha: -0.5,
                depth: 8,
            },
            vec![16, 64],
            1,
        );
        cfg.params.kmeans_factor = 4;
        let m = run_multiscale_converse(&Setup::new(&cfg, 1.0).unwrap()).unwrap();
        assert!(m.live_counts.iter().all(|r| r.ok));
        assert!(m
            .windows
            .iter()
            .all(|w| w.bracket_ok && w.count_exceeds_n == Some(true)));
        assert_eq!(m.approximations.len(), 4);
        assert!(m.approximations.iter().all(|a| a.holds));
    }

    #[test]
    fn premise_fails_when_n_is_too_large_for_t() {
        let cfg = config(GeneratorKind::UniformCube { dim: 2 }, vec![4], 1);
        let s = Setup::new(&cfg, 1.0).unwrap();
        assert!(lossy_premise(&s, 0.5, 1.5, 64).unwrap().holds);
        assert!(!lossy_premise(&s, 0.5, 3.0, 64).unwrap().holds);
    }

    #[test]
    fn gaussian_tail_is_rare() {
        let g = GaussianTailParams {
            variances: vec![1.0, 0.5, 0.1],
            c: 5.0,
            samples: 100_000,
        };
        let r = run_gaussian_tail(&g, 1).unwrap();
        assert!(r.holds && r.frequency == 0.0);
        assert_eq!(r, run_gaussian_tail(&g, 1).unwrap());
    }
}
