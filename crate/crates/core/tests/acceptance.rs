//! End-to-end acceptance checks. Each criterion prints one PASS or FAIL line;
//! the binary exits non-zero when any fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::Rng as _;
use serde_json::json;

use wassrate::dimension::{covering_number, d_eps, CoverMethod, ScaleGrid};
use wassrate::dyadic::{histogram, standard_cube_partition};
use wassrate::ground::{stream_rng, DiscreteMeasure, Generator, GeneratorKind, GeneratorSpec, GroundSpace, Rng};
use wassrate::harness::{self, ExperimentConfig, GaussianTailParams, RateEstimate, Setup};
use wassrate::transport::{brute_force_wp, dyadic_coupling, dyadic_upper_bound, exact_wp};
use wassrate::Result;

const SEED: u64 = 20_240_601;
const DOUBLING_GRID: [u64; 7] = [64, 128, 256, 512, 1024, 2048, 4096];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn config(value: serde_json::Value) -> ExperimentConfig {
    ExperimentConfig::from_json(&value.to_string()).expect("acceptance config is valid")
}

fn uniform_points(rng: &mut Rng, n: usize, m: usize) -> Vec<f64> {
    (0..n * m).map(|_| rng.random::<f64>()).collect()
}

fn random_weights(rng: &mut Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// Largest primal-dual gap seen across the oracle checks.
#[derive(Default)]
struct GapLog {
    max: f64,
    solves: usize,
    missing: usize,
}

impl GapLog {
    fn record(&mut self, gap: Option<f64>) {
        self.solves += 1;
        match gap {
            Some(g) => self.max = self.max.max(g),
            None => self.missing += 1,
        }
    }
}

fn oracle_equivalence(gaps: &mut GapLog) -> Result<Outcome> {
    let start = Instant::now();
    let mut rng = stream_rng(SEED, 1);
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let n = rng.random_range(1..=7);
        let m = rng.random_range(1..=3);
        let p = if i % 2 == 0 { 1.0 } else { 2.0 };
        let space = GroundSpace::linf(m);
        let mu = DiscreteMeasure::uniform(m, uniform_points(&mut rng, n, m))?;
        let nu = DiscreteMeasure::uniform(m, uniform_points(&mut rng, n, m))?;
        let sol = exact_wp(&space, &mu, &nu, p)?;
        worst = worst.max((sol.value - brute_force_wp(&space, &mu, &nu, p)?).abs());
        gaps.record(sol.gap);
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-9 && secs < 10.0,
        format!("200 instances, max |exact - brute| = {worst:.2e}, {secs:.2} s"),
    )
}

fn one_dimensional_closed_form(gaps: &mut GapLog) -> Result<Outcome> {
    let mut rng = stream_rng(SEED, 2);
    let space = GroundSpace::linf(1);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let n = rng.random_range(1..=40);
        let p = [1.0, 1.5, 2.0, 3.0][i % 4];
        let mut a = uniform_points(&mut rng, n, 1);
        let mut b = uniform_points(&mut rng, n, 1);
        let sol = exact_wp(
            &space,
            &DiscreteMeasure::uniform(1, a.clone())?,
            &DiscreteMeasure::uniform(1, b.clone())?,
            p,
        )?;
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let sorted = a.iter().zip(&b).map(|(x, y)| (x - y).abs().powf(p)).sum::<f64>() / n as f64;
        worst = worst.max((sol.value - sorted).abs());
        gaps.record(sol.gap);
    }
    outcome(
        worst <= 1e-9,
        format!("100 instances, max |exact - sorted| = {worst:.2e}"),
    )
}

fn coupling_sandwich(gaps: &mut GapLog) -> Result<Outcome> {
    let mut rng = stream_rng(SEED, 3);
    let (mut marginal, mut below, mut above) = (0.0f64, f64::INFINITY, f64::INFINITY);
    for i in 0..100 {
        let m = rng.random_range(1..=3);
        let space = GroundSpace::linf(m);
        let (na, nb) = (rng.random_range(1..=30), rng.random_range(1..=30));
        let p = if i % 2 == 0 { 1.0 } else { 2.0 };
        let mu = DiscreteMeasure::new(m, uniform_points(&mut rng, na, m), random_weights(&mut rng, na))?;
        let nu = DiscreteMeasure::new(m, uniform_points(&mut rng, nb, m), random_weights(&mut rng, nb))?;
        let part = standard_cube_partition(&space, [2, 3][i % 2], rng.random_range(1..=5))?;
        let (hmu, hnu) = (histogram(&part, &mu)?, histogram(&part, &nu)?);
        let plan = dyadic_coupling(&hmu, &hnu, &mu, &nu, p)?;
        let cost = plan.cost(&space, &mu, &nu);
        let sol = exact_wp(&space, &mu, &nu, p)?;
        gaps.record(sol.gap);
        marginal = marginal.max(plan.marginal_error(&mu, &nu));
        below = below.min(cost - sol.value);
        above = above.min(dyadic_upper_bound(&hmu, &hnu, p)? + 1e-9 - cost);
    }
    outcome(
        marginal <= 1e-9 && below >= -1e-9 && above >= 0.0,
        format!("100 instances, marginal error {marginal:.2e}, min(cost - exact) = {below:.2e}, min(bound + 1e-9 - cost) = {above:.2e}"),
    )
}

fn duality(gaps: &GapLog) -> Result<Outcome> {
    outcome(
        gaps.missing == 0 && gaps.max <= 1e-6,
        format!(
            "{} solves, max gap {:.2e}, {} without a gap",
            gaps.solves, gaps.max, gaps.missing
        ),
    )
}

fn means(estimate: &RateEstimate) -> String {
    estimate
        .points
        .iter()
        .map(|p| format!("{}:{:.4}±{:.4}", p.n, p.mean, p.se))
        .collect::<Vec<_>>()
        .join(" ")
}

fn rate_run(cfg: &ExperimentConfig) -> Result<harness::RateRun> {
    harness::run_rate_experiment(&Setup::new(cfg, 1.0)?)
}

fn rate_reproduction() -> Result<Outcome> {
    let run = rate_run(&config(json!({
        "generator": {"variant": "uniform_cube", "dim": 3},
        "p": 1.0, "n_grid": DOUBLING_GRID, "replicates": 50, "seed": SEED,
    })))?;
    let slope = run.estimate.slope.unwrap_or(f64::NAN);
    outcome(
        (-0.43..=-0.23).contains(&slope),
        format!("slope {slope:.4} (window [-0.43, -0.23]); {}", means(&run.estimate)),
    )
}

fn under_sqrt_bound(estimate: &RateEstimate, atoms: f64) -> bool {
    estimate
        .points
        .iter()
        .all(|p| p.mean <= 12.0 * (atoms / p.n as f64).sqrt() + 2.0 * p.se)
}

fn fast_discrete_rate() -> Result<Outcome> {
    let atoms = [[0.1, 0.2], [0.8, 0.3], [0.5, 0.9], [0.2, 0.7], [0.9, 0.9]];
    let run = rate_run(&config(json!({
        "generator": {"variant": "dirac_mix", "atoms": atoms},
        "p": 1.0, "n_grid": DOUBLING_GRID, "replicates": 50, "seed": SEED,
    })))?;
    let slope = run.estimate.slope.unwrap_or(f64::NAN);
    let under = under_sqrt_bound(&run.estimate, 5.0);
    outcome(
        (-0.65..=-0.35).contains(&slope) && under,
        format!(
            "slope {slope:.4} (window [-0.65, -0.35]), means under 12 sqrt(5/n) + 2 SE: {under}; {}",
            means(&run.estimate)
        ),
    )
}

fn clusterable_plateau() -> Result<Outcome> {
    let replicates = 10;
    let clustered = rate_run(&config(json!({
        "generator": {"variant": "clusterable", "dim": 6, "radius": 1e-3, "clusters": 8},
        "p": 1.0, "n_grid": DOUBLING_GRID, "replicates": replicates, "seed": SEED,
    })))?;
    let control = rate_run(&config(json!({
        "generator": {"variant": "uniform_cube", "dim": 6},
        "p": 1.0, "n_grid": DOUBLING_GRID, "replicates": replicates, "seed": SEED,
    })))?;
    let under = under_sqrt_bound(&clustered.estimate, 8.0);
    let early = clustered.estimate.window_slope(64, 512).unwrap_or(f64::NAN);
    let control_slope = control.estimate.slope.unwrap_or(f64::NAN);
    outcome(
        under && early < -0.35 && control_slope > -0.25,
        format!(
            "{replicates} replicates; means under 12 sqrt(8/n) + 2 SE: {under}; early slope (n <= 512) {early:.4} (< -0.35); \
             uniform m=6 slope {control_slope:.4} (> -0.25); clustered {}; control {}",
            means(&clustered.estimate),
            means(&control.estimate)
        ),
    )
}

fn lower_bound() -> Result<Outcome> {
    let cfg = config(json!({
        "generator": {"variant": "uniform_cube", "dim": 3},
        "p": 1.0, "n_grid": [16, 64, 256, 1024], "replicates": 20, "seed": SEED,
        "params": {
            "tau": 0.5, "lossy_t": 2.5, "kmeans_factor": 4,
            "kmeans": {"iterations": 20, "seedings": 1},
        },
    }));
    let q = harness::run_quadrature_demo(&Setup::new(&cfg, 1.0)?)?;
    let premises = q.premises.iter().all(|c| c.holds);
    let above = q.rows.iter().all(|r| r.above_lower == Some(true));
    let margin = q
        .rows
        .iter()
        .map(|r| r.error - r.lossy_lower.unwrap_or(f64::NAN))
        .fold(f64::INFINITY, f64::min);
    outcome(
        premises && above && q.rows.len() == 4 * 20 * 2,
        format!(
            "premise certified at every n: {premises}; {} approximations (empirical and k-means), all above: {above}; min margin {margin:.4}",
            q.rows.len()
        ),
    )
}

fn concentration() -> Result<Outcome> {
    let cfg = config(json!({
        "generator": {"variant": "uniform_cube", "dim": 2},
        "p": 1.0, "n_grid": [200], "replicates": 2000, "seed": SEED,
        "params": {"t_values": [0.02, 0.05]},
    }));
    let c = harness::run_concentration(&Setup::new(&cfg, 1.0)?)?;
    let mut pass = c.rows.len() == 2;
    let mut detail = Vec::new();
    for r in &c.rows {
        let bound = (-2.0 * 200.0 * r.t * r.t).exp();
        pass &= (r.bound - bound).abs() <= 1e-15 && r.frequency <= bound + 3.0 * r.mc_se;
        detail.push(format!(
            "t={}: freq {:.4} ± {:.4} vs {bound:.4}",
            r.t, r.frequency, r.mc_se
        ));
    }
    outcome(pass, detail.join("; "))
}

fn gaussian_tail() -> Result<Outcome> {
    let variances = vec![4.0, 3.0, 2.0, 1.5, 1.0, 0.8, 0.5, 0.3, 0.2, 0.1];
    let params = GaussianTailParams {
        variances,
        c: 5.0,
        samples: 1_000_000,
    };
    let r = harness::run_gaussian_tail(&params, SEED)?;
    outcome(
        r.frequency <= 1.93e-3 + 3.0 * r.mc_se && (r.bound - (-6.25f64).exp()).abs() < 1e-15,
        format!("freq {:.2e} ± {:.2e}, bound {:.3e}", r.frequency, r.mc_se, r.bound),
    )
}

fn multiscale_converse() -> Result<Outcome> {
    let cfg = config(json!({
        "generator": {"variant": "multiscale_converse", "c": 1.0, "alpha": -0.5, "depth": 9},
        "p": 1.0, "n_grid": [4, 16, 64, 256, 1024], "replicates": 5, "seed": SEED,
        "params": {"reference_level": 9, "kmeans_factor": 4, "kmeans": {"iterations": 20, "seedings": 1}},
    }));
    let m = harness::run_multiscale_converse(&Setup::new(&cfg, 1.0)?)?;
    let counts = m.live_counts.len() == 7 && m.live_counts.iter().all(|r| r.ok);
    let brackets = m.windows.iter().all(|w| w.bracket_ok);
    let lower = m.approximations.iter().all(|a| a.holds);
    let margin = m
        .approximations
        .iter()
        .map(|a| a.certified - a.lower)
        .fold(f64::INFINITY, f64::min);
    outcome(
        counts && brackets && lower,
        format!(
            "live counts = N_(k-2) for k=2..8: {counts}; brackets: {brackets}; {} approximations above 2^-6 n^(-1/d_n): {lower} \
             (min margin after proxy {margin:.4}, proxy {:.4})",
            m.approximations.len(),
            m.proxy.value
        ),
    )
}

fn dimension_estimators() -> Result<Outcome> {
    let g = Generator::new(&GeneratorSpec::new(GeneratorKind::UniformCube { dim: 2 }))?;
    let space = GroundSpace::linf(2);
    let sample = g.sample_with(200_000, &mut stream_rng(SEED, 12))?.0;
    let eps = 3f64.powi(-4);
    let cover = covering_number(&space, sample.coords(), eps, CoverMethod::CellProxy)?;
    let d = d_eps(cover.count as u64, eps)?;
    let grid = ScaleGrid::from_measure(&space, &sample, 3, 6)?;
    let taus: Vec<f64> = (0..100).map(|i| i as f64 / 100.0).collect();
    let monotone = (1..=grid.depth()).all(|l| taus.windows(2).all(|w| grid.dim_at(l, w[1]) <= grid.dim_at(l, w[0])));
    outcome(
        (1.7..=2.0).contains(&d) && monotone,
        format!(
            "d at 3^-4 = {d:.4} from {} cells; nonincreasing in tau on {} levels: {monotone}",
            cover.count,
            grid.depth()
        ),
    )
}

fn main() -> ExitCode {
    // Optional name filters, as with the default test harness.
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let selected = |name: &str| filters.is_empty() || filters.iter().any(|f| name.contains(f.as_str()));
    let mut gaps = GapLog::default();
    let mut failed = 0;
    let mut report = |name: &str, result: Result<Outcome>, secs: f64| {
        let (pass, detail) = match result {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!("{} {name} [{secs:.1} s]: {detail}", if pass { "PASS" } else { "FAIL" });
    };
    macro_rules! run {
        ($name:literal, $e:expr) => {
            if selected($name) {
                let t = Instant::now();
                let r = $e;
                report($name, r, t.elapsed().as_secs_f64());
            }
        };
    }
    run!("oracle_equivalence", oracle_equivalence(&mut gaps));
    run!("one_dimensional_closed_form", one_dimensional_closed_form(&mut gaps));
    run!("coupling_sandwich", coupling_sandwich(&mut gaps));
    run!("duality_gap", duality(&gaps));
    run!("rate_uniform_cube", rate_reproduction());
    run!("fast_discrete_rate", fast_discrete_rate());
    run!("clusterable_plateau", clusterable_plateau());
    run!("lossy_lower_bound", lower_bound());
    run!("concentration_tail", concentration());
    run!("gaussian_tail", gaussian_tail());
    run!("multiscale_converse", multiscale_converse());
    run!("dimension_estimators", dimension_estimators());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
