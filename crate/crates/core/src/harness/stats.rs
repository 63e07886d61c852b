//! Replicate summaries and log-log rate fits.

use rand::Rng as _;
use serde::Serialize;

use crate::ground::stream_rng;

/// Bootstrap resamples behind the slope half-width.
pub const BOOTSTRAP_RESAMPLES: usize = 200;

/// Mean and standard error of the mean (`s/√R`; 0 for a single value).
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let r = values.len() as f64;
    let mean = values.iter().sum::<f64>() / r;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r - 1.0);
    (mean, (var / r).sqrt())
}

/// Unweighted least squares `y = slope x + intercept`; `None` with fewer
/// than two distinct abscissae or non-finite data.
pub fn least_squares(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 || x.iter().chain(y).any(|v| !v.is_finite()) {
        return None;
    }
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Slope of `log mean` against `log n`.
pub fn log_log_fit(ns: &[u64], means: &[f64]) -> Option<(f64, f64)> {
    if means.iter().any(|&m| m <= 0.0) {
        return None;
    }
    let x: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let y: Vec<f64> = means.iter().map(|m| m.ln()).collect();
    least_squares(&x, &y)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatePoint {
    pub n: u64,
    pub mean: f64,
    pub se: f64,
    pub replicates: usize,
}

/// Per-n means of `W_p(μ, μ̂_n)` and the fitted exponent. `slope` is absent
/// when some mean is zero (for instance a Dirac law).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateEstimate {
    pub points: Vec<RatePoint>,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    /// Half the width of the central 95% bootstrap interval of the slope.
    pub slope_half_width: Option<f64>,
}

impl RateEstimate {
    /// Summaries of `values[i]` (the replicates at `ns[i]`), with a
    /// replicate bootstrap driven by `seed`.
    pub fn from_replicates(ns: &[u64], values: &[Vec<f64>], seed: u64) -> Self {
        let points: Vec<RatePoint> = ns
            .iter()
            .zip(values)
            .map(|(&n, v)| {
                let (mean, se) = mean_se(v);
                RatePoint {
                    n,
                    mean,
                    se,
                    replicates: v.len(),
                }
            })
            .collect();
        let means: Vec<f64> = points.iter().map(|p| p.mean).collect();
        let fit = log_log_fit(ns, &means);
        let half_width = fit.and_then(|_| bootstrap_half_width(ns, values, seed));
        Self {
            points,
            slope: fit.map(|f| f.0),
            intercept: fit.map(|f| f.1),
            slope_half_width: half_width,
        }
    }

    /// Slope over the points with `lo <= n <= hi`.
    pub fn window_slope(&self, lo: u64, hi: u64) -> Option<f64> {
        let (ns, means): (Vec<u64>, Vec<f64>) = self
            .points
            .iter()
            .filter(|p| p.n >= lo && p.n <= hi)
            .map(|p| (p.n, p.mean))
            .unzip();
        log_log_fit(&ns, &means).map(|f| f.0)
    }
}

fn bootstrap_half_width(ns: &[u64], values: &[Vec<f64>], seed: u64) -> Option<f64> {
    let mut rng = stream_rng(seed, 0);
    let mut slopes = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    for _ in 0..BOOTSTRAP_RESAMPLES {
        let means: Vec<f64> = values
            .iter()
            .map(|v| (0..v.len()).map(|_| v[rng.random_range(0..v.len())]).sum::<f64>() / v.len() as f64)
            .collect();
        if let Some((s, _)) = log_log_fit(ns, &means) {
            slopes.push(s);
        }
    }
    if slopes.is_empty() {
        return None;
    }
    slopes.sort_by(f64::total_cmp);
    let q = |f: f64| slopes[((f * (slopes.len() - 1) as f64).round() as usize).min(slopes.len() - 1)];
    Some((q(0.975) - q(0.025)) / 2.0)
}

/// Frequency of `values >= threshold` and its Monte-Carlo standard error.
pub fn exceedance(values: &[f64], threshold: f64) -> (f64, f64) {
    let r = values.len() as f64;
    let f = values.iter().filter(|&&v| v >= threshold).count() as f64 / r;
    (f, (f * (1.0 - f) / r).sqrt())
}
