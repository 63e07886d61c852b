//! Closed-form rate bounds on `E[W_p^p(μ, μ̂_n)]` and the two tail bounds.
//!
//! A failed hypothesis does not raise an error: the report carries the
//! reason and is excluded from comparisons. Nonsensical inputs (`p < 1`,
//! `n = 0`, negative scales) are input errors. Logs are natural.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundId {
    RelaxedUpper,
    FiniteSampleUpper,
    SqrtBound,
    Clusterable,
    GaussianMixture,
    ApproxLowDim,
    ConcentrateNearS,
    GaussianTail,
    ConcentrationTail,
}

impl BoundId {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundId::RelaxedUpper => "relaxed_upper",
            BoundId::FiniteSampleUpper => "finite_sample_upper",
            BoundId::SqrtBound => "sqrt_bound",
            BoundId::Clusterable => "clusterable",
            BoundId::GaussianMixture => "gaussian_mixture",
            BoundId::ApproxLowDim => "approx_low_dim",
            BoundId::ConcentrateNearS => "concentrate_near_s",
            BoundId::GaussianTail => "gaussian_tail",
            BoundId::ConcentrationTail => "concentration_tail",
        }
    }
}

/// Parameters a bound was evaluated at; absent ones do not apply.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_prime: Option<f64>,
    /// Mass exponent `sp/(s - 2p)` of the relaxed bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_n: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_n: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Precondition {
    Satisfied,
    Violated { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub id: BoundId,
    pub params: BoundParams,
    pub precondition: Precondition,
    /// Nonnegative; infinite where the formula is undefined.
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
    /// Largest `n` covered by the hypothesis, when the bound has one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BoundReport {
    pub fn applicable(&self) -> bool {
        self.precondition == Precondition::Satisfied
    }

    /// The value, only when the hypotheses hold.
    pub fn applicable_value(&self) -> Option<f64> {
        self.applicable().then_some(self.value)
    }

    fn new(id: BoundId, params: BoundParams, value: f64, failures: Vec<String>) -> Self {
        let value = if value.is_finite() && value >= 0.0 {
            value
        } else {
            f64::INFINITY
        };
        Self {
            id,
            params,
            precondition: if failures.is_empty() {
                Precondition::Satisfied
            } else {
                Precondition::Violated {
                    reason: failures.join("; "),
                }
            },
            value,
            c1: None,
            c2: None,
            horizon: None,
            note: None,
        }
    }
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::input(format!("exponent p must be a finite real >= 1, got {p}")))
    }
}

fn check_n(n: u64) -> Result<()> {
    if n >= 1 {
        Ok(())
    } else {
        Err(Error::input("sample size must be at least 1"))
    }
}

fn check_pos(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::input(format!("{name} must be a positive real, got {v}")))
    }
}

/// `27^p (2 + 1/(3^{d/2 - p} - 1))`, shared by the bounds at dimension `d`.
pub fn low_dim_constant(p: f64, d: f64) -> f64 {
    27f64.powf(p) * (2.0 + 1.0 / (3f64.powf(d / 2.0 - p) - 1.0))
}

/// `C_1 n^{-p/s} + C_2 n^{-1/2}` under `d_ε(μ, ε^{sp/(s-2p)}) ≤ s` for `ε ≤ ε'`.
pub fn relaxed_upper(p: f64, s: f64, eps_prime: f64, n: u64) -> Result<BoundReport> {
    check_p(p)?;
    check_n(n)?;
    check_pos("s", s)?;
    check_pos("eps'", eps_prime)?;
    let mut failures = Vec::new();
    if s <= 2.0 * p {
        failures.push(format!("s = {s} must exceed 2p = {}", 2.0 * p));
    }
    if eps_prime > 1.0 {
        failures.push(format!("eps' = {eps_prime} must be at most 1"));
    }
    let c1 = 3f64.powf(3.0 * s * p / (s - 2.0 * p) + 1.0) * (1.0 / (3f64.powf(s / 2.0 - p) - 1.0) + 3.0);
    let c2 = (27.0 / eps_prime).powf(s / 2.0);
    let nf = n as f64;
    let params = BoundParams {
        p: Some(p),
        s: Some(s),
        eps_prime: Some(eps_prime),
        alpha: Some(s * p / (s - 2.0 * p)),
        n: Some(n),
        ..Default::default()
    };
    let mut r = BoundReport::new(
        BoundId::RelaxedUpper,
        params,
        c1 * nf.powf(-p / s) + c2 / nf.sqrt(),
        failures,
    );
    r.c1 = Some(c1);
    r.c2 = Some(c2);
    if nf < (27.0 / eps_prime).powf(s) {
        r.note = Some("n < (27/eps')^s: the bound holds trivially since W_p^p <= diam^p = 1".into());
    }
    Ok(r)
}

/// `C_1 n^{-p/d_n}` for `d_n > 2p`.
pub fn finite_sample_upper(p: f64, d_n: f64, n: u64) -> Result<BoundReport> {
    check_p(p)?;
    check_n(n)?;
    if !(d_n >= 0.0 && d_n.is_finite()) {
        return Err(Error::input(format!(
            "d_n must be a finite nonnegative real, got {d_n}"
        )));
    }
    let mut failures = Vec::new();
    if d_n <= 2.0 * p {
        failures.push(format!(
            "d_n = {d_n} must exceed 2p = {}; use the square-root bound",
            2.0 * p
        ));
    }
    let c1 = low_dim_constant(p, d_n);
    let params = BoundParams {
        p: Some(p),
        d_n: Some(d_n),
        n: Some(n),
        ..Default::default()
    };
    let mut r = BoundReport::new(
        BoundId::FiniteSampleUpper,
        params,
        c1 * (n as f64).powf(-p / d_n),
        failures,
    );
    r.c1 = Some(c1);
    Ok(r)
}

fn sqrt_value(p: f64, m: f64, n: u64) -> (f64, f64) {
    let c1 = 9f64.powf(p) + 3.0;
    (c1, c1 * (m / n as f64).sqrt())
}

/// `(9^p + 3) √(m_n / n)`.
pub fn sqrt_bound(p: f64, m_n: f64, n: u64) -> Result<BoundReport> {
    check_p(p)?;
    check_n(n)?;
    check_pos("m_n", m_n)?;
    let mut failures = Vec::new();
    if m_n < 1.0 {
        failures.push(format!("m_n = {m_n} must be at least 1"));
    }
    let (c1, v) = sqrt_value(p, m_n, n);
    let params = BoundParams {
        p: Some(p),
        m_n: Some(m_n),
        n: Some(n),
        ..Default::default()
    };
    let mut r = BoundReport::new(BoundId::SqrtBound, params, v, failures);
    r.c1 = Some(c1);
    Ok(r)
}

/// `(9^p + 3) √(m / n)` for an `(m, Δ)`-clusterable law, `n ≤ m (2Δ)^{-2p}`.
pub fn clusterable_bound(p: f64, m: u64, delta: f64, n: u64) -> Result<BoundReport> {
    check_p(p)?;
    check_n(n)?;
    check_n(m)?;
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::input(format!("cluster radius must be nonnegative, got {delta}")));
    }
    let horizon = m as f64 * (2.0 * delta).powf(-2.0 * p);
    let mut failures = Vec::new();
    if n as f64 > horizon {
        failures.push(format!("n = {n} exceeds the horizon m(2Δ)^(-2p) = {horizon}"));
    }
    let (c1, v) = sqrt_value(p, m as f64, n);
    let params = BoundParams {
        p: Some(p),
        m: Some(m as f64),
        delta: Some(delta),
        n: Some(n),
        ..Default::default()
    };
    let mut r = BoundReport::new(BoundId::Clusterable, params, v, failures);
    r.c1 = Some(c1);
    r.horizon = Some(horizon);
    Ok(r)
}

/// `(9^p + 3) √(m / n)` for a mixture of `m` Gaussians with covariance trace
/// at most `σ²`, when `p log(1/σ) ≥ 25/4` and `n ≤ m (16σ² p log(1/σ))^{-p}`.
pub fn gaussian_mixture_bound(p: f64, m: u64, sigma: f64, n: u64) -> Result<BoundReport> {
    check_p(p)?;
    check_n(n)?;
    check_n(m)?;
    check_pos("sigma", sigma)?;
    let lg = (1.0 / sigma).ln();
    let mut failures = Vec::new();
    if p * lg < 25.0 / 4.0 {
        failures.push(format!("p log(1/sigma) = {} is below 25/4", p * lg));
    }
    let horizon = if lg > 0.0 {
        m as f64 * (16.0 * sigma * sigma * p * lg).powf(-p)
    } else {
        0.0
    };
    if n as f64 > horizon {
        failures.push(format!(
            "n = {n} exceeds the horizon m(16 sigma^2 p log(1/sigma))^(-p) = {horizon}"
        ));
    }
    let (c1, v) = sqrt_value(p, m as f64, n);
    let params = BoundParams {
        p: Some(p),
        m: Some(m as f64),
        sigma: Some(sigma),
        n: Some(n),
        ..Default::default()
    };
    let mut r = BoundReport::new(BoundId::GaussianMixture, params, v, failures);
    r.c1 = Some(c1);
    r.horizon = Some(horizon);
    Ok(r)
}

/// `C_1 n^{-p/d}` for a law supported on the `ε`-fattening of a `d`-regular
/// set, `n ≤ (3ε)^{-d}`.
pub fn approx_low_dim_bound(p: f64, d: f64, eps: f64, n: u64) -> Result<BoundReport> {
    check_p(p)?;
    check_n(n)?;
    check_pos("d", d)?;
    check_pos("eps", eps)?;
    let horizon = (3.0 * eps).powf(-d);
    let mut failures = Vec::new();
    if d <= 2.0 * p {
        failures.push(format!("d = {d} must exceed 2p = {}", 2.0 * p));
    }
    if n as f64 > horizon {
        failures.push(format!("n = {n} exceeds the horizon (3 eps)^(-d) = {horizon}"));
    }
    let c1 = low_dim_constant(p, d);
    let params = BoundParams {
        p: Some(p),
        d: Some(d),
        eps: Some(eps),
        n: Some(n),
        ..Default::default()
    };
    let mut r = BoundReport::new(BoundId::ApproxLowDim, params, c1 * (n as f64).powf(-p / d), failures);
    r.c1 = Some(c1);
    r.horizon = Some(horizon);
    Ok(r)
}

/// `C_1 n^{-p/d}` for a law with sub-Gaussian distance to a `d`-regular set,
/// when `p log(1/σ) ≥ 1/18` and `n ≤ (18 p σ² log(1/σ))^{-d/2}`.
pub fn concentrate_near_s_bound(p: f64, d: f64, sigma: f64, n: u64) -> Result<BoundReport> {
    check_p(p)?;
    check_n(n)?;
    check_pos("d", d)?;
    check_pos("sigma", sigma)?;
    let lg = (1.0 / sigma).ln();
    let mut failures = Vec::new();
    if d <= 2.0 * p {
        failures.push(format!("d = {d} must exceed 2p = {}", 2.0 * p));
    }
    if p * lg < 1.0 / 18.0 {
        failures.push(format!("p log(1/sigma) = {} is below 1/18", p * lg));
    }
    let horizon = if lg > 0.0 {
        (18.0 * p * sigma * sigma * lg).powf(-d / 2.0)
    } else {
        0.0
    };
    if n as f64 > horizon {
        failures.push(format!(
            "n = {n} exceeds the horizon (18 p sigma^2 log(1/sigma))^(-d/2) = {horizon}"
        ));
    }
    let c1 = low_dim_constant(p, d);
    let params = BoundParams {
        p: Some(p),
        d: Some(d),
        sigma: Some(sigma),
        n: Some(n),
        ..Default::default()
    };
    let mut r = BoundReport::new(
        BoundId::ConcentrateNearS,
        params,
        c1 * (n as f64).powf(-p / d),
        failures,
    );
    r.c1 = Some(c1);
    r.horizon = Some(horizon);
    Ok(r)
}

/// `P[‖Z‖² > c² tr Σ] ≤ e^{-c²/4}` for `c ≥ 5`.
pub fn gaussian_tail(c: f64) -> Result<BoundReport> {
    check_pos("c", c)?;
    let mut failures = Vec::new();
    if c < 5.0 {
        failures.push(format!("c = {c} is below 5"));
    }
    let params = BoundParams {
        c: Some(c),
        ..Default::default()
    };
    Ok(BoundReport::new(
        BoundId::GaussianTail,
        params,
        (-c * c / 4.0).exp(),
        failures,
    ))
}

/// `P[W_p^p ≥ E W_p^p + t] ≤ exp(-2 n t²)`.
pub fn concentration_tail(n: u64, t: f64) -> Result<BoundReport> {
    check_n(n)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::input(format!("deviation t must be nonnegative, got {t}")));
    }
    let params = BoundParams {
        t: Some(t),
        n: Some(n),
        ..Default::default()
    };
    Ok(BoundReport::new(
        BoundId::ConcentrationTail,
        params,
        (-2.0 * n as f64 * t * t).exp(),
        Vec::new(),
    ))
}

#[derive(Serialize)]
struct BatchRow<'a> {
    n: Option<u64>,
    bound_id: &'a str,
    value: f64,
    applicable: bool,
}

/// Columns `n, bound_id, value, applicable`.
pub fn write_batch_csv<W: Write>(reports: &[BoundReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        w.serialize(BatchRow {
            n: r.params.n,
            bound_id: r.id.as_str(),
            value: r.value,
            applicable: r.applicable(),
        })?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn relaxed_constants() {
        let r = relaxed_upper(1.0, 4.0, 1.0, 1 << 40).unwrap();
        assert!(r.applicable());
        assert!(close(r.c1.unwrap(), 7654.5, 1e-12));
        assert!(close(r.c2.unwrap(), 729.0, 1e-12));
        assert!(r.note.is_none());
        let small = relaxed_upper(1.0, 4.0, 1.0, 1000).unwrap();
        assert!(small.note.is_some() && small.applicable());
        // As s grows, C_1 tends to 3^{3p+1} * 3.
        let far = relaxed_upper(1.0, 1e6, 1.0, 10).unwrap();
        assert!(close(far.c1.unwrap(), 81.0 * 3.0, 1e-4));
        assert!(!relaxed_upper(1.0, 2.0, 1.0, 10).unwrap().applicable());
        assert!(!relaxed_upper(1.0, 5.0, 1.5, 10).unwrap().applicable());
    }

    #[test]
    fn finite_sample_constants() {
        assert!(close(
            finite_sample_upper(1.0, 4.0, 10).unwrap().c1.unwrap(),
            67.5,
            1e-12
        ));
        assert!(close(
            finite_sample_upper(1.0, 6.0, 10).unwrap().c1.unwrap(),
            57.375,
            1e-12
        ));
        let v = finite_sample_upper(1.0, 2.0, 10).unwrap();
        assert!(!v.applicable() && v.applicable_value().is_none());
        assert!(v.value >= 0.0);
    }

    #[test]
    fn sqrt_values() {
        assert!(close(sqrt_bound(2.0, 1.0, 64).unwrap().value, 10.5, 1e-12));
        assert!(close(sqrt_bound(1.0, 8.0, 800).unwrap().value, 1.2, 1e-12));
        assert!(!sqrt_bound(1.0, 0.5, 800).unwrap().applicable());
    }

    #[test]
    fn horizons() {
        let c = clusterable_bound(1.0, 8, 1e-3, 800).unwrap();
        assert!(close(c.horizon.unwrap(), 2e6, 1e-12) && close(c.value, 1.2, 1e-12));
        assert!(!clusterable_bound(1.0, 8, 1e-3, 2_000_001).unwrap().applicable());
        assert_eq!(
            clusterable_bound(1.0, 8, 0.0, 1 << 60).unwrap().horizon,
            Some(f64::INFINITY)
        );

        let g = gaussian_mixture_bound(1.0, 10, 1e-3, 1000).unwrap();
        assert!(close(g.horizon.unwrap(), 9.05e4, 1e-3) && g.applicable());
        assert!(gaussian_mixture_bound(1.0, 10, (-7f64).exp(), 10).unwrap().applicable());
        let weak = gaussian_mixture_bound(1.0, 10, 0.1, 10).unwrap();
        match weak.precondition {
            Precondition::Violated { reason } => assert!(reason.contains("25/4")),
            _ => panic!("expected a violation"),
        }

        let a = approx_low_dim_bound(1.0, 4.0, 1e-2, 100).unwrap();
        assert!(close(a.horizon.unwrap(), 1.2346e6, 1e-4) && close(a.c1.unwrap(), 67.5, 1e-12));
        let s = concentrate_near_s_bound(1.0, 4.0, 1e-2, 100).unwrap();
        assert!(close(s.horizon.unwrap(), 14553.3717, 1e-8) && s.applicable());
    }

    #[test]
    fn tails() {
        assert!(close(gaussian_tail(5.0).unwrap().value, 1.930454e-3, 1e-6));
        assert!(close(gaussian_tail(6.0).unwrap().value, 1.2341e-4, 1e-4));
        assert!(!gaussian_tail(4.0).unwrap().applicable());
        assert_eq!(concentration_tail(10, 0.0).unwrap().value, 1.0);
        assert!(close(concentration_tail(100, 0.1).unwrap().value, (-2f64).exp(), 1e-12));
        assert!(close(
            concentration_tail(200, 0.05).unwrap().value,
            (-1f64).exp(),
            1e-12
        ));
    }

    #[test]
    fn bad_inputs_are_errors() {
        assert!(sqrt_bound(0.5, 1.0, 10).is_err());
        assert!(sqrt_bound(1.0, 1.0, 0).is_err());
        assert!(gaussian_mixture_bound(1.0, 3, -1.0, 10).is_err());
        assert!(concentration_tail(10, -0.1).is_err());
    }

    #[test]
    fn batch_csv() {
        let rs = vec![
            sqrt_bound(1.0, 4.0, 100).unwrap(),
            finite_sample_upper(1.0, 1.0, 100).unwrap(),
        ];
        let mut buf = Vec::new();
        write_batch_csv(&rs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,bound_id,value,applicable");
        let row: Vec<&str> = lines[1].split(',').collect();
        assert_eq!((row[0], row[1], row[3]), ("100", "sqrt_bound", "true"));
        assert!(close(row[2].parse().unwrap(), 2.4, 1e-12));
        assert!(lines[2].ends_with(",false"));
        let json = serde_json::to_string(&rs[0]).unwrap();
        assert!(json.contains("\"status\":\"satisfied\""));
    }

    proptest! {
        #[test]
        fn finite_sample_matches_low_dim(p in 1.0..3.0f64, extra in 0.01..20.0f64, n in 1u64..1_000_000) {
            let d = 2.0 * p + extra;
            let a = finite_sample_upper(p, d, n).unwrap();
            let b = approx_low_dim_bound(p, d, 1e-9, n).unwrap();
            prop_assert_eq!(a.value, b.value);
            prop_assert!(a.applicable() && b.applicable());
            prop_assert!(a.value.is_finite() && a.value > 0.0);
        }

        #[test]
        fn low_dim_constant_decreases(p in 1.0..3.0f64, d in 0.01..20.0f64, step in 0.01..5.0f64) {
            let d = 2.0 * p + d;
            prop_assert!(low_dim_constant(p, d + step) < low_dim_constant(p, d));
        }

        #[test]
        fn evaluators_are_pure(p in 1.0..3.0f64, s in 0.5..12.0f64, n in 1u64..100_000) {
            prop_assert_eq!(relaxed_upper(p, s, 0.5, n).unwrap(), relaxed_upper(p, s, 0.5, n).unwrap());
            let r = relaxed_upper(p, s, 0.5, n).unwrap();
            prop_assert!(r.value >= 0.0);
        }
    }
}
