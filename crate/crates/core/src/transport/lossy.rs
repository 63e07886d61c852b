/// `τ 4^{-p} n^{-p/t}`: the lower bound on `W_p^p(μ, ν)` for any `ν` with at
/// most `n` atoms, valid when `N_ε(μ, τ) >= ε^{-t}` at `ε = n^{-1/t}/2`.
pub fn lossy_lower_value(tau: f64, p: f64, t: f64, n: f64) -> f64 {
    tau * 4f64.powf(-p) * n.powf(-p / t)
}

/// The scale at which the covering premise is consumed for `n` atoms.
pub fn lossy_scale(t: f64, n: f64) -> f64 {
    n.powf(-1.0 / t) / 2.0
}
