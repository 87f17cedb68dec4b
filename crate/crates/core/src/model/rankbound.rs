//! Constant `c` for the lower bound `E[h(w)] ≥ 4c⁴(n−2)σ²` under the
//! built-in catalog.
//!
//! The bound is obtained through two estimates:
//! `P{η_2 + 2 < η < η_1 − 2} ≥ 2c` for i.i.d. `η`, and a density of the
//! difference `λ_1 − λ_2` of at least `c` on `[−σ, 0]`. For
//! `λ = X_1 ~ U[0,1]` the difference has the triangular density `1 − |d|`,
//! so the second estimate holds with `c ≤ 1 − σ`. For `η ~ N(0, s²)` the
//! first probability is
//! `p = ∫ φ(x) Φ(x − 2/s) (1 − Φ(x + 2/s)) dx`,
//! evaluated here by composite Simpson quadrature, so `c = min(p/2, 1 − σ)`.

use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use super::config::{LambdaSpec, ModelConfig, NoiseDist};

/// `P{η_2 + 2 < η < η_1 − 2}` for i.i.d. `N(0, sd²)` draws.
pub fn separated_middle_probability(sd: f64) -> f64 {
    let std = Normal::standard();
    let gap = 2.0 / sd;
    let (lo, hi, steps) = (-12.0, 12.0, 24_000usize);
    let h = (hi - lo) / steps as f64;
    let f = |x: f64| std.pdf(x) * std.cdf(x - gap) * (1.0 - std.cdf(x + gap));
    let mut s = f(lo) + f(hi);
    for k in 1..steps {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(lo + k as f64 * h);
    }
    s * h / 3.0
}

/// The constant `c`, or `None` when the catalog entry does not satisfy the
/// premises (non-normal `η`, `λ` other than the first coordinate, `σ ≥ 1`).
pub fn proposition1_constant(config: &ModelConfig) -> Option<f64> {
    let sigma = config.sigma_n();
    if !matches!(config.lambda, LambdaSpec::FirstCoordinate) || sigma >= 1.0 {
        return None;
    }
    let NoiseDist::Normal { sd } = config.eta else {
        return None;
    };
    Some((separated_middle_probability(sd) / 2.0).min(1.0 - sigma))
}

/// `4c⁴(n−2)σ²`.
pub fn rank_difference_lower_bound(c: f64, n: usize, sigma: f64) -> f64 {
    4.0 * c.powi(4) * n.saturating_sub(2) as f64 * sigma * sigma
}
