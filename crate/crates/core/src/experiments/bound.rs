use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inputs of the concentration bound
/// `4 exp(−C n_Z (t² ∧ t^(3/2)) / (c̄² + b̄² (a_{n,Z} + b_{n,Z} t)))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub n_z: usize,
    pub m: usize,
    pub m_z: usize,
    pub sigma_n: f64,
    pub b_bar: f64,
    pub c_bar: f64,
    pub c: f64,
}

impl BoundInputs {
    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = |v: f64| v.is_finite() && v >= 0.0;
        if self.n_z == 0 || self.m == 0 {
            return Err(Error::InvalidStatistic("bound needs n_Z >= 1 and m >= 1".into()));
        }
        if !(finite_nonneg(self.sigma_n) && finite_nonneg(self.b_bar) && finite_nonneg(self.c_bar)) {
            return Err(Error::InvalidStatistic("sigma_n, b_bar, c_bar must be finite and >= 0".into()));
        }
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::InvalidStatistic(format!("constant C must be positive, got {}", self.c)));
        }
        Ok(())
    }

    /// `σ_n ∨ n_Z^(−5/6)`.
    fn scale(&self) -> f64 {
        self.sigma_n.max((self.n_z as f64).powf(-5.0 / 6.0))
    }

    /// `a_{n,Z} = n_Z² (σ_n ∨ n_Z^(−5/6))² ln(n_Z m) + 1`.
    pub fn a_nz(&self) -> f64 {
        let nz = self.n_z as f64;
        nz * nz * self.scale().powi(2) * (nz * self.m as f64).ln() + 1.0
    }

    /// `b_{n,Z} = n_Z^(3/2) (σ_n ∨ n_Z^(−5/6)) + 1`.
    pub fn b_nz(&self) -> f64 {
        (self.n_z as f64).powf(1.5) * self.scale() + 1.0
    }

    /// The exponent without `C`: `n_Z (t² ∧ t^(3/2)) / (c̄² + b̄² (a + b t))`.
    pub fn exponent(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        let num = self.n_z as f64 * (t * t).min(t.powf(1.5));
        let den = self.c_bar * self.c_bar + self.b_bar * self.b_bar * (self.a_nz() + self.b_nz() * t);
        if den == 0.0 {
            f64::INFINITY
        } else {
            num / den
        }
    }
}

/// Evaluates the bound at deviation `t ≥ 0`.
pub fn theorem_bound(inputs: &BoundInputs, t: f64) -> Result<f64> {
    inputs.validate()?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidStatistic(format!("deviation t must be finite and >= 0, got {t}")));
    }
    Ok(4.0 * (-inputs.c * inputs.exponent(t)).exp())
}

/// Least-squares `C` through the origin for `ln(tail / 4) ≈ −C g`, over the
/// `(g, tail)` pairs with a positive tail. `None` when no pair carries
/// information.
pub fn fit_constant(points: &[(f64, f64)]) -> Option<f64> {
    let (mut gy, mut gg) = (0.0, 0.0);
    for &(g, p) in points {
        if p > 0.0 && g.is_finite() && g > 0.0 {
            gy += g * (p / 4.0).ln();
            gg += g * g;
        }
    }
    (gg > 0.0).then(|| -gy / gg)
}
