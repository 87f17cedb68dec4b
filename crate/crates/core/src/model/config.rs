use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::Quotas;

/// Parameters of the random market model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub n: usize,
    pub m: usize,
    #[serde(default)]
    pub quotas: QuotaSpec,
    #[serde(default)]
    pub sigma: SigmaSpec,
    #[serde(default)]
    pub lambda: LambdaSpec,
    #[serde(default)]
    pub utility: UtilitySpec,
    #[serde(default)]
    pub eta: NoiseDist,
    #[serde(default)]
    pub eps: NoiseDist,
    #[serde(default)]
    pub thresholds: ThresholdSpec,
    #[serde(default = "one")]
    pub x_dim: usize,
    #[serde(default = "one")]
    pub z_dim: usize,
    /// Utility of the outside option, shared by all students.
    #[serde(default)]
    pub outside_utility: f64,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> usize {
    1
}

impl ModelConfig {
    /// Default specs everywhere.
    pub fn new(n: usize, m: usize) -> Self {
        ModelConfig {
            n,
            m,
            quotas: QuotaSpec::default(),
            sigma: SigmaSpec::default(),
            lambda: LambdaSpec::default(),
            utility: UtilitySpec::default(),
            eta: NoiseDist::default(),
            eps: NoiseDist::default(),
            thresholds: ThresholdSpec::default(),
            x_dim: 1,
            z_dim: 1,
            outside_utility: 0.0,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = SigmaSpec::Fixed { value: sigma };
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidModel(msg));
        if self.n == 0 || self.m == 0 {
            return bad(format!("need n >= 1 and m >= 1, got n = {}, m = {}", self.n, self.m));
        }
        if self.x_dim == 0 || self.z_dim == 0 {
            return bad("characteristic dimensions must be positive".into());
        }
        if self.outside_utility.is_nan() {
            return bad("outside_utility is NaN".into());
        }
        self.quotas.resolve(self.n, self.m)?;
        self.sigma.validate()?;
        self.lambda.validate(self.x_dim)?;
        self.utility.validate()?;
        self.eta.validate("eta")?;
        self.eta.check_sub_gaussian()?;
        self.eps.validate("eps")?;
        self.thresholds.validate(&self.lambda)?;
        Ok(())
    }

    pub fn sigma_n(&self) -> f64 {
        self.sigma.value(self.n)
    }

    pub fn resolve_quotas(&self) -> Result<Quotas> {
        self.quotas.resolve(self.n, self.m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum QuotaSpec {
    Uniform { q: u32 },
    Explicit { q: Vec<u32> },
    /// `q_j = max(1, ceil(seats_ratio · n / m))`.
    Proportional { seats_ratio: f64 },
}

impl Default for QuotaSpec {
    fn default() -> Self {
        QuotaSpec::Proportional { seats_ratio: 0.8 }
    }
}

impl QuotaSpec {
    pub fn resolve(&self, n: usize, m: usize) -> Result<Quotas> {
        match self {
            QuotaSpec::Uniform { q } => Quotas::uniform(m, *q),
            QuotaSpec::Explicit { q } => {
                if q.len() != m {
                    return Err(Error::InvalidQuotas(format!("{} quotas for {m} colleges", q.len())));
                }
                Quotas::new(q.clone())
            }
            QuotaSpec::Proportional { seats_ratio } => {
                if !(seats_ratio.is_finite() && *seats_ratio > 0.0) {
                    return Err(Error::InvalidQuotas(format!("seats_ratio must be positive, got {seats_ratio}")));
                }
                let q = ((seats_ratio * n as f64) / m as f64).ceil().max(1.0) as u32;
                Quotas::uniform(m, q)
            }
        }
    }
}

/// College heterogeneity scale `σ_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SigmaSpec {
    Fixed { value: f64 },
    /// `kappa · n^(-a) · (ln n)^(-b)`, with `ln n` floored at `ln 3`.
    Schedule { kappa: f64, a: f64, b: f64 },
}

impl Default for SigmaSpec {
    fn default() -> Self {
        SigmaSpec::Schedule { kappa: 1.0, a: 0.75, b: 0.5 }
    }
}

impl SigmaSpec {
    pub fn value(&self, n: usize) -> f64 {
        match *self {
            SigmaSpec::Fixed { value } => value,
            SigmaSpec::Schedule { kappa, a, b } => {
                let n = n.max(3) as f64;
                kappa * n.powf(-a) * n.ln().powf(-b)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            SigmaSpec::Fixed { value } if !(value >= 0.0 && value.is_finite()) => {
                Err(Error::InvalidModel(format!("sigma must be finite and >= 0, got {value}")))
            }
            SigmaSpec::Schedule { kappa, a, b }
                if !(kappa >= 0.0 && kappa.is_finite() && a.is_finite() && b.is_finite()) =>
            {
                Err(Error::InvalidModel("sigma schedule needs finite kappa >= 0, a, b".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Vertical component `λ(S_i)` as a function of `X_i ~ U[0,1]^x_dim`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LambdaSpec {
    #[default]
    FirstCoordinate,
    /// Mean of all coordinates.
    Mean,
}

impl LambdaSpec {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            LambdaSpec::FirstCoordinate => x[0],
            LambdaSpec::Mean => x.iter().sum::<f64>() / x.len() as f64,
        }
    }

    /// Constant `C̄` with `sup_c P{|λ − c| ≤ t} ≤ C̄ t`: twice the maximal
    /// density of `λ`.
    pub fn anti_concentration_constant(&self, x_dim: usize) -> f64 {
        match self {
            LambdaSpec::FirstCoordinate => 2.0,
            LambdaSpec::Mean => 2.0 * x_dim as f64 * irwin_hall_pdf(x_dim, x_dim as f64 / 2.0),
        }
    }

    fn validate(&self, x_dim: usize) -> Result<()> {
        if matches!(self, LambdaSpec::Mean) && x_dim > 30 {
            return Err(Error::InvalidModel("mean lambda supports x_dim <= 30".into()));
        }
        Ok(())
    }

    /// Quantile function of `λ`, when available in closed form.
    pub fn quantile(&self, p: f64) -> Option<f64> {
        match self {
            LambdaSpec::FirstCoordinate => Some(p),
            LambdaSpec::Mean => None,
        }
    }
}

fn irwin_hall_pdf(d: usize, x: f64) -> f64 {
    let mut fact = 1.0;
    for k in 1..d {
        fact *= k as f64;
    }
    let mut binom = 1.0;
    let mut s = 0.0;
    for k in 0..=(x.floor() as usize).min(d) {
        if k > 0 {
            binom *= (d - k + 1) as f64 / k as f64;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * binom * (x - k as f64).powi(d as i32 - 1);
    }
    s / fact
}

/// Systematic part of student utilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum UtilitySpec {
    /// `U_ij = beta · <X_i, Z_j> + xi_weight · ξ_j + ε_ij` over the shared
    /// leading coordinates.
    Dot { beta: f64, xi_weight: f64 },
    /// `U_ij = ε_ij`.
    Zero,
}

impl Default for UtilitySpec {
    fn default() -> Self {
        UtilitySpec::Dot { beta: 1.0, xi_weight: 1.0 }
    }
}

impl UtilitySpec {
    pub fn systematic(&self, x: &[f64], z: &[f64], xi: f64) -> f64 {
        match *self {
            UtilitySpec::Dot { beta, xi_weight } => {
                beta * x.iter().zip(z).map(|(a, b)| a * b).sum::<f64>() + xi_weight * xi
            }
            UtilitySpec::Zero => 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            UtilitySpec::Dot { beta, xi_weight } if !(beta.is_finite() && xi_weight.is_finite()) => {
                Err(Error::InvalidModel("utility coefficients must be finite".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Centered noise distributions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseDist {
    Normal { sd: f64 },
    /// Uniform on `[-half_width, half_width]`.
    Uniform { half_width: f64 },
}

impl Default for NoiseDist {
    fn default() -> Self {
        NoiseDist::Normal { sd: 1.0 }
    }
}

impl NoiseDist {
    fn validate(&self, name: &str) -> Result<()> {
        let ok = match *self {
            NoiseDist::Normal { sd } => sd > 0.0 && sd.is_finite(),
            NoiseDist::Uniform { half_width } => half_width > 0.0 && half_width.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidModel(format!("{name}: scale must be positive and finite")))
        }
    }

    /// `P{|η| > t}`.
    pub fn tail(&self, t: f64) -> f64 {
        match *self {
            NoiseDist::Normal { sd } => {
                use statrs::function::erf::erfc;
                erfc(t / (sd * std::f64::consts::SQRT_2))
            }
            NoiseDist::Uniform { half_width } => (1.0 - t / half_width).clamp(0.0, 1.0),
        }
    }

    /// Requires `P{|η| > t} ≤ 2 exp(−t²/2)` for all `t ≥ 0`. Normal noise
    /// satisfies it iff `sd ≤ 1`; uniform noise is checked on a grid.
    pub fn check_sub_gaussian(&self) -> Result<()> {
        let ok = match *self {
            NoiseDist::Normal { sd } => sd <= 1.0,
            NoiseDist::Uniform { half_width } => (0..=2000).all(|k| {
                let t = half_width * k as f64 / 2000.0;
                self.tail(t) <= 2.0 * (-t * t / 2.0).exp() + 1e-12
            }),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidModel(format!("eta distribution {self:?} violates the sub-Gaussian tail normalization")))
        }
    }
}

/// College acceptability thresholds `c_j`, functions of the college draw.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ThresholdSpec {
    /// `c_j = −∞`: every student acceptable.
    #[default]
    None,
    Constant { value: f64 },
    /// `c_j` equal to the `p`-quantile of `λ`.
    Quantile { p: f64 },
    /// `c_j = intercept + slope · Z_{j1}`.
    Linear { intercept: f64, slope: f64 },
}

impl ThresholdSpec {
    fn validate(&self, lambda: &LambdaSpec) -> Result<()> {
        match *self {
            ThresholdSpec::Quantile { p } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidModel(format!("threshold quantile {p} outside [0, 1]")));
                }
                if lambda.quantile(p).is_none() {
                    return Err(Error::InvalidModel(format!("no closed-form quantile for lambda {lambda:?}")));
                }
                Ok(())
            }
            ThresholdSpec::Constant { value } if value.is_nan() => {
                Err(Error::InvalidModel("threshold is NaN".into()))
            }
            ThresholdSpec::Linear { intercept, slope } if !(intercept.is_finite() && slope.is_finite()) => {
                Err(Error::InvalidModel("threshold coefficients must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, lambda: &LambdaSpec, z_j: &[f64]) -> f64 {
        match *self {
            ThresholdSpec::None => f64::NEG_INFINITY,
            ThresholdSpec::Constant { value } => value,
            ThresholdSpec::Quantile { p } => lambda.quantile(p).expect("validated"),
            ThresholdSpec::Linear { intercept, slope } => intercept + slope * z_j[0],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        ModelConfig::new(10, 2).validate().unwrap();
    }

    #[test]
    fn negative_sigma_rejected() {
        assert!(ModelConfig::new(10, 2).with_sigma(-0.1).validate().is_err());
    }

    #[test]
    fn wide_normal_eta_rejected() {
        let mut c = ModelConfig::new(10, 2);
        c.eta = NoiseDist::Normal { sd: 1.5 };
        assert!(c.validate().is_err());
        c.eta = NoiseDist::Uniform { half_width: 1.7 };
        c.validate().unwrap();
        c.eta = NoiseDist::Uniform { half_width: 3.0 };
        assert!(c.validate().is_err());
    }

    #[test]
    fn proportional_quotas() {
        let q = QuotaSpec::Proportional { seats_ratio: 0.8 }.resolve(100, 3).unwrap();
        assert_eq!(q.as_slice(), &[27, 27, 27]);
    }

    #[test]
    fn schedule_values() {
        let s = SigmaSpec::default();
        let v = s.value(1000);
        assert!((v - 1000f64.powf(-0.75) / 1000f64.ln().sqrt()).abs() < 1e-15);
    }

    #[test]
    fn irwin_hall_mode() {
        assert!((irwin_hall_pdf(1, 0.5) - 1.0).abs() < 1e-12);
        assert!((irwin_hall_pdf(2, 1.0) - 1.0).abs() < 1e-12);
        assert!((irwin_hall_pdf(3, 1.5) - 0.75).abs() < 1e-12);
        assert!((LambdaSpec::Mean.anti_concentration_constant(2) - 4.0).abs() < 1e-12);
    }
}
