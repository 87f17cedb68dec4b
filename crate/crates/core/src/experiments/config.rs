use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::Matching;
use crate::model::{CollegeDraw, MarketRealization, ModelConfig, SigmaSpec};
use crate::stats::{
    theta_hat, CollegeIndicator, FnStatistic, Kernel, KernelWeight, ObservationWindow, Ones, ThetaHat,
};

/// Settings shared by every experiment kind. Empty grids fall back to the
/// model's own `n`, `m` and `σ` rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    #[serde(default = "default_replications")]
    pub replications: usize,
    /// Target replications per statistic replication.
    #[serde(default = "default_target_multiplier")]
    pub target_multiplier: usize,
    #[serde(default)]
    pub n_grid: Vec<usize>,
    #[serde(default)]
    pub m_grid: Vec<usize>,
    #[serde(default)]
    pub sigma_grid: Vec<f64>,
    #[serde(default = "default_t_grid")]
    pub t_grid: Vec<f64>,
    #[serde(default)]
    pub statistic: StatisticKind,
    #[serde(default)]
    pub window: WindowSpec,
    #[serde(default)]
    pub audits: AuditToggles,
    #[serde(default)]
    pub estimators: EstimatorSweep,
    #[serde(default)]
    pub exchangeability: ExchangeabilitySpec,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_replications() -> usize {
    200
}

fn default_target_multiplier() -> usize {
    20
}

fn default_t_grid() -> Vec<f64> {
    vec![0.005, 0.01, 0.02, 0.04, 0.08]
}

impl ExperimentConfig {
    pub fn new(model: ModelConfig) -> Self {
        ExperimentConfig {
            model,
            replications: default_replications(),
            target_multiplier: default_target_multiplier(),
            n_grid: Vec::new(),
            m_grid: Vec::new(),
            sigma_grid: Vec::new(),
            t_grid: default_t_grid(),
            statistic: StatisticKind::default(),
            window: WindowSpec::default(),
            audits: AuditToggles::default(),
            estimators: EstimatorSweep::default(),
            exchangeability: ExchangeabilitySpec::default(),
            output: OutputSpec::default(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.model.seed
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        self.model.validate()?;
        // TOML integers are signed 64-bit
        if self.model.seed > i64::MAX as u64 {
            return bad(format!("seed {} exceeds {}", self.model.seed, i64::MAX));
        }
        if self.replications < 2 {
            return bad(format!("replications must be >= 2, got {}", self.replications));
        }
        if self.target_multiplier == 0 {
            return bad("target_multiplier must be >= 1".into());
        }
        if self.n_grid.contains(&0) || self.m_grid.contains(&0) {
            return bad("grid entries for n and m must be positive".into());
        }
        if let Some(s) = self.sigma_grid.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
            return bad(format!("sigma grid entries must be finite and >= 0, got {s}"));
        }
        if self.t_grid.is_empty() {
            return bad("t_grid must be nonempty".into());
        }
        if let Some(t) = self.t_grid.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return bad(format!("t_grid entries must be finite and >= 0, got {t}"));
        }
        for cell in self.cells() {
            cell.validate()?;
            self.statistic.validate(cell.m)?;
        }
        self.window.validate()?;
        self.estimators.validate()?;
        self.exchangeability.validate()?;
        Ok(())
    }

    pub fn n_values(&self) -> Vec<usize> {
        if self.n_grid.is_empty() {
            vec![self.model.n]
        } else {
            self.n_grid.clone()
        }
    }

    pub fn m_values(&self) -> Vec<usize> {
        if self.m_grid.is_empty() {
            vec![self.model.m]
        } else {
            self.m_grid.clone()
        }
    }

    pub fn sigma_values(&self) -> Vec<SigmaSpec> {
        if self.sigma_grid.is_empty() {
            vec![self.model.sigma.clone()]
        } else {
            self.sigma_grid.iter().map(|&value| SigmaSpec::Fixed { value }).collect()
        }
    }

    /// The model at `n`, with everything else unchanged.
    pub fn model_at(&self, n: usize) -> ModelConfig {
        ModelConfig { n, ..self.model.clone() }
    }

    /// Cartesian product `n_grid × m_grid × sigma_grid`, `n` varying slowest.
    pub fn cells(&self) -> Vec<ModelConfig> {
        let mut out = Vec::new();
        for &n in &self.n_values() {
            for &m in &self.m_values() {
                for sigma in self.sigma_values() {
                    out.push(ModelConfig { n, m, sigma, ..self.model.clone() });
                }
            }
        }
        out
    }
}

/// Selector for the statistic `θ̂(τ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StatisticKind {
    /// Share of window students matched to `college` (`0` = unmatched).
    MatchingFrequency { college: u32 },
    /// Share of window students matched to any college.
    MatchedShare,
    /// `τ_j = 1{X_{i,x_coord} ≤ x_max, Z_{j,z_coord} ≥ z_min}` over all of
    /// `M_Z`.
    CharacteristicBox {
        x_coord: usize,
        x_max: f64,
        z_coord: usize,
        z_min: f64,
    },
    /// `τ_j = K((X_i − point) / bandwidth)` at every college `j ≥ 1`.
    KernelMass {
        point: Vec<f64>,
        bandwidth: f64,
        #[serde(default)]
        kernel: Kernel,
    },
}

impl Default for StatisticKind {
    fn default() -> Self {
        StatisticKind::MatchingFrequency { college: 1 }
    }
}

impl StatisticKind {
    pub fn validate(&self, m: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        match self {
            StatisticKind::MatchingFrequency { college } if *college as usize > m => {
                bad(format!("statistic college {college} exceeds m = {m}"))
            }
            StatisticKind::CharacteristicBox { x_max, z_min, .. } if x_max.is_nan() || z_min.is_nan() => {
                bad("characteristic box bounds are NaN".into())
            }
            StatisticKind::KernelMass { point, bandwidth, .. }
                if point.is_empty() || !(*bandwidth > 0.0 && bandwidth.is_finite()) =>
            {
                bad("kernel statistic needs a point and a positive bandwidth".into())
            }
            _ => Ok(()),
        }
    }

    /// Evaluates `θ̂` on `matching`, restricting the window's colleges as the
    /// statistic requires.
    pub fn evaluate(
        &self,
        matching: &Matching,
        real: &MarketRealization,
        window: &ObservationWindow,
    ) -> Result<ThetaHat> {
        let x = real.x_chars();
        let z = real.z_chars();
        let colleges_only = || window.with_colleges((1..=real.m as u32).collect());
        match self {
            StatisticKind::MatchingFrequency { college } => {
                let w = window.with_colleges(vec![*college])?;
                theta_hat(matching, &x, &z, &CollegeIndicator { college: *college }, &w)
            }
            StatisticKind::MatchedShare => theta_hat(matching, &x, &z, &Ones, &colleges_only()?),
            StatisticKind::CharacteristicBox { x_coord, x_max, z_coord, z_min } => {
                if *x_coord >= real.x_dim || *z_coord >= real.z_dim {
                    return Err(Error::Config("characteristic box coordinate out of range".into()));
                }
                let tau = |j: u32, xi: &[f64], z: &crate::stats::Characteristics<'_>| {
                    let hit = j != 0 && xi[*x_coord] <= *x_max && z.row(j as usize - 1)[*z_coord] >= *z_min;
                    f64::from(u8::from(hit))
                };
                let spec = FnStatistic { tau, bound: 1.0, oscillation: 1.0 };
                theta_hat(matching, &x, &z, &spec, window)
            }
            StatisticKind::KernelMass { point, bandwidth, kernel } => {
                if point.len() != real.x_dim {
                    return Err(Error::Config("kernel point dimension differs from x_dim".into()));
                }
                let spec = KernelWeight { point: point.clone(), bandwidth: *bandwidth, kernel: *kernel };
                theta_hat(matching, &x, &z, &spec, &colleges_only()?)
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum WindowSpec {
    #[default]
    Full,
    /// First `ceil(fraction · n)` students of a `Z̃`-seeded permutation.
    Fraction { fraction: f64 },
}

impl WindowSpec {
    fn validate(&self) -> Result<()> {
        match *self {
            WindowSpec::Fraction { fraction } if !(fraction > 0.0 && fraction <= 1.0) => {
                Err(Error::Config(format!("window fraction {fraction} outside (0, 1]")))
            }
            _ => Ok(()),
        }
    }

    pub fn build(&self, n: usize, colleges: &CollegeDraw) -> Result<ObservationWindow> {
        match *self {
            WindowSpec::Full => Ok(ObservationWindow::full(n, colleges.m)),
            WindowSpec::Fraction { fraction } => ObservationWindow::fraction(n, colleges, fraction),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditToggles {
    /// Also run college-proposing DA in the bounded-difference audit.
    #[serde(default = "yes")]
    pub college_proposing: bool,
    /// Check the fill-count dichotomy in the equilibration audit.
    #[serde(default = "yes")]
    pub fill_counts: bool,
}

fn yes() -> bool {
    true
}

impl Default for AuditToggles {
    fn default() -> Self {
        AuditToggles { college_proposing: true, fill_counts: true }
    }
}

/// Settings of the estimator-consistency sweep. Requires `x_dim = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSweep {
    /// Oracle replications at the largest grid `n`, as a multiple of `R`.
    #[serde(default = "default_oracle_multiplier")]
    pub oracle_multiplier: usize,
    /// Probe points for the kernel estimate of `p(j | x, Z̃)`.
    #[serde(default = "default_probes")]
    pub probe_points: Vec<f64>,
    /// Half-width of the bins that pool oracle draws around each probe.
    #[serde(default = "default_oracle_bin")]
    pub oracle_bin: f64,
    /// Number of evenly spaced points in `[0, 1]` for the CDF sup-norm.
    #[serde(default = "default_cdf_points")]
    pub cdf_points: usize,
    /// Colleges with oracle match probability at or below this are not probed.
    #[serde(default = "default_min_probability")]
    pub min_probability: f64,
    /// `ρ` oracle market size as a multiple of the largest grid `n`.
    #[serde(default = "default_rho_scale")]
    pub rho_oracle_scale: usize,
    #[serde(default = "default_rho_reps")]
    pub rho_oracle_replications: usize,
    #[serde(default)]
    pub rho_x_coord: usize,
    #[serde(default)]
    pub rho_z_coord: usize,
    #[serde(default)]
    pub kernel: Kernel,
}

fn default_oracle_multiplier() -> usize {
    10
}
fn default_probes() -> Vec<f64> {
    vec![0.3, 0.5, 0.7]
}
fn default_oracle_bin() -> f64 {
    0.01
}
fn default_cdf_points() -> usize {
    201
}
fn default_min_probability() -> f64 {
    0.02
}
fn default_rho_scale() -> usize {
    10
}
fn default_rho_reps() -> usize {
    4
}

impl Default for EstimatorSweep {
    fn default() -> Self {
        EstimatorSweep {
            oracle_multiplier: default_oracle_multiplier(),
            probe_points: default_probes(),
            oracle_bin: default_oracle_bin(),
            cdf_points: default_cdf_points(),
            min_probability: default_min_probability(),
            rho_oracle_scale: default_rho_scale(),
            rho_oracle_replications: default_rho_reps(),
            rho_x_coord: 0,
            rho_z_coord: 0,
            kernel: Kernel::default(),
        }
    }
}

impl EstimatorSweep {
    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.into()));
        if self.oracle_multiplier == 0 || self.rho_oracle_scale == 0 || self.rho_oracle_replications == 0 {
            return bad("oracle multipliers and replications must be positive");
        }
        if self.cdf_points < 2 {
            return bad("cdf_points must be >= 2");
        }
        if !(self.oracle_bin > 0.0 && self.oracle_bin.is_finite()) {
            return bad("oracle_bin must be positive");
        }
        if !(0.0..1.0).contains(&self.min_probability) {
            return bad("min_probability must lie in [0, 1)");
        }
        if self.probe_points.iter().any(|p| !p.is_finite()) {
            return bad("probe points must be finite");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExchangeabilitySpec {
    /// Independent audit runs, each with `R` replications per half.
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

fn default_runs() -> usize {
    20
}
fn default_alpha() -> f64 {
    0.01
}

impl Default for ExchangeabilitySpec {
    fn default() -> Self {
        ExchangeabilitySpec { runs: default_runs(), alpha: default_alpha() }
    }
}

impl ExchangeabilitySpec {
    fn validate(&self) -> Result<()> {
        if self.runs == 0 || !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config("exchangeability needs runs >= 1 and alpha in (0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Jsonl,
    #[default]
    Both,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_out_dir")]
    pub dir: String,
    #[serde(default)]
    pub format: OutputFormat,
}

fn default_out_dir() -> String {
    "out".into()
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { dir: default_out_dir(), format: OutputFormat::default() }
    }
}
