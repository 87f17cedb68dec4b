//! Monte Carlo harness: replication targets with frozen college draws,
//! concentration profiles against the bound, proved-bound audits,
//! rank-difference scaling, estimator sweeps and an exchangeability audit.

mod audits;
mod bound;
mod concentration;
mod config;
mod consistency;
mod exchangeability;
mod rankdiff;
mod report;
mod seeds;

pub use audits::{
    bounded_difference_audit, equilibration_audit, perturbation_case, removal_case, BdcRecord, BdcSummary,
    EquilibrationRecord, EquilibrationSummary, PerturbationCase, RemovalCase,
};
pub use bound::{fit_constant, theorem_bound, BoundInputs};
pub use concentration::{concentration_profile, estimate_target, ConcentrationRecord, ConcentrationRow, TargetEstimate};
pub use config::{
    AuditToggles, EstimatorSweep, ExchangeabilitySpec, ExperimentConfig, OutputFormat, OutputSpec, StatisticKind,
    WindowSpec,
};
pub use consistency::{estimator_consistency_sweep, ConsistencyRecord, ConsistencyRow};
pub use exchangeability::{exchangeability_audit, ks_critical_value, ks_statistic, ExchangeRecord, ExchangeSummary};
pub use rankdiff::{rank_difference_scaling, RankDiffRecord, RankDiffRow};
pub use report::{ExperimentKind, ExperimentReport};
pub use seeds::replication_seed;

use rayon::prelude::*;

use crate::algorithms::deferred_acceptance;
use crate::error::Result;
use crate::market::Matching;
use crate::model::{sample_students, scored_profile, CollegeDraw, MarketRealization, ModelConfig};

/// Runs `task(0..count)` in parallel and returns the results in index order.
pub(crate) fn replicate<T, F>(count: usize, task: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    (0..count).into_par_iter().map(task).collect()
}

/// One student draw against a frozen college draw, matched by
/// student-proposing DA.
pub(crate) fn draw_and_match(
    model: &ModelConfig,
    colleges: &CollegeDraw,
    seed: u64,
) -> Result<(MarketRealization, Matching)> {
    let real = sample_students(model, colleges, seed)?;
    let profile = scored_profile(&real);
    let mu = deferred_acceptance(&profile, &real.quotas);
    Ok((real, mu))
}

pub(crate) fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Median of the finite values; `None` when there are none.
pub(crate) fn median(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let mut v: Vec<f64> = values.into_iter().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_unstable_by(f64::total_cmp);
    let k = v.len();
    Some(if k % 2 == 1 { v[k / 2] } else { 0.5 * (v[k / 2 - 1] + v[k / 2]) })
}

pub(crate) fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_helpers() {
        assert_eq!(median([3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median([4.0, 1.0, f64::NAN, 2.0, 3.0]), Some(2.5));
        assert_eq!(median([]), None);
        let (m, se) = mean_and_se(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((se - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(strictly_decreasing(&[3.0, 2.0, 1.0]));
        assert!(!strictly_decreasing(&[3.0, 3.0]));
    }
}
