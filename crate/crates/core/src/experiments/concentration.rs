use serde::{Deserialize, Serialize};

use super::bound::{fit_constant, BoundInputs};
use super::config::ExperimentConfig;
use super::report::{ExperimentKind, ExperimentReport};
use super::seeds::{replication_seed, salt};
use super::{draw_and_match, mean_and_se, replicate, strictly_decreasing};
use crate::error::Result;
use crate::model::{sample_colleges, CollegeDraw};
use crate::stats::{ObservationWindow, ThetaHat};

/// Replication mean of `θ̂` with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetEstimate {
    pub mean: f64,
    pub se: f64,
    pub replications: usize,
    pub b_bar: f64,
    pub c_bar: f64,
}

fn theta_draws(
    config: &ExperimentConfig,
    colleges: &CollegeDraw,
    window: &ObservationWindow,
    salt: u64,
    count: usize,
) -> Result<Vec<(u64, ThetaHat)>> {
    let model = &config.model;
    replicate(count, |r| {
        let seed = replication_seed(config.seed(), salt, model.n as u64, r as u64);
        let (real, mu) = draw_and_match(model, colleges, seed)?;
        Ok((seed, config.statistic.evaluate(&mu, &real, window)?))
    })
}

/// `θ̃(τ; Z̃)`: mean of `θ̂` over `target_multiplier · R` student draws with
/// `colleges` frozen, at the model's `n`.
pub fn estimate_target(
    config: &ExperimentConfig,
    colleges: &CollegeDraw,
    window: &ObservationWindow,
) -> Result<TargetEstimate> {
    config.validate()?;
    let count = config.target_multiplier * config.replications;
    let draws = theta_draws(config, colleges, window, salt::TARGET, count)?;
    let values: Vec<f64> = draws.iter().map(|(_, t)| t.value).collect();
    let (mean, se) = mean_and_se(&values);
    let first = draws[0].1;
    Ok(TargetEstimate { mean, se, replications: count, b_bar: first.b_bar, c_bar: first.c_bar })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationRecord {
    pub n: usize,
    pub replication_index: usize,
    pub seed: u64,
    pub value: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationRow {
    pub n: usize,
    pub sigma_n: f64,
    pub n_z: usize,
    pub m_z: usize,
    pub b_bar: f64,
    pub c_bar: f64,
    pub target: f64,
    pub target_se: f64,
    pub rms_deviation: f64,
    pub t: f64,
    pub empirical_tail: f64,
    pub a_nz: f64,
    pub b_nz: f64,
    pub exponent: f64,
    pub fitted_bound: Option<f64>,
}

/// Empirical tails `P̂{|θ̂ − θ̃| ≥ t}` over `t_grid` at every grid `n`, with
/// `Z̃` drawn once from the model seed. `C` is fitted at the smallest `n`.
pub fn concentration_profile(config: &ExperimentConfig) -> Result<ExperimentReport<ConcentrationRecord, ConcentrationRow>> {
    config.validate()?;
    let mut ns = config.n_values();
    ns.sort_unstable();
    ns.dedup();
    let colleges = sample_colleges(&config.model, config.seed())?;
    let mut report = ExperimentReport::new(ExperimentKind::Concentration, config.seed());
    let t_min = config.t_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let mut rms_by_n = Vec::new();
    let mut se_ok = true;
    let mut zero_beyond_b = true;

    for &n in &ns {
        let sub = ExperimentConfig { model: config.model_at(n), ..config.clone() };
        let window = config.window.build(n, &colleges)?;
        let target = estimate_target(&sub, &colleges, &window)?;
        se_ok &= target.se < t_min / 10.0;
        let draws = theta_draws(&sub, &colleges, &window, salt::REPLICATION, config.replications)?;
        let deviations: Vec<f64> = draws.iter().map(|(_, t)| t.value - target.mean).collect();
        let rms = (deviations.iter().map(|d| d * d).sum::<f64>() / deviations.len() as f64).sqrt();
        rms_by_n.push(rms);
        for (r, ((seed, theta), dev)) in draws.iter().zip(&deviations).enumerate() {
            report.records.push(ConcentrationRecord {
                n,
                replication_index: r,
                seed: *seed,
                value: theta.value,
                deviation: *dev,
            });
        }
        let inputs = BoundInputs {
            n_z: window.n_z(),
            m: config.model.m,
            m_z: window.m_z(),
            sigma_n: sub.model.sigma_n(),
            b_bar: target.b_bar,
            c_bar: target.c_bar,
            c: 1.0,
        };
        let mut t_sorted = config.t_grid.clone();
        t_sorted.sort_unstable_by(f64::total_cmp);
        for &t in &t_sorted {
            let hits = deviations.iter().filter(|d| d.abs() >= t).count();
            let tail = hits as f64 / deviations.len() as f64;
            if t > target.b_bar {
                zero_beyond_b &= hits == 0;
            }
            report.summary.push(ConcentrationRow {
                n,
                sigma_n: inputs.sigma_n,
                n_z: inputs.n_z,
                m_z: inputs.m_z,
                b_bar: inputs.b_bar,
                c_bar: inputs.c_bar,
                target: target.mean,
                target_se: target.se,
                rms_deviation: rms,
                t,
                empirical_tail: tail,
                a_nz: inputs.a_nz(),
                b_nz: inputs.b_nz(),
                exponent: inputs.exponent(t),
                fitted_bound: None,
            });
        }
    }

    let n0 = ns[0];
    let fit_points: Vec<(f64, f64)> = report
        .summary
        .iter()
        .filter(|row| row.n == n0)
        .map(|row| (row.exponent, row.empirical_tail))
        .collect();
    let fitted = fit_constant(&fit_points);
    if let Some(c) = fitted {
        for row in &mut report.summary {
            row.fitted_bound = Some(4.0 * (-c * row.exponent).exp());
        }
        report.scalars.insert("fitted_c".into(), c);
    }

    let rows_at = |n: usize| report.summary.iter().filter(move |row| row.n == n);
    let tails_monotone = ns.iter().all(|&n| {
        let tails: Vec<f64> = rows_at(n).map(|row| row.empirical_tail).collect();
        tails.windows(2).all(|w| w[1] <= w[0]) && tails.iter().all(|p| (0.0..=1.0).contains(p))
    });
    let bound_covers = fitted.is_some()
        && report
            .summary
            .iter()
            .filter(|row| row.n > n0)
            .all(|row| row.empirical_tail <= row.fitted_bound.unwrap_or(0.0));
    let tail_decays_in_n = config.t_grid.iter().all(|&t| {
        let tails: Vec<f64> = ns
            .iter()
            .filter_map(|&n| rows_at(n).find(|row| row.t == t).map(|row| row.empirical_tail))
            .collect();
        tails.windows(2).all(|w| w[1] <= w[0])
    });

    report.checks.insert("tail_nonincreasing_in_t".into(), tails_monotone);
    report.checks.insert("tail_zero_beyond_b_bar".into(), zero_beyond_b);
    report.checks.insert("target_se_below_t_min_over_10".into(), se_ok);
    report.checks.insert("rms_strictly_decreasing_in_n".into(), strictly_decreasing(&rms_by_n));
    report.checks.insert("tail_nonincreasing_in_n".into(), tail_decays_in_n);
    report.checks.insert("fitted_bound_covers_larger_n".into(), bound_covers);
    if rms_by_n[0] > 0.0 {
        report.scalars.insert("rms_ratio_last_to_first".into(), rms_by_n[rms_by_n.len() - 1] / rms_by_n[0]);
    }
    Ok(report)
}
