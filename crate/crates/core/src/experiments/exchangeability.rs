use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::report::{ExperimentKind, ExperimentReport};
use super::seeds::{replication_seed, salt};
use super::{draw_and_match, replicate};
use crate::error::Result;
use crate::model::sample_colleges;
use crate::stats::ObservationWindow;

/// Two-sample Kolmogorov–Smirnov statistic `sup_x |F_a(x) − F_b(x)|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable_by(f64::total_cmp);
    b.sort_unstable_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic critical value `sqrt(−ln(α/2)/2) · sqrt((n_a + n_b)/(n_a n_b))`.
pub fn ks_critical_value(alpha: f64, na: usize, nb: usize) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    c * ((na + nb) as f64 / (na * nb) as f64).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExchangeRecord {
    pub replication_index: usize,
    pub seed: u64,
    pub ks_statistic: f64,
    pub critical_value: f64,
    pub reject: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExchangeSummary {
    pub runs: usize,
    pub replications_per_half: usize,
    pub rejections: usize,
    pub pass_fraction: f64,
}

/// Compares the statistic on the first `⌈n/2⌉` students with the statistic
/// on the last `⌈n/2⌉`, each half taken from its own `R` independent draws
/// with `Z̃` frozen. Repeated over `runs` independent audits.
pub fn exchangeability_audit(
    config: &ExperimentConfig,
) -> Result<ExperimentReport<ExchangeRecord, ExchangeSummary>> {
    config.validate()?;
    let model = &config.model;
    let n = model.n;
    let half = n.div_ceil(2);
    let all: Vec<u32> = (0..=model.m as u32).collect();
    let first = ObservationWindow::new((0..half).collect(), all.clone())?;
    let last = ObservationWindow::new((n - half..n).collect(), all)?;
    let colleges = sample_colleges(model, config.seed())?;
    let spec = &config.exchangeability;
    let r = config.replications;

    let mut report = ExperimentReport::new(ExperimentKind::Exchangeability, config.seed());
    for run in 0..spec.runs {
        let sample = |part: u64, window: &ObservationWindow| {
            replicate(r, |idx| {
                let seed = replication_seed(config.seed(), salt::EXCHANGE, 2 * run as u64 + part, idx as u64);
                let (real, mu) = draw_and_match(model, &colleges, seed)?;
                Ok(config.statistic.evaluate(&mu, &real, window)?.value)
            })
        };
        let a = sample(0, &first)?;
        let b = sample(1, &last)?;
        let d = ks_statistic(&a, &b);
        let crit = ks_critical_value(spec.alpha, r, r);
        report.records.push(ExchangeRecord {
            replication_index: run,
            seed: replication_seed(config.seed(), salt::EXCHANGE, 2 * run as u64, 0),
            ks_statistic: d,
            critical_value: crit,
            reject: d > crit,
        });
    }
    let rejections = report.records.iter().filter(|rec| rec.reject).count();
    let pass_fraction = 1.0 - rejections as f64 / spec.runs as f64;
    report.summary.push(ExchangeSummary { runs: spec.runs, replications_per_half: r, rejections, pass_fraction });
    report.checks.insert("pass_fraction_at_least_0_95".into(), pass_fraction >= 0.95);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_by_hand() {
        assert_eq!(ks_statistic(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]), 0.0);
        assert_eq!(ks_statistic(&[1.0, 2.0], &[3.0, 4.0]), 1.0);
        // F_a jumps to 1/2 at 0; F_b stays 0 until 1
        assert_eq!(ks_statistic(&[0.0, 1.0], &[1.0, 1.0]), 0.5);
        let c = ks_critical_value(0.01, 2000, 2000);
        assert!((c - 1.6276 * (2.0f64 / 2000.0).sqrt()).abs() < 1e-4);
    }
}
