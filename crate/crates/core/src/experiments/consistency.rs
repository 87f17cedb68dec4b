use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::report::{ExperimentKind, ExperimentReport};
use super::seeds::{replication_seed, salt};
use super::{draw_and_match, median, replicate, strictly_decreasing};
use crate::error::{Error, Result};
use crate::market::Matching;
use crate::model::{sample_colleges, CollegeDraw, MarketRealization};
use crate::stats::{default_bandwidth, kernel_conditional_prob, spearman_rho_hat, ObservationWindow};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyRecord {
    pub n: usize,
    pub replication_index: usize,
    pub seed: u64,
    pub cdf_sup_error: Option<f64>,
    pub rho_hat: Option<f64>,
    pub rho_error: Option<f64>,
    pub kernel_error: Option<f64>,
    pub empty_probes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyRow {
    pub n: usize,
    pub n_z: usize,
    pub bandwidth: f64,
    pub probed_colleges: usize,
    pub median_cdf_error: Option<f64>,
    pub median_rho_error: Option<f64>,
    pub max_rho_error: Option<f64>,
    pub median_kernel_error: Option<f64>,
    pub rho_oracle: f64,
    pub empty_probes: usize,
}

/// Pooled oracle quantities at the largest grid `n`.
struct Oracle {
    grid: Vec<f64>,
    /// `F_j(grid[k])` for probed colleges, by position in `colleges`.
    cdf: Vec<Vec<f64>>,
    colleges: Vec<u32>,
    /// `p(j | probe)` indexed `[probe][position in colleges]`; `None` for an
    /// empty bin.
    prob: Vec<Vec<Option<f64>>>,
    match_probability: Vec<f64>,
}

struct OracleCounts {
    at_college: Vec<u64>,
    below: Vec<Vec<u64>>,
    bin_total: Vec<u64>,
    bin_hits: Vec<Vec<u64>>,
}

fn oracle_counts(
    real: &MarketRealization,
    mu: &Matching,
    window: &ObservationWindow,
    grid: &[f64],
    probes: &[f64],
    bin: f64,
) -> OracleCounts {
    let m = real.m;
    let mut xs_at: Vec<Vec<f64>> = vec![Vec::new(); m];
    let mut bin_total = vec![0u64; probes.len()];
    let mut bin_hits = vec![vec![0u64; m]; probes.len()];
    for &i in window.students() {
        let x = real.x_row(i)[0];
        let y = mu.college_of(i);
        if y != 0 {
            xs_at[y as usize - 1].push(x);
        }
        for (p, &probe) in probes.iter().enumerate() {
            if (x - probe).abs() <= bin {
                bin_total[p] += 1;
                if y != 0 {
                    bin_hits[p][y as usize - 1] += 1;
                }
            }
        }
    }
    let below = xs_at
        .iter_mut()
        .map(|xs| {
            xs.sort_unstable_by(f64::total_cmp);
            grid.iter().map(|&g| xs.partition_point(|&v| v <= g) as u64).collect()
        })
        .collect();
    OracleCounts {
        at_college: xs_at.iter().map(|xs| xs.len() as u64).collect(),
        below,
        bin_total,
        bin_hits,
    }
}

fn build_oracle(
    config: &ExperimentConfig,
    colleges: &CollegeDraw,
    n_max: usize,
) -> Result<Oracle> {
    let sweep = &config.estimators;
    let m = config.model.m;
    let model = config.model_at(n_max);
    let window = config.window.build(n_max, colleges)?;
    let g = sweep.cdf_points;
    let grid: Vec<f64> = (0..g).map(|k| k as f64 / (g - 1) as f64).collect();
    let reps = sweep.oracle_multiplier * config.replications;
    let counts = replicate(reps, |r| {
        let seed = replication_seed(config.seed(), salt::ORACLE, n_max as u64, r as u64);
        let (real, mu) = draw_and_match(&model, colleges, seed)?;
        Ok(oracle_counts(&real, &mu, &window, &grid, &sweep.probe_points, sweep.oracle_bin))
    })?;

    let mut at_college = vec![0u64; m];
    let mut below = vec![vec![0u64; g]; m];
    let mut bin_total = vec![0u64; sweep.probe_points.len()];
    let mut bin_hits = vec![vec![0u64; m]; sweep.probe_points.len()];
    for c in &counts {
        for j in 0..m {
            at_college[j] += c.at_college[j];
            for k in 0..g {
                below[j][k] += c.below[j][k];
            }
        }
        for p in 0..bin_total.len() {
            bin_total[p] += c.bin_total[p];
            for j in 0..m {
                bin_hits[p][j] += c.bin_hits[p][j];
            }
        }
    }
    let pool = (reps * window.n_z()) as f64;
    let match_probability: Vec<f64> = at_college.iter().map(|&a| a as f64 / pool).collect();
    let colleges_probed: Vec<u32> =
        (1..=m as u32).filter(|&j| match_probability[j as usize - 1] > sweep.min_probability).collect();
    let cdf = colleges_probed
        .iter()
        .map(|&j| {
            let jdx = j as usize - 1;
            below[jdx].iter().map(|&b| b as f64 / at_college[jdx] as f64).collect()
        })
        .collect();
    let prob = (0..bin_total.len())
        .map(|p| {
            colleges_probed
                .iter()
                .map(|&j| (bin_total[p] > 0).then(|| bin_hits[p][j as usize - 1] as f64 / bin_total[p] as f64))
                .collect()
        })
        .collect();
    Ok(Oracle { grid, cdf, colleges: colleges_probed, prob, match_probability })
}

fn rho_oracle(config: &ExperimentConfig, colleges: &CollegeDraw, n_max: usize) -> Result<f64> {
    let sweep = &config.estimators;
    let n = sweep.rho_oracle_scale * n_max;
    let model = config.model_at(n);
    let window = config.window.build(n, colleges)?;
    let values = replicate(sweep.rho_oracle_replications, |r| {
        let seed = replication_seed(config.seed(), salt::RHO_ORACLE, n as u64, r as u64);
        let (real, mu) = draw_and_match(&model, colleges, seed)?;
        spearman_rho_hat(&mu, &real.x_chars(), &real.z_chars(), &window, sweep.rho_x_coord, sweep.rho_z_coord)
    })?;
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Errors of the conditional CDF, sorting-measure and kernel estimators
/// against replication oracles, across the `n` grid with `Z̃` frozen.
/// Requires `x_dim = 1`.
pub fn estimator_consistency_sweep(
    config: &ExperimentConfig,
) -> Result<ExperimentReport<ConsistencyRecord, ConsistencyRow>> {
    config.validate()?;
    if config.model.x_dim != 1 {
        return Err(Error::Config("the estimator sweep needs x_dim = 1".into()));
    }
    let sweep = &config.estimators;
    let mut ns = config.n_values();
    ns.sort_unstable();
    ns.dedup();
    let n_max = *ns.last().expect("nonempty grid");
    let colleges = sample_colleges(&config.model, config.seed())?;
    let oracle = build_oracle(config, &colleges, n_max)?;
    let rho_star = rho_oracle(config, &colleges, n_max)?;

    let mut report = ExperimentReport::new(ExperimentKind::Estimators, config.seed());
    report.scalars.insert("rho_oracle".into(), rho_star);
    for (j, p) in oracle.match_probability.iter().enumerate() {
        report.scalars.insert(format!("oracle_match_probability_{}", j + 1), *p);
    }

    for &n in &ns {
        let model = config.model_at(n);
        let window = config.window.build(n, &colleges)?;
        let h = default_bandwidth(window.n_z(), 1);
        let records = replicate(config.replications, |r| {
            let seed = replication_seed(config.seed(), salt::REPLICATION, n as u64, r as u64);
            let (real, mu) = draw_and_match(&model, &colleges, seed)?;
            let x = real.x_chars();
            let mut empty = 0;

            let mut cdf_err: Option<f64> = None;
            for (pos, &j) in oracle.colleges.iter().enumerate() {
                let mut xs: Vec<f64> =
                    window.students().iter().filter(|&&i| mu.college_of(i) == j).map(|&i| x.row(i)[0]).collect();
                if xs.is_empty() {
                    empty += 1;
                    continue;
                }
                xs.sort_unstable_by(f64::total_cmp);
                let len = xs.len() as f64;
                for (k, &g) in oracle.grid.iter().enumerate() {
                    let f_hat = xs.partition_point(|&v| v <= g) as f64 / len;
                    let e = (f_hat - oracle.cdf[pos][k]).abs();
                    cdf_err = Some(cdf_err.map_or(e, |c| c.max(e)));
                }
            }

            let rho_hat = spearman_rho_hat(&mu, &x, &real.z_chars(), &window, sweep.rho_x_coord, sweep.rho_z_coord).ok();

            let mut kernel_err: Option<f64> = None;
            for (p, &probe) in sweep.probe_points.iter().enumerate() {
                for (pos, &j) in oracle.colleges.iter().enumerate() {
                    let est = kernel_conditional_prob(&mu, &x, &window, j, &[probe], h, sweep.kernel)?;
                    match (est, oracle.prob[p][pos]) {
                        (Some(e), Some(o)) => {
                            let d = (e - o).abs();
                            kernel_err = Some(kernel_err.map_or(d, |c| c.max(d)));
                        }
                        _ => empty += 1,
                    }
                }
            }

            Ok(ConsistencyRecord {
                n,
                replication_index: r,
                seed,
                cdf_sup_error: cdf_err,
                rho_hat,
                rho_error: rho_hat.map(|v| (v - rho_star).abs()),
                kernel_error: kernel_err,
                empty_probes: empty,
            })
        })?;
        report.summary.push(ConsistencyRow {
            n,
            n_z: window.n_z(),
            bandwidth: h,
            probed_colleges: oracle.colleges.len(),
            median_cdf_error: median(records.iter().filter_map(|r| r.cdf_sup_error)),
            median_rho_error: median(records.iter().filter_map(|r| r.rho_error)),
            max_rho_error: records.iter().filter_map(|r| r.rho_error).reduce(f64::max),
            median_kernel_error: median(records.iter().filter_map(|r| r.kernel_error)),
            rho_oracle: rho_star,
            empty_probes: records.iter().map(|r| r.empty_probes).sum(),
        });
        report.records.extend(records);
    }

    let series = |f: fn(&ConsistencyRow) -> Option<f64>| -> Option<Vec<f64>> { report.summary.iter().map(f).collect() };
    let decreasing = |s: Option<Vec<f64>>| s.is_some_and(|v| strictly_decreasing(&v));
    let cdf = decreasing(series(|r| r.median_cdf_error));
    let rho = decreasing(series(|r| r.median_rho_error));
    let kernel = decreasing(series(|r| r.median_kernel_error));
    report.checks.insert("cdf_error_decreasing".into(), cdf);
    report.checks.insert("rho_error_decreasing".into(), rho);
    report.checks.insert("kernel_error_decreasing".into(), kernel);
    if let Some(last) = report.summary.last().and_then(|r| r.max_rho_error) {
        report.scalars.insert("max_rho_error_at_largest_n".into(), last);
    }
    Ok(report)
}
