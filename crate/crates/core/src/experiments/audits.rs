use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::replicate;
use super::report::{ExperimentKind, ExperimentReport};
use super::seeds::{replication_seed, salt};
use crate::algorithms::{
    deferred_acceptance, deferred_acceptance_college_proposing, embed_without_student, k_or_one,
    perturbation_diff, restabilize,
};
use crate::error::Result;
use crate::market::{max_rank_difference, Matching, PreferenceProfile, Quotas};
use crate::model::{preference_profile, resample_student_row, rng_for, sample_market, stream, ModelConfig};

/// Comparison of stable matchings before and after one student's row
/// changes, against the per-college and total bounds at `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbationCase {
    pub h: u32,
    pub h_prime: u32,
    pub k: u32,
    pub sosm_max_college_change: usize,
    pub sosm_total_changed: usize,
    /// Largest per-college gap between the student- and college-optimal
    /// matchings of either profile.
    pub sosm_vs_cop_max: Option<usize>,
    /// Largest per-college change over the cross pairs of extreme stable
    /// matchings.
    pub cross_max: Option<usize>,
    pub sosm_college_violation: bool,
    pub sosm_total_violation: bool,
    pub sosm_vs_cop_violation: bool,
    pub cross_violation: bool,
}

pub fn perturbation_case(
    u: &PreferenceProfile,
    u_prime: &PreferenceProfile,
    quotas: &Quotas,
    college_proposing: bool,
) -> PerturbationCase {
    let h = max_rank_difference(&u.colleges).h;
    let h_prime = max_rank_difference(&u_prime.colleges).h;
    let k = h.max(h_prime);
    let ks = k_or_one(k) as usize;
    let m = u.num_colleges();
    let mu = deferred_acceptance(u, quotas);
    let mu_prime = deferred_acceptance(u_prime, quotas);
    let d = perturbation_diff(&mu, &mu_prime, k);
    let mut case = PerturbationCase {
        h,
        h_prime,
        k,
        sosm_max_college_change: d.max_college_change(),
        sosm_total_changed: d.total_changed_students,
        sosm_vs_cop_max: None,
        cross_max: None,
        sosm_college_violation: d.max_college_change() > 16 * ks + 1,
        sosm_total_violation: d.total_changed_students > 8 * m * ks + 3,
        sosm_vs_cop_violation: false,
        cross_violation: false,
    };
    if college_proposing {
        let cop = deferred_acceptance_college_proposing(u, quotas);
        let cop_prime = deferred_acceptance_college_proposing(u_prime, quotas);
        let gap = |a: &Matching, b: &Matching| perturbation_diff(a, b, k).max_college_change();
        let own = gap(&mu, &cop).max(gap(&mu_prime, &cop_prime));
        let cross = gap(&mu, &cop_prime).max(gap(&cop, &mu_prime)).max(gap(&cop, &cop_prime));
        case.sosm_vs_cop_max = Some(own);
        case.cross_max = Some(cross);
        case.sosm_vs_cop_violation = own > 8 * ks;
        case.cross_violation = cross > 32 * ks + 1;
    }
    case
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BdcRecord {
    pub replication_index: usize,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub sigma_n: f64,
    pub student: usize,
    pub h: u32,
    pub h_prime: u32,
    pub k: u32,
    pub sosm_max_college_change: usize,
    pub sosm_total_changed: usize,
    pub sosm_vs_cop_max: Option<usize>,
    pub cross_max: Option<usize>,
    pub bound_sosm_college: usize,
    pub bound_sosm_total: usize,
    pub bound_sosm_vs_cop: usize,
    pub bound_cross: usize,
    pub violations: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BdcSummary {
    pub n: usize,
    pub m: usize,
    pub sigma_n: f64,
    pub trials: usize,
    pub max_k: u32,
    pub max_sosm_college_change: usize,
    pub max_sosm_total_changed: usize,
    pub max_sosm_vs_cop: Option<usize>,
    pub max_cross: Option<usize>,
    pub violations: u64,
}

const BDC_COUNTERS: [&str; 4] = ["sosm_per_college", "sosm_total", "sosm_vs_college_optimal", "cross_stable"];

/// `R` trials spread round-robin over the grid cells. Each trial draws a
/// market, replaces one uniformly chosen student's row and compares the
/// stable matchings of both profiles at `k = max(h, h′)`.
pub fn bounded_difference_audit(config: &ExperimentConfig) -> Result<ExperimentReport<BdcRecord, BdcSummary>> {
    config.validate()?;
    let cells = config.cells();
    let records = replicate(config.replications, |t| {
        let cell = &cells[t % cells.len()];
        let seed = replication_seed(config.seed(), salt::TRIAL, (t % cells.len()) as u64, t as u64);
        let model = ModelConfig { seed, ..cell.clone() };
        let real = sample_market(&model)?;
        let mut rng = rng_for(seed, stream::PERTURB);
        let student = rng.random_range(0..model.n);
        let real_prime = resample_student_row(&real, &model, student, &mut rng);
        let (u, _) = preference_profile(&real);
        let (u_prime, _) = preference_profile(&real_prime);
        let case = perturbation_case(&u, &u_prime, &real.quotas, config.audits.college_proposing);
        let ks = k_or_one(case.k) as usize;
        let violations = [
            case.sosm_college_violation,
            case.sosm_total_violation,
            case.sosm_vs_cop_violation,
            case.cross_violation,
        ]
        .iter()
        .map(|&v| u32::from(v))
        .sum();
        Ok(BdcRecord {
            replication_index: t,
            seed,
            n: model.n,
            m: model.m,
            sigma_n: real.sigma,
            student,
            h: case.h,
            h_prime: case.h_prime,
            k: case.k,
            sosm_max_college_change: case.sosm_max_college_change,
            sosm_total_changed: case.sosm_total_changed,
            sosm_vs_cop_max: case.sosm_vs_cop_max,
            cross_max: case.cross_max,
            bound_sosm_college: 16 * ks + 1,
            bound_sosm_total: 8 * model.m * ks + 3,
            bound_sosm_vs_cop: 8 * ks,
            bound_cross: 32 * ks + 1,
            violations,
        })
    })?;

    let mut report = ExperimentReport::new(ExperimentKind::BoundedDifference, config.seed());
    report.register_violations(&BDC_COUNTERS);
    for r in &records {
        report.count_violation("sosm_per_college", r.sosm_max_college_change > r.bound_sosm_college);
        report.count_violation("sosm_total", r.sosm_total_changed > r.bound_sosm_total);
        report.count_violation("sosm_vs_college_optimal", r.sosm_vs_cop_max.is_some_and(|v| v > r.bound_sosm_vs_cop));
        report.count_violation("cross_stable", r.cross_max.is_some_and(|v| v > r.bound_cross));
    }
    for (c, cell) in cells.iter().enumerate() {
        let rows: Vec<&BdcRecord> = records.iter().skip(c).step_by(cells.len()).collect();
        report.summary.push(BdcSummary {
            n: cell.n,
            m: cell.m,
            sigma_n: cell.sigma_n(),
            trials: rows.len(),
            max_k: rows.iter().map(|r| r.k).max().unwrap_or(0),
            max_sosm_college_change: rows.iter().map(|r| r.sosm_max_college_change).max().unwrap_or(0),
            max_sosm_total_changed: rows.iter().map(|r| r.sosm_total_changed).max().unwrap_or(0),
            max_sosm_vs_cop: rows.iter().filter_map(|r| r.sosm_vs_cop_max).max(),
            max_cross: rows.iter().filter_map(|r| r.cross_max).max(),
            violations: rows.iter().map(|r| u64::from(r.violations)).sum(),
        });
    }
    report.records = records;
    Ok(report)
}

/// Outcome of removing student `i`, matching the reduced market, embedding
/// the result with `i` unmatched and re-stabilizing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovalCase {
    pub k: u32,
    pub restabilized_equals_sosm: bool,
    pub restab_steps: usize,
    /// `max_j |μ*⁻¹(j) ∖ g_i(μ_i*)⁻¹(j)|` over `j ≥ 1`.
    pub max_n_j1: usize,
    /// `max_j |g_i(μ_i*)⁻¹(j) ∖ μ*⁻¹(j)|` over `j ≥ 1`.
    pub max_n_j0: usize,
    /// Students other than `i` whose assignment differs.
    pub changed_others: usize,
    /// Number of colleges whose fill count differs, and whether the only
    /// difference (if any) is one extra student under `μ*`.
    pub fill_differences: usize,
    pub fill_dichotomy_holds: bool,
}

pub fn removal_case(u: &PreferenceProfile, quotas: &Quotas, i: usize) -> Result<RemovalCase> {
    let k = max_rank_difference(&u.colleges).h;
    let m = u.num_colleges();
    let mu = deferred_acceptance(u, quotas);
    let reduced = deferred_acceptance(&u.remove_student(i), quotas);
    let embedded = embed_without_student(&reduced, i);
    let (restab, trace) = restabilize(&embedded, u, quotas)?;

    let mut n_j1 = vec![0usize; m + 1];
    let mut n_j0 = vec![0usize; m + 1];
    let mut changed_others = 0;
    for s in 0..u.num_students() {
        let (a, b) = (mu.college_of(s), embedded.college_of(s));
        if a != b {
            n_j1[a as usize] += 1;
            n_j0[b as usize] += 1;
            changed_others += usize::from(s != i);
        }
    }
    let fill_mu = mu.fill_counts();
    let fill_g = embedded.fill_counts();
    let diffs: Vec<(usize, usize)> = fill_mu.iter().copied().zip(fill_g.iter().copied()).filter(|(a, b)| a != b).collect();
    let dichotomy = diffs.is_empty() || (diffs.len() == 1 && diffs[0].0 == diffs[0].1 + 1);
    Ok(RemovalCase {
        k,
        restabilized_equals_sosm: restab == mu,
        restab_steps: trace.iterations,
        max_n_j1: n_j1[1..].iter().copied().max().unwrap_or(0),
        max_n_j0: n_j0[1..].iter().copied().max().unwrap_or(0),
        changed_others,
        fill_differences: diffs.len(),
        fill_dichotomy_holds: dichotomy,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibrationRecord {
    pub replication_index: usize,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub sigma_n: f64,
    pub student: usize,
    pub k: u32,
    pub restabilized_equals_sosm: bool,
    pub restab_steps: usize,
    pub max_n_j1: usize,
    pub max_n_j0: usize,
    pub changed_others: usize,
    pub fill_differences: usize,
    pub fill_dichotomy_holds: bool,
    pub bound_n_j: usize,
    pub bound_changed: usize,
    pub violations: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibrationSummary {
    pub n: usize,
    pub m: usize,
    pub sigma_n: f64,
    pub trials: usize,
    pub max_k: u32,
    pub max_n_j1: usize,
    pub max_n_j0: usize,
    pub max_changed_others: usize,
    pub one_more_fill_trials: usize,
    pub violations: u64,
}

const EQ_COUNTERS: [&str; 5] = ["equilibration_mismatch", "n_j1", "n_j0", "changed_students", "fill_dichotomy"];

/// `R` trials spread round-robin over the grid cells, each removing one
/// uniformly chosen student. A matching that fails to be 1-envy-free or a
/// re-stabilization that hits its iteration cap aborts the audit.
pub fn equilibration_audit(
    config: &ExperimentConfig,
) -> Result<ExperimentReport<EquilibrationRecord, EquilibrationSummary>> {
    config.validate()?;
    let cells = config.cells();
    let records = replicate(config.replications, |t| {
        let cell = &cells[t % cells.len()];
        let seed = replication_seed(config.seed(), salt::TRIAL, (t % cells.len()) as u64, t as u64);
        let model = ModelConfig { seed, ..cell.clone() };
        let real = sample_market(&model)?;
        let student = rng_for(seed, stream::PERTURB).random_range(0..model.n);
        let (u, _) = preference_profile(&real);
        let case = removal_case(&u, &real.quotas, student)?;
        let ks = k_or_one(case.k) as usize;
        let bound_n_j = 4 * ks;
        let bound_changed = 4 * model.m * ks + 1;
        let fill_violation = config.audits.fill_counts && !case.fill_dichotomy_holds;
        let violations = [
            !case.restabilized_equals_sosm,
            case.max_n_j1 > bound_n_j,
            case.max_n_j0 > bound_n_j,
            case.changed_others > bound_changed,
            fill_violation,
        ]
        .iter()
        .map(|&v| u32::from(v))
        .sum();
        Ok(EquilibrationRecord {
            replication_index: t,
            seed,
            n: model.n,
            m: model.m,
            sigma_n: real.sigma,
            student,
            k: case.k,
            restabilized_equals_sosm: case.restabilized_equals_sosm,
            restab_steps: case.restab_steps,
            max_n_j1: case.max_n_j1,
            max_n_j0: case.max_n_j0,
            changed_others: case.changed_others,
            fill_differences: case.fill_differences,
            fill_dichotomy_holds: case.fill_dichotomy_holds,
            bound_n_j,
            bound_changed,
            violations,
        })
    })?;

    let mut report = ExperimentReport::new(ExperimentKind::Equilibration, config.seed());
    report.register_violations(&EQ_COUNTERS);
    for r in &records {
        report.count_violation("equilibration_mismatch", !r.restabilized_equals_sosm);
        report.count_violation("n_j1", r.max_n_j1 > r.bound_n_j);
        report.count_violation("n_j0", r.max_n_j0 > r.bound_n_j);
        report.count_violation("changed_students", r.changed_others > r.bound_changed);
        report.count_violation("fill_dichotomy", config.audits.fill_counts && !r.fill_dichotomy_holds);
    }
    for (c, cell) in cells.iter().enumerate() {
        let rows: Vec<&EquilibrationRecord> = records.iter().skip(c).step_by(cells.len()).collect();
        report.summary.push(EquilibrationSummary {
            n: cell.n,
            m: cell.m,
            sigma_n: cell.sigma_n(),
            trials: rows.len(),
            max_k: rows.iter().map(|r| r.k).max().unwrap_or(0),
            max_n_j1: rows.iter().map(|r| r.max_n_j1).max().unwrap_or(0),
            max_n_j0: rows.iter().map(|r| r.max_n_j0).max().unwrap_or(0),
            max_changed_others: rows.iter().map(|r| r.changed_others).max().unwrap_or(0),
            one_more_fill_trials: rows.iter().filter(|r| r.fill_differences == 1).count(),
            violations: rows.iter().map(|r| u64::from(r.violations)).sum(),
        });
    }
    report.records = records;
    Ok(report)
}
