use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{canonical_text, config_hash};
use super::output::{unix_ms, write_json, write_report, OutputFile, RunManifest};
use crate::algorithms::deferred_acceptance;
use crate::error::{Error, Result};
use crate::experiments::{
    bounded_difference_audit, concentration_profile, equilibration_audit, estimator_consistency_sweep,
    exchangeability_audit, rank_difference_scaling, ExperimentConfig, OutputFormat,
};
use crate::fixtures;
use crate::market::{classify_matching, max_rank_difference, Matching, StabilityClass};
use crate::model::{binary, derive_college_preferences, sample_market, scored_profile, TieDiagnostics};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit status: success.
pub const EXIT_OK: i32 = 0;
/// Exit status: invalid configuration or model.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status: a proved bound was violated.
pub const EXIT_VIOLATION: i32 = 3;
/// Exit status: file system or serialization failure.
pub const EXIT_IO: i32 = 4;

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::InvalidModel(_)
            | Error::InvalidQuotas(_)
            | Error::InvalidStatistic(_)
            | Error::InvalidPreferences(_)
            | Error::SizeMismatch(_) => EXIT_CONFIG,
            Error::Io(_) | Error::Json(_) | Error::Format(_) => EXIT_IO,
            Error::NotOneEnvyFree
            | Error::IterationCap { .. }
            | Error::OverQuota { .. }
            | Error::UnknownCollege { .. }
            | Error::EnumerationCap { .. } => EXIT_VIOLATION,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Simulate,
    AuditBdc,
    AuditEquilibration,
    Concentration,
    Estimators,
    Rankdiff,
    Exchangeability,
    ExampleFixtures,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::AuditBdc => "audit-bdc",
            Command::AuditEquilibration => "audit-equilibration",
            Command::Concentration => "concentration",
            Command::Estimators => "estimators",
            Command::Rankdiff => "rankdiff",
            Command::Exchangeability => "exchangeability",
            Command::ExampleFixtures => "example-fixtures",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    pub manifest_path: PathBuf,
    /// Human-readable text for standard output.
    pub message: String,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.manifest.total_violations > 0 {
            EXIT_VIOLATION
        } else {
            EXIT_OK
        }
    }
}

/// Runs `command`, writing its outputs, the canonical config and
/// `manifest.json` into `out_dir`. Existing files are never overwritten.
pub fn run(command: Command, config: &ExperimentConfig, out_dir: &Path, format: OutputFormat) -> Result<RunOutcome> {
    config.validate()?;
    let started = unix_ms();
    std::fs::create_dir_all(out_dir)?;
    let mut files = Vec::new();
    let config_path = out_dir.join("config.toml");
    write_new(&config_path, canonical_text(config)?.as_bytes())?;
    files.push(config_path);

    let (violations, message) = match command {
        Command::Simulate => simulate(config, out_dir, &mut files)?,
        Command::ExampleFixtures => {
            let cmp = example_fixtures();
            let path = out_dir.join("example_fixtures.json");
            write_json(&path, &cmp)?;
            files.push(path);
            (0, cmp.render_table())
        }
        Command::AuditBdc => emit(bounded_difference_audit(config)?, out_dir, format, &mut files)?,
        Command::AuditEquilibration => emit(equilibration_audit(config)?, out_dir, format, &mut files)?,
        Command::Concentration => emit(concentration_profile(config)?, out_dir, format, &mut files)?,
        Command::Estimators => emit(estimator_consistency_sweep(config)?, out_dir, format, &mut files)?,
        Command::Rankdiff => emit(rank_difference_scaling(config)?, out_dir, format, &mut files)?,
        Command::Exchangeability => emit(exchangeability_audit(config)?, out_dir, format, &mut files)?,
    };

    let manifest = RunManifest {
        command: command.name().into(),
        config_hash: config_hash(config)?,
        seed: config.seed(),
        artifact_version: ARTIFACT_VERSION.into(),
        started_unix_ms: started,
        finished_unix_ms: unix_ms(),
        total_violations: violations,
        files: files.iter().map(|p| OutputFile::describe(p)).collect::<Result<_>>()?,
    };
    let manifest_path = out_dir.join("manifest.json");
    write_json(&manifest_path, &manifest)?;
    Ok(RunOutcome { manifest, manifest_path, message })
}

fn write_new(path: &Path, bytes: &[u8]) -> Result<()> {
    use std::io::Write;
    let mut f = std::fs::OpenOptions::new().write(true).create_new(true).open(path)?;
    f.write_all(bytes)?;
    Ok(())
}

fn emit<R: Serialize, S: Serialize>(
    report: crate::experiments::ExperimentReport<R, S>,
    out_dir: &Path,
    format: OutputFormat,
    files: &mut Vec<PathBuf>,
) -> Result<(u64, String)> {
    files.extend(write_report(out_dir, &report, format)?);
    let mut msg = format!("{}: {} records\n", report.kind.name(), report.records.len());
    for (name, v) in &report.scalars {
        let _ = writeln!(msg, "  {name} = {v}");
    }
    for (name, ok) in &report.checks {
        let _ = writeln!(msg, "  check {name}: {}", if *ok { "pass" } else { "FAIL" });
    }
    for (name, count) in &report.violations {
        let _ = writeln!(msg, "  violations {name}: {count}");
    }
    Ok((report.total_violations(), msg))
}

#[derive(Serialize)]
struct SimulationSummary {
    n: usize,
    m: usize,
    sigma_n: f64,
    quotas: Vec<u32>,
    rank_difference: u32,
    stability: String,
    fill_counts: Vec<usize>,
    unmatched: usize,
    ties: TieDiagnostics,
}

/// Realizations up to this size are also written as JSON.
const JSON_REALIZATION_LIMIT: usize = 2_000;

fn simulate(config: &ExperimentConfig, out_dir: &Path, files: &mut Vec<PathBuf>) -> Result<(u64, String)> {
    let real = sample_market(&config.model)?;
    let profile = scored_profile(&real);
    let mu = deferred_acceptance(&profile, &real.quotas);
    let (w, ties) = derive_college_preferences(&real);
    let class = classify_matching(&mu, &profile, &real.quotas);

    let bin = out_dir.join("realization.lhmr");
    binary::write_realization(&real, std::io::BufWriter::new(std::fs::File::create_new(&bin)?))?;
    files.push(bin);
    if real.n <= JSON_REALIZATION_LIMIT {
        let json = out_dir.join("realization.json");
        write_json(&json, &real)?;
        files.push(json);
    }
    #[derive(Serialize)]
    struct Row {
        student: usize,
        college: u32,
    }
    let rows: Vec<Row> = mu.assignment().iter().enumerate().map(|(student, &college)| Row { student, college }).collect();
    let matching_path = out_dir.join("matching.csv");
    super::output::write_csv(&matching_path, &rows)?;
    files.push(matching_path);

    let summary = SimulationSummary {
        n: real.n,
        m: real.m,
        sigma_n: real.sigma,
        quotas: real.quotas.as_slice().to_vec(),
        rank_difference: max_rank_difference(&w).h,
        stability: format!("{class:?}"),
        fill_counts: mu.fill_counts(),
        unmatched: mu.assignment().iter().filter(|&&j| j == 0).count(),
        ties,
    };
    let path = out_dir.join("simulation.json");
    write_json(&path, &summary)?;
    files.push(path);
    let violations = u64::from(class != StabilityClass::Stable);
    let msg = format!(
        "simulate: n = {}, m = {}, h = {}, {} unmatched, {}\n",
        summary.n, summary.m, summary.rank_difference, summary.unmatched, summary.stability
    );
    Ok((violations, msg))
}

/// Student-proposing DA on the five-student example and its one-student
/// perturbation, under quotas `(1, 2, 2)` and `(1, 3, 2)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixtureComparison {
    pub quotas_tight: Vec<u32>,
    pub quotas_slack: Vec<u32>,
    pub tight: Vec<u32>,
    pub tight_perturbed: Vec<u32>,
    pub slack: Vec<u32>,
    pub slack_perturbed: Vec<u32>,
}

pub fn example_fixtures() -> FixtureComparison {
    let u = fixtures::example_profile();
    let u_prime = fixtures::perturbed_example_profile();
    let tight = fixtures::tight_quotas();
    let slack = fixtures::slack_quotas();
    let da = |p, q| -> Vec<u32> { Matching::into_assignment(deferred_acceptance(p, q)) };
    FixtureComparison {
        quotas_tight: tight.as_slice().to_vec(),
        quotas_slack: slack.as_slice().to_vec(),
        tight: da(&u, &tight),
        tight_perturbed: da(&u_prime, &tight),
        slack: da(&u, &slack),
        slack_perturbed: da(&u_prime, &slack),
    }
}

impl FixtureComparison {
    pub fn render_table(&self) -> String {
        let name = |j: u32| if j == 0 { "-".to_string() } else { format!("j{j}") };
        let q = |v: &[u32]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut out = format!(
            "{:<8}{:>10}{:>10}{:>10}{:>10}\n",
            "student",
            format!("q=({})", q(&self.quotas_tight)),
            "perturbed",
            format!("q=({})", q(&self.quotas_slack)),
            "perturbed"
        );
        for i in 0..self.tight.len() {
            let _ = writeln!(
                out,
                "{:<8}{:>10}{:>10}{:>10}{:>10}",
                format!("i{}", i + 1),
                name(self.tight[i]),
                name(self.tight_perturbed[i]),
                name(self.slack[i]),
                name(self.slack_perturbed[i])
            );
        }
        let changed = |a: &[u32], b: &[u32]| a.iter().zip(b).filter(|(x, y)| x != y).count();
        let _ = writeln!(
            out,
            "changed {:>16}{:>20}",
            changed(&self.tight, &self.tight_perturbed),
            changed(&self.slack, &self.slack_perturbed)
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_table() {
        let c = example_fixtures();
        assert_eq!(c.tight, vec![1, 2, 2, 3, 3]);
        assert_eq!(c.tight_perturbed, vec![2, 3, 3, 1, 2]);
        let changed: Vec<usize> = (0..5).filter(|&i| c.slack[i] != c.slack_perturbed[i]).collect();
        assert_eq!(changed, vec![0]);
        let table = c.render_table();
        assert!(table.lines().nth(1).unwrap().starts_with("i1"));
    }
}
