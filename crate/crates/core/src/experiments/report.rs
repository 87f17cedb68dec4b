use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Concentration,
    BoundedDifference,
    Equilibration,
    RankDifference,
    Estimators,
    Exchangeability,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Concentration => "concentration",
            ExperimentKind::BoundedDifference => "bounded_difference",
            ExperimentKind::Equilibration => "equilibration",
            ExperimentKind::RankDifference => "rank_difference",
            ExperimentKind::Estimators => "estimators",
            ExperimentKind::Exchangeability => "exchangeability",
        }
    }
}

/// Per-replication `records`, aggregate `summary` rows, named scalars,
/// statistical `checks`, and counters of proved-bound `violations`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport<R, S> {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub records: Vec<R>,
    pub summary: Vec<S>,
    pub scalars: BTreeMap<String, f64>,
    pub checks: BTreeMap<String, bool>,
    pub violations: BTreeMap<String, u64>,
}

impl<R, S> ExperimentReport<R, S> {
    pub fn new(kind: ExperimentKind, seed: u64) -> Self {
        ExperimentReport {
            kind,
            seed,
            records: Vec::new(),
            summary: Vec::new(),
            scalars: BTreeMap::new(),
            checks: BTreeMap::new(),
            violations: BTreeMap::new(),
        }
    }

    pub fn total_violations(&self) -> u64 {
        self.violations.values().sum()
    }

    pub fn check(&self, name: &str) -> Option<bool> {
        self.checks.get(name).copied()
    }

    pub(crate) fn register_violations(&mut self, names: &[&str]) {
        for name in names {
            self.violations.entry((*name).to_string()).or_insert(0);
        }
    }

    pub(crate) fn count_violation(&mut self, name: &str, hit: bool) {
        *self.violations.entry(name.to_string()).or_insert(0) += u64::from(hit);
    }
}
