//! Turning realizations into preference profiles, and the truthful report map.

use serde::{Deserialize, Serialize};

use super::jsonfloat;
use super::realization::MarketRealization;
use crate::error::{Error, Result};
use crate::market::{CollegePrefs, CollegeSide, PreferenceProfile, Profile, StudentPrefs, OUTSIDE};

/// Counts of exact float ties resolved by the index tie-break.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TieDiagnostics {
    /// Adjacent equal priorities within a college ordering.
    pub college_ties: usize,
    /// Students whose priority equals the college threshold (kept acceptable).
    pub threshold_ties: usize,
    /// Adjacent equal utilities within a student ordering.
    pub student_ties: usize,
}

impl TieDiagnostics {
    pub fn total(&self) -> usize {
        self.college_ties + self.threshold_ties + self.student_ties
    }
}

/// Maps `x` to a `u64` whose unsigned order is the descending order of `x`.
#[inline]
fn desc_bits(x: f64) -> u64 {
    let b = x.to_bits();
    let asc = if b >> 63 == 1 { !b } else { b ^ (1 << 63) };
    !asc
}

/// College side backed directly by priority scores and thresholds.
///
/// Student `i` precedes `i'` at `j` iff `ω_ij > ω_i'j`, ties going to the
/// lower index; `i` is acceptable iff `ω_ij ≥ c_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoredColleges {
    n: usize,
    m: usize,
    omega: Vec<f64>,
    c: Vec<f64>,
}

impl ScoredColleges {
    /// `omega` is `n × m` row-major.
    pub fn new(omega: Vec<f64>, c: Vec<f64>, n: usize) -> Result<Self> {
        let m = c.len();
        if omega.len() != n * m {
            return Err(Error::SizeMismatch(format!("{} priorities for {n} x {m}", omega.len())));
        }
        if omega.iter().chain(&c).any(|x| x.is_nan()) {
            return Err(Error::InvalidPreferences("NaN priority or threshold".into()));
        }
        Ok(ScoredColleges { n, m, omega, c })
    }

    pub fn from_realization(real: &MarketRealization) -> Self {
        ScoredColleges {
            n: real.n,
            m: real.m,
            omega: real.omega.clone(),
            c: real.c.clone(),
        }
    }

    /// Explicit rank arrays with the same ordering.
    pub fn to_college_prefs(&self) -> (CollegePrefs, TieDiagnostics) {
        let mut diag = TieDiagnostics::default();
        let mut order = Vec::with_capacity(self.m * (self.n + 1));
        let mut codes: Vec<u32> = Vec::with_capacity(self.n + 1);
        for j in 1..=self.m as u32 {
            codes.clear();
            codes.extend(0..=self.n as u32);
            codes.sort_unstable_by_key(|&code| self.code_key(j, code));
            for w in codes.windows(2) {
                let (a, b) = (self.code_key(j, w[0]).0, self.code_key(j, w[1]).0);
                if a == b {
                    if w[0] == OUTSIDE || w[1] == OUTSIDE {
                        diag.threshold_ties += 1;
                    } else {
                        diag.college_ties += 1;
                    }
                }
            }
            order.extend_from_slice(&codes);
        }
        (CollegePrefs::from_raw_orders(order, self.n, self.m), diag)
    }

    fn code_key(&self, j: u32, code: u32) -> (u64, u32) {
        if code == OUTSIDE {
            self.outside_key(j)
        } else {
            self.key(j, code as usize - 1)
        }
    }
}

impl CollegeSide for ScoredColleges {
    type Key = (u64, u32);

    fn num_students(&self) -> usize {
        self.n
    }

    fn num_colleges(&self) -> usize {
        self.m
    }

    #[inline]
    fn key(&self, j: u32, i: usize) -> (u64, u32) {
        (desc_bits(self.omega[i * self.m + j as usize - 1]), i as u32)
    }

    #[inline]
    fn outside_key(&self, j: u32) -> (u64, u32) {
        (desc_bits(self.c[j as usize - 1]), u32::MAX)
    }
}

/// Profile whose college side compares scores on the fly.
pub type ScoredProfile = Profile<ScoredColleges>;

pub fn derive_college_preferences(real: &MarketRealization) -> (CollegePrefs, TieDiagnostics) {
    ScoredColleges::from_realization(real).to_college_prefs()
}

pub fn derive_student_preferences(real: &MarketRealization) -> (StudentPrefs, TieDiagnostics) {
    let (prefs, ties) = StudentPrefs::from_utilities(&real.utilities(), real.n, real.m);
    (prefs, TieDiagnostics { student_ties: ties, ..Default::default() })
}

/// Both sides as explicit rank arrays.
pub fn preference_profile(real: &MarketRealization) -> (PreferenceProfile, TieDiagnostics) {
    let (students, ds) = derive_student_preferences(real);
    let (colleges, dc) = derive_college_preferences(real);
    let diag = TieDiagnostics { student_ties: ds.student_ties, ..dc };
    (Profile::new(students, colleges).expect("sizes agree"), diag)
}

/// Students as rank arrays, colleges as scores; what the Monte Carlo loops use.
pub fn scored_profile(real: &MarketRealization) -> ScoredProfile {
    let (students, _) = derive_student_preferences(real);
    Profile::new(students, ScoredColleges::from_realization(real)).expect("sizes agree")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollegeReport {
    /// `ω_j = (ω_1j, …, ω_nj)`.
    pub priorities: Vec<f64>,
    #[serde(with = "jsonfloat::scalar")]
    pub threshold: f64,
}

/// Reports submitted to the clearinghouse: a rank-order list over `{0,1..m}`
/// per student and `(ω_j, c_j)` per college.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportProfile {
    pub student_reports: Vec<Vec<u32>>,
    pub college_reports: Vec<CollegeReport>,
}

impl ReportProfile {
    pub fn num_students(&self) -> usize {
        self.student_reports.len()
    }

    pub fn num_colleges(&self) -> usize {
        self.college_reports.len()
    }

    /// The preference profile the reports describe.
    pub fn decode(&self) -> Result<PreferenceProfile> {
        let n = self.num_students();
        let m = self.num_colleges();
        let mut omega = vec![0.0; n * m];
        for (jdx, r) in self.college_reports.iter().enumerate() {
            if r.priorities.len() != n {
                return Err(Error::SizeMismatch(format!(
                    "college {} reports {} priorities for {n} students",
                    jdx + 1,
                    r.priorities.len()
                )));
            }
            for (i, &w) in r.priorities.iter().enumerate() {
                omega[i * m + jdx] = w;
            }
        }
        let thresholds = self.college_reports.iter().map(|r| r.threshold).collect();
        let (colleges, _) = ScoredColleges::new(omega, thresholds, n)?.to_college_prefs();
        let students = StudentPrefs::from_orders(&self.student_reports, m)?;
        Profile::new(students, colleges)
    }
}

/// Students report their true orderings; colleges report `(ω_·j, c_j)`.
pub fn truthful_report(real: &MarketRealization) -> ReportProfile {
    let (students, _) = derive_student_preferences(real);
    ReportProfile {
        student_reports: (0..real.n).map(|i| students.order(i).to_vec()).collect(),
        college_reports: (1..=real.m as u32)
            .map(|j| CollegeReport {
                priorities: (0..real.n).map(|i| real.omega_at(i, j)).collect(),
                threshold: real.c[j as usize - 1],
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{sample_market, ModelConfig};

    #[test]
    fn desc_bits_orders_descending() {
        let xs = [f64::INFINITY, 3.0, 0.5, 0.0, -0.0, -1.0, -7.5, f64::NEG_INFINITY];
        for w in xs.windows(2) {
            assert!(desc_bits(w[0]) <= desc_bits(w[1]), "{:?}", w);
        }
        assert!(desc_bits(3.0) < desc_bits(0.5));
    }

    fn one_college(omega: Vec<f64>, c: f64) -> Vec<u32> {
        let n = omega.len();
        let (w, _) = ScoredColleges::new(omega, vec![c], n).unwrap().to_college_prefs();
        w.order(1).to_vec()
    }

    #[test]
    fn sorts_descending_with_outside_last() {
        assert_eq!(one_college(vec![3.0, 1.0, 2.0], f64::NEG_INFINITY), vec![1, 3, 2, 0]);
    }

    #[test]
    fn threshold_inserts_outside_option() {
        assert_eq!(one_college(vec![3.0, 1.0, 2.0], 2.5), vec![1, 0, 3, 2]);
    }

    #[test]
    fn ties_go_to_lower_index_and_are_counted() {
        let (w, d) = ScoredColleges::new(vec![1.0, 1.0, 2.0], vec![2.0], 3).unwrap().to_college_prefs();
        assert_eq!(w.order(1), &[3, 0, 1, 2]);
        assert_eq!(d.college_ties, 1);
        assert_eq!(d.threshold_ties, 1);
    }

    #[test]
    fn student_utilities_sorted_descending() {
        let (s, ties) = StudentPrefs::from_utilities(&[0.5, 2.0, 1.0], 1, 2);
        assert_eq!(s.order(0), &[1, 2, 0]);
        assert_eq!(ties, 0);
    }

    #[test]
    fn homogeneous_when_sigma_zero() {
        let real = sample_market(&ModelConfig::new(40, 4).with_sigma(0.0).with_seed(3)).unwrap();
        let (w, _) = derive_college_preferences(&real);
        for j in 2..=4 {
            assert_eq!(w.order(1), w.order(j));
        }
        let rep = truthful_report(&real);
        let first = &rep.college_reports[0].priorities;
        assert!(rep.college_reports.iter().all(|r| &r.priorities == first));
    }

    #[test]
    fn truthful_report_round_trips() {
        let mut cfg = ModelConfig::new(60, 3).with_sigma(0.2).with_seed(8);
        cfg.thresholds = crate::model::ThresholdSpec::Quantile { p: 0.3 };
        cfg.outside_utility = -0.5;
        let real = sample_market(&cfg).unwrap();
        let (u, _) = preference_profile(&real);
        assert_eq!(truthful_report(&real).decode().unwrap(), u);
    }

    #[test]
    fn scored_and_explicit_sides_agree() {
        let real = sample_market(&ModelConfig::new(30, 3).with_sigma(0.5).with_seed(11)).unwrap();
        let scored = ScoredColleges::from_realization(&real);
        let (explicit, _) = scored.to_college_prefs();
        for j in 1..=3u32 {
            for a in 0..30 {
                for b in 0..30 {
                    assert_eq!(scored.key(j, a) < scored.key(j, b), explicit.key(j, a) < explicit.key(j, b));
                }
                assert_eq!(scored.key(j, a) < scored.outside_key(j), explicit.key(j, a) < explicit.outside_key(j));
            }
        }
    }
}
