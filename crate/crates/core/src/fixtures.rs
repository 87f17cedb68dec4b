//! The five-student, three-college market used throughout the tests and by
//! the `example-fixtures` command.

use crate::market::{Matching, PreferenceProfile, Quotas};
use crate::model::{CollegeReport, ReportProfile};

/// Student `i_k` is index `k - 1`; college `j_k` is `k`.
pub fn example_profile() -> PreferenceProfile {
    PreferenceProfile::from_lists(&example_student_lists(), &example_college_lists())
        .expect("fixture is well formed")
}

/// Same as [`example_profile`] except that `i1` reports `(j2, j3, j1)`.
pub fn perturbed_example_profile() -> PreferenceProfile {
    let mut students = example_student_lists();
    students[0] = vec![2, 3, 1];
    PreferenceProfile::from_lists(&students, &example_college_lists()).expect("fixture is well formed")
}

fn example_student_lists() -> Vec<Vec<u32>> {
    vec![
        vec![1, 2, 3],
        vec![2, 3, 1],
        vec![2, 3, 1],
        vec![3, 1, 2],
        vec![3, 2, 1],
    ]
}

fn example_college_lists() -> Vec<Vec<usize>> {
    vec![
        vec![0, 3, 1, 2, 4],
        vec![0, 4, 1, 2, 3],
        vec![1, 2, 3, 4, 0],
    ]
}

/// `q = (1, 2, 2)`.
pub fn tight_quotas() -> Quotas {
    Quotas::new(vec![1, 2, 2]).expect("positive quotas")
}

/// `q = (1, 3, 2)`: one extra seat at `j2`.
pub fn slack_quotas() -> Quotas {
    Quotas::new(vec![1, 3, 2]).expect("positive quotas")
}

/// `(j1, j2, j2, j3, j3)`.
pub fn example_sosm() -> Matching {
    Matching::new(vec![1, 2, 2, 3, 3], 3).expect("valid")
}

/// `(j2, j3, j3, j1, j2)`.
pub fn perturbed_example_sosm() -> Matching {
    Matching::new(vec![2, 3, 3, 1, 2], 3).expect("valid")
}

/// The example written as clearinghouse reports: each college gives its `k`-th
/// ranked student priority `5 - k`; thresholds are `-∞`.
pub fn example_reports() -> ReportProfile {
    let lists = example_college_lists();
    let college_reports = lists
        .iter()
        .map(|list| {
            let mut priorities = vec![0.0; 5];
            for (pos, &i) in list.iter().enumerate() {
                priorities[i] = (5 - pos) as f64;
            }
            CollegeReport { priorities, threshold: f64::NEG_INFINITY }
        })
        .collect();
    let student_reports = example_student_lists()
        .into_iter()
        .map(|mut l| {
            l.push(0);
            l
        })
        .collect();
    ReportProfile { student_reports, college_reports }
}
