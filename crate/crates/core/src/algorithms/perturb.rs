use serde::{Deserialize, Serialize};

use crate::market::Matching;

/// How far two matchings of the same market size are apart.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbationDiff {
    /// Entry `j` (for `j = 0..=m`, `0` = unmatched) counts students whose
    /// membership at `j` differs: `|{i : 1{μ(i)=j} ≠ 1{μ'(i)=j}}|`.
    pub per_college_indicator_change: Vec<usize>,
    pub total_changed_students: usize,
    /// Rank difference the comparison is audited against.
    pub k: u32,
}

impl PerturbationDiff {
    pub fn max_college_change(&self) -> usize {
        self.per_college_indicator_change.iter().copied().max().unwrap_or(0)
    }
}

pub fn perturbation_diff(mu: &Matching, mu_prime: &Matching, k: u32) -> PerturbationDiff {
    assert_eq!(mu.num_students(), mu_prime.num_students(), "student counts differ");
    assert_eq!(mu.num_colleges(), mu_prime.num_colleges(), "college counts differ");
    let mut per = vec![0usize; mu.num_colleges() + 1];
    let mut total = 0;
    for (&a, &b) in mu.assignment().iter().zip(mu_prime.assignment()) {
        if a != b {
            total += 1;
            per[a as usize] += 1;
            per[b as usize] += 1;
        }
    }
    PerturbationDiff {
        per_college_indicator_change: per,
        total_changed_students: total,
        k,
    }
}

/// `k ∨ 1`.
#[inline]
pub fn k_or_one(k: u32) -> u64 {
    k.max(1) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn identical_matchings_have_zero_diff() {
        let mu = fixtures::example_sosm();
        let d = perturbation_diff(&mu, &mu, 0);
        assert_eq!(d.total_changed_students, 0);
        assert!(d.per_college_indicator_change.iter().all(|&c| c == 0));
    }

    #[test]
    fn example_three_cascade() {
        let d = perturbation_diff(&fixtures::example_sosm(), &fixtures::perturbed_example_sosm(), 4);
        assert_eq!(d.total_changed_students, 5);
        // j2: {i2, i3} before, {i1, i5} after -> i1, i2, i3, i5 change
        assert_eq!(d.per_college_indicator_change[2], 4);
        assert_eq!(d.per_college_indicator_change[0], 0);
        assert!(d.max_college_change() as u64 <= 16 * k_or_one(d.k) + 1);
    }
}
