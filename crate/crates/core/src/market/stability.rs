use serde::{Deserialize, Serialize};

use super::matching::{Matching, Quotas, UNMATCHED};
use super::preferences::{CollegeSide, Profile};
use crate::error::{Error, Result};

/// A student–college pair that would both rather be matched to each other.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BlockingPair {
    pub student: usize,
    pub college: u32,
}

/// Strongest stability class a matching belongs to.
///
/// Variants are ordered from weakest to strongest so that `a >= b` reads as
/// "`a` implies `b`".
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityClass {
    /// Not individually rational.
    Unstable,
    IndividuallyRational,
    /// Every blocking pair involves an unmatched student.
    EnvyFree,
    /// Envy-free, with a single student common to every blocking pair.
    OneEnvyFree,
    Stable,
}

/// Per-college summary used by the blocking-pair scans.
pub(crate) struct RosterState<K> {
    pub fill: Vec<usize>,
    /// Worst (largest) key in each roster, `None` when empty.
    pub worst: Vec<Option<K>>,
}

pub(crate) fn roster_state<C: CollegeSide>(matching: &Matching, profile: &Profile<C>) -> RosterState<C::Key> {
    let m = profile.num_colleges();
    let mut fill = vec![0usize; m];
    let mut worst: Vec<Option<C::Key>> = vec![None; m];
    for (i, &j) in matching.assignment().iter().enumerate() {
        if j == UNMATCHED {
            continue;
        }
        let jdx = j as usize - 1;
        fill[jdx] += 1;
        let k = profile.colleges.key(j, i);
        worst[jdx] = Some(match worst[jdx] {
            Some(w) if w >= k => w,
            _ => k,
        });
    }
    RosterState { fill, worst }
}

/// Whether `(i, j)` blocks given precomputed roster state. Assumes `j ≻_i μ(i)`.
#[inline]
pub(crate) fn college_would_block<C: CollegeSide>(
    profile: &Profile<C>,
    quotas: &Quotas,
    state: &RosterState<C::Key>,
    i: usize,
    j: u32,
) -> bool {
    let jdx = j as usize - 1;
    if state.fill[jdx] < quotas.of(j) as usize {
        profile.college_accepts(j, i)
    } else {
        match state.worst[jdx] {
            Some(w) => profile.colleges.key(j, i) < w,
            None => false,
        }
    }
}

fn check_sizes<C: CollegeSide>(matching: &Matching, profile: &Profile<C>, quotas: &Quotas) {
    assert_eq!(matching.num_students(), profile.num_students(), "matching/profile student count");
    assert_eq!(quotas.num_colleges(), profile.num_colleges(), "quota/profile college count");
    assert_eq!(matching.num_colleges(), profile.num_colleges(), "matching/profile college count");
}

/// All blocking pairs of `matching`, sorted by `(student, college)`.
pub fn blocking_pairs<C: CollegeSide>(
    matching: &Matching,
    profile: &Profile<C>,
    quotas: &Quotas,
) -> Vec<BlockingPair> {
    check_sizes(matching, profile, quotas);
    let state = roster_state(matching, profile);
    let mut out = Vec::new();
    for i in 0..profile.num_students() {
        let current = matching.college_of(i);
        let mut row: Vec<u32> = Vec::new();
        for &alt in profile.students.order(i) {
            if alt == current {
                break;
            }
            if alt != UNMATCHED && college_would_block(profile, quotas, &state, i, alt) {
                row.push(alt);
            }
        }
        row.sort_unstable();
        out.extend(row.into_iter().map(|college| BlockingPair { student: i, college }));
    }
    out
}

/// No student holds a college below the outside option and no college holds
/// an unacceptable student.
pub fn is_individually_rational<C: CollegeSide>(matching: &Matching, profile: &Profile<C>) -> bool {
    matching.assignment().iter().enumerate().all(|(i, &j)| {
        j == UNMATCHED || (profile.student_accepts(i, j) && profile.college_accepts(j, i))
    })
}

pub fn is_stable<C: CollegeSide>(matching: &Matching, profile: &Profile<C>, quotas: &Quotas) -> bool {
    is_individually_rational(matching, profile) && blocking_pairs(matching, profile, quotas).is_empty()
}

pub fn classify_matching<C: CollegeSide>(
    matching: &Matching,
    profile: &Profile<C>,
    quotas: &Quotas,
) -> StabilityClass {
    if !is_individually_rational(matching, profile) {
        return StabilityClass::Unstable;
    }
    let pairs = blocking_pairs(matching, profile, quotas);
    if pairs.is_empty() {
        return StabilityClass::Stable;
    }
    if pairs.iter().any(|p| matching.college_of(p.student) != UNMATCHED) {
        return StabilityClass::IndividuallyRational;
    }
    let first = pairs[0].student;
    if pairs.iter().all(|p| p.student == first) {
        StabilityClass::OneEnvyFree
    } else {
        StabilityClass::EnvyFree
    }
}

/// Size limits for [`enumerate_stable_matchings`].
#[derive(Clone, Copy, Debug)]
pub struct EnumerationLimits {
    pub max_students: usize,
    pub max_colleges: usize,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits {
            max_students: 8,
            max_colleges: 4,
        }
    }
}

/// Exhaustively lists every stable matching, in lexicographic order of the
/// assignment vector. Intended as a test oracle for small markets.
pub fn enumerate_stable_matchings<C: CollegeSide>(
    profile: &Profile<C>,
    quotas: &Quotas,
    limits: EnumerationLimits,
) -> Result<Vec<Matching>> {
    let n = profile.num_students();
    let m = profile.num_colleges();
    if n > limits.max_students || m > limits.max_colleges {
        return Err(Error::EnumerationCap {
            n,
            m,
            max_n: limits.max_students,
            max_m: limits.max_colleges,
        });
    }
    assert_eq!(quotas.num_colleges(), m, "quota/profile college count");

    // Stable matchings are individually rational, so only mutually
    // acceptable pairs need to be tried.
    let options: Vec<Vec<u32>> = (0..n)
        .map(|i| {
            std::iter::once(UNMATCHED)
                .chain((1..=m as u32).filter(|&j| profile.student_accepts(i, j) && profile.college_accepts(j, i)))
                .collect()
        })
        .collect();

    let mut out = Vec::new();
    let mut assignment = vec![UNMATCHED; n];
    let mut fill = vec![0u32; m];
    search(0, &options, quotas, &mut assignment, &mut fill, &mut |a| {
        let mu = Matching::from_raw(a.to_vec(), m);
        if is_stable(&mu, profile, quotas) {
            out.push(mu);
        }
    });
    Ok(out)
}

fn search(
    i: usize,
    options: &[Vec<u32>],
    quotas: &Quotas,
    assignment: &mut [u32],
    fill: &mut [u32],
    visit: &mut dyn FnMut(&[u32]),
) {
    if i == options.len() {
        visit(assignment);
        return;
    }
    for &j in &options[i] {
        if j != UNMATCHED {
            let jdx = j as usize - 1;
            if fill[jdx] >= quotas.of(j) {
                continue;
            }
            fill[jdx] += 1;
        }
        assignment[i] = j;
        search(i + 1, options, quotas, assignment, fill, visit);
        if j != UNMATCHED {
            fill[j as usize - 1] -= 1;
        }
    }
    assignment[i] = UNMATCHED;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::market::PreferenceProfile;

    #[test]
    fn example_three_sosm_is_stable() {
        let (u, q) = (fixtures::example_profile(), fixtures::tight_quotas());
        let mu = Matching::new(vec![1, 2, 2, 3, 3], 3).unwrap();
        assert!(blocking_pairs(&mu, &u, &q).is_empty());
        assert!(is_stable(&mu, &u, &q));
        assert_eq!(classify_matching(&mu, &u, &q), StabilityClass::Stable);
    }

    #[test]
    fn perturbed_example_three_matching_is_stable() {
        let (u, q) = (fixtures::perturbed_example_profile(), fixtures::tight_quotas());
        let mu = Matching::new(vec![2, 3, 3, 1, 2], 3).unwrap();
        assert!(is_stable(&mu, &u, &q));
    }

    #[test]
    fn empty_matching_blocked_by_every_top_choice() {
        let u = fixtures::example_profile();
        let q = fixtures::tight_quotas();
        let mu = Matching::unmatched(5, 3);
        let pairs = blocking_pairs(&mu, &u, &q);
        for i in 0..5 {
            let top = u.students.order(i)[0];
            assert!(pairs.contains(&BlockingPair { student: i, college: top }));
        }
        // all acceptable and all vacant: every (i, j) blocks
        assert_eq!(pairs.len(), 15);
    }

    #[test]
    fn unacceptable_assignment_is_not_stable() {
        // college 1 finds student 0 unacceptable
        let u = PreferenceProfile::from_lists(&[vec![1]], &[vec![]]).unwrap();
        let q = Quotas::new(vec![1]).unwrap();
        let mu = Matching::new(vec![1], 1).unwrap();
        assert!(!is_stable(&mu, &u, &q));
        assert_eq!(classify_matching(&mu, &u, &q), StabilityClass::Unstable);
    }

    #[test]
    fn swapped_rosters_are_not_envy_free() {
        // Two students both ranked the same way by two colleges, each student
        // prefers the college the other holds.
        let u = PreferenceProfile::from_lists(
            &[vec![1, 2], vec![2, 1]],
            &[vec![0, 1], vec![1, 0]],
        )
        .unwrap();
        let q = Quotas::new(vec![1, 1]).unwrap();
        let mu = Matching::new(vec![2, 1], 2).unwrap();
        let pairs = blocking_pairs(&mu, &u, &q);
        assert_eq!(pairs.len(), 2);
        assert_ne!(pairs[0].student, pairs[1].student);
        let class = classify_matching(&mu, &u, &q);
        assert_eq!(class, StabilityClass::IndividuallyRational);
        assert!(class < StabilityClass::EnvyFree);
    }

    #[test]
    fn enumeration_examples() {
        let (u, q) = (fixtures::example_profile(), fixtures::tight_quotas());
        let all = enumerate_stable_matchings(&u, &q, EnumerationLimits::default()).unwrap();
        assert!(all.contains(&Matching::new(vec![1, 2, 2, 3, 3], 3).unwrap()));

        let nobody = PreferenceProfile::from_lists(&[vec![1, 2], vec![2]], &[vec![], vec![]]).unwrap();
        let q2 = Quotas::new(vec![1, 1]).unwrap();
        let all = enumerate_stable_matchings(&nobody, &q2, EnumerationLimits::default()).unwrap();
        assert_eq!(all, vec![Matching::unmatched(2, 2)]);

        let single = PreferenceProfile::from_lists(&[vec![1]], &[vec![0]]).unwrap();
        let all = enumerate_stable_matchings(&single, &Quotas::new(vec![1]).unwrap(), EnumerationLimits::default()).unwrap();
        assert_eq!(all, vec![Matching::new(vec![1], 1).unwrap()]);
    }

    #[test]
    fn enumeration_refuses_large_markets() {
        let lists: Vec<Vec<u32>> = vec![vec![1]; 9];
        let u = PreferenceProfile::from_lists(&lists, &[(0..9).collect()]).unwrap();
        let q = Quotas::new(vec![9]).unwrap();
        assert!(matches!(
            enumerate_stable_matchings(&u, &q, EnumerationLimits::default()),
            Err(Error::EnumerationCap { .. })
        ));
    }
}
