//! Re-stabilization of 1-envy-free matchings by repeatedly satisfying the
//! student-maximal blocking pair.

use std::collections::BinaryHeap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::{
    blocking_pairs, classify_matching, CollegeSide, Matching, Profile, Quotas, StabilityClass,
    UNMATCHED,
};

/// One application of the operator: `student` joins `college`, pushing out
/// `displaced` when the college was full.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestabStep {
    pub student: usize,
    pub college: u32,
    pub displaced: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestabTrace {
    pub steps: Vec<RestabStep>,
    pub iterations: usize,
}

impl RestabTrace {
    /// Writes one JSON object per step, newline separated.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for (idx, step) in self.steps.iter().enumerate() {
            let line = serde_json::json!({
                "step": idx,
                "student": step.student,
                "college": step.college,
                "displaced": step.displaced,
            });
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

/// `g_i(μ_i)`: extends a matching on `N ∖ {i}` to `N` with student `i`
/// unmatched. Students at or above `i` in the reduced market shift up by one.
pub fn embed_without_student(mu_reduced: &Matching, i: usize) -> Matching {
    assert!(i <= mu_reduced.num_students(), "student {i} out of range");
    let mut a = mu_reduced.assignment().to_vec();
    a.insert(i, UNMATCHED);
    Matching::from_raw(a, mu_reduced.num_colleges())
}

/// Restriction of `mu` to `N ∖ {i}` (inverse of [`embed_without_student`]
/// whenever `i` is unmatched).
pub fn restrict_without_student(mu: &Matching, i: usize) -> Matching {
    let mut a = mu.assignment().to_vec();
    a.remove(i);
    Matching::from_raw(a, mu.num_colleges())
}

/// Iteration cap `n · m · max q + 1`; exceeding it would mean the operator
/// cycles.
pub fn iteration_cap(n: usize, quotas: &Quotas) -> usize {
    n * quotas.num_colleges() * quotas.max() as usize + 1
}

/// Applies the operator once. A stable input is returned unchanged with no
/// step; an input that is not 1-envy-free is rejected.
pub fn restabilize_step<C: CollegeSide>(
    mu: &Matching,
    profile: &Profile<C>,
    quotas: &Quotas,
) -> Result<(Matching, Option<RestabStep>)> {
    match classify_matching(mu, profile, quotas) {
        StabilityClass::Stable => return Ok((mu.clone(), None)),
        StabilityClass::OneEnvyFree => {}
        _ => return Err(Error::NotOneEnvyFree),
    }
    let pairs = blocking_pairs(mu, profile, quotas);
    let student = pairs[0].student;
    let college = pairs
        .iter()
        .map(|p| p.college)
        .min_by_key(|&j| profile.students.rank(student, j))
        .expect("nonempty");

    let mut next = mu.clone();
    let roster: Vec<usize> = (0..mu.num_students())
        .filter(|&s| mu.college_of(s) == college)
        .collect();
    let displaced = if roster.len() >= quotas.of(college) as usize {
        let worst = roster
            .iter()
            .copied()
            .max_by_key(|&s| profile.colleges.key(college, s))
            .expect("full roster is nonempty");
        next.set(worst, UNMATCHED);
        Some(worst)
    } else {
        None
    };
    next.set(student, college);
    Ok((next, Some(RestabStep { student, college, displaced })))
}

/// Iterates [`restabilize_step`] to its fixed point (a stable matching).
///
/// After the initial 1-envy-free check only the most recently displaced
/// student can take part in a blocking pair, so each iteration scans one
/// preference list against per-college worst-member heaps instead of
/// recomputing all blocking pairs.
pub fn restabilize<C: CollegeSide>(
    mu: &Matching,
    profile: &Profile<C>,
    quotas: &Quotas,
) -> Result<(Matching, RestabTrace)> {
    let mut active = match classify_matching(mu, profile, quotas) {
        StabilityClass::Stable => return Ok((mu.clone(), RestabTrace::default())),
        StabilityClass::OneEnvyFree => Some(blocking_pairs(mu, profile, quotas)[0].student),
        _ => return Err(Error::NotOneEnvyFree),
    };

    let m = profile.num_colleges();
    let cap = iteration_cap(profile.num_students(), quotas);
    let mut out = mu.clone();
    let mut rosters: Vec<BinaryHeap<(C::Key, usize)>> = (0..m).map(|_| BinaryHeap::new()).collect();
    for (s, &j) in mu.assignment().iter().enumerate() {
        if j != UNMATCHED {
            rosters[j as usize - 1].push((profile.colleges.key(j, s), s));
        }
    }

    let mut trace = RestabTrace::default();
    while let Some(i) = active.take() {
        let current = out.college_of(i);
        // 1-envy-free matchings are only blocked by unmatched students
        debug_assert_eq!(current, UNMATCHED);
        let mut target = None;
        for &j in profile.students.order(i) {
            if j == current {
                break;
            }
            if j == UNMATCHED {
                continue;
            }
            let roster = &rosters[j as usize - 1];
            let blocks = if roster.len() < quotas.of(j) as usize {
                profile.college_accepts(j, i)
            } else {
                roster
                    .peek()
                    .is_some_and(|&(worst, _)| profile.colleges.key(j, i) < worst)
            };
            if blocks {
                target = Some(j);
                break;
            }
        }
        let Some(j) = target else { break };

        if trace.iterations >= cap {
            return Err(Error::IterationCap { cap });
        }
        let roster = &mut rosters[j as usize - 1];
        let displaced = if roster.len() >= quotas.of(j) as usize {
            let (_, worst) = roster.pop().expect("full roster is nonempty");
            out.set(worst, UNMATCHED);
            Some(worst)
        } else {
            None
        };
        roster.push((profile.colleges.key(j, i), i));
        out.set(i, j);
        trace.steps.push(RestabStep { student: i, college: j, displaced });
        trace.iterations += 1;
        active = displaced;
    }
    Ok((out, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::deferred_acceptance;
    use crate::fixtures;
    use crate::market::{is_stable, PreferenceProfile};

    #[test]
    fn stable_input_is_a_fixed_point() {
        let (u, q) = (fixtures::example_profile(), fixtures::tight_quotas());
        let mu = fixtures::example_sosm();
        let (next, step) = restabilize_step(&mu, &u, &q).unwrap();
        assert_eq!(next, mu);
        assert!(step.is_none());
        let (out, trace) = restabilize(&mu, &u, &q).unwrap();
        assert_eq!(out, mu);
        assert_eq!(trace.iterations, 0);
    }

    #[test]
    fn vacancy_is_filled_without_displacement() {
        let u = PreferenceProfile::from_lists(&[vec![1]], &[vec![0]]).unwrap();
        let q = Quotas::new(vec![1]).unwrap();
        let (next, step) = restabilize_step(&Matching::unmatched(1, 1), &u, &q).unwrap();
        assert_eq!(next.assignment(), &[1]);
        assert_eq!(step, Some(RestabStep { student: 0, college: 1, displaced: None }));
    }

    #[test]
    fn rejects_inputs_that_are_not_one_envy_free() {
        let u = fixtures::example_profile();
        let q = fixtures::tight_quotas();
        let mu = Matching::unmatched(5, 3);
        assert!(matches!(restabilize_step(&mu, &u, &q), Err(Error::NotOneEnvyFree)));
        assert!(matches!(restabilize(&mu, &u, &q), Err(Error::NotOneEnvyFree)));
    }

    #[test]
    fn example_three_replay_for_every_removed_student() {
        let (u, q) = (fixtures::example_profile(), fixtures::tight_quotas());
        let sosm = deferred_acceptance(&u, &q);
        for i in 0..5 {
            let reduced = u.remove_student(i);
            let mu_i = deferred_acceptance(&reduced, &q);
            assert!(is_stable(&mu_i, &reduced, &q));
            let start = embed_without_student(&mu_i, i);
            let class = classify_matching(&start, &u, &q);
            assert!(class >= StabilityClass::OneEnvyFree, "i = {i}: {class:?}");
            let (out, _) = restabilize(&start, &u, &q).unwrap();
            assert_eq!(out, sosm, "removed student {i}");
        }
    }

    #[test]
    fn first_step_on_example_three_displaces_worst_of_entered_college() {
        // Removing i1 from the example market; re-inserting i1 must push out
        // the least preferred member of a full roster if i1's target is full.
        let (u, q) = (fixtures::example_profile(), fixtures::tight_quotas());
        let reduced = u.remove_student(0);
        let start = embed_without_student(&deferred_acceptance(&reduced, &q), 0);
        let (next, step) = restabilize_step(&start, &u, &q).unwrap();
        let step = step.unwrap();
        assert_eq!(step.student, 0);
        let entered = step.college;
        let before: Vec<usize> = (0..5).filter(|&s| start.college_of(s) == entered).collect();
        if before.len() == q.of(entered) as usize {
            let worst = *before.iter().max_by_key(|&&s| u.colleges.rank_of_student(entered, s)).unwrap();
            assert_eq!(step.displaced, Some(worst));
            assert_eq!(next.college_of(worst), UNMATCHED);
        } else {
            assert_eq!(step.displaced, None);
        }
    }

    #[test]
    fn embedding_round_trip_for_unmatched_student() {
        let mu = Matching::new(vec![1, 0, 2], 2).unwrap();
        assert_eq!(embed_without_student(&restrict_without_student(&mu, 1), 1), mu);
    }

    #[test]
    fn universally_unacceptable_student_embeds_stably() {
        let u = PreferenceProfile::from_lists(
            &[vec![1], vec![1]],
            &[vec![0]],
        )
        .unwrap();
        let q = Quotas::new(vec![1]).unwrap();
        let reduced = u.remove_student(1);
        let mu = embed_without_student(&deferred_acceptance(&reduced, &q), 1);
        assert!(is_stable(&mu, &u, &q));
    }

    #[test]
    fn trace_serializes_one_line_per_step() {
        let trace = RestabTrace {
            steps: vec![
                RestabStep { student: 0, college: 2, displaced: Some(4) },
                RestabStep { student: 4, college: 1, displaced: None },
            ],
            iterations: 2,
        };
        let mut buf = Vec::new();
        trace.write_jsonl(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        let v: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
        assert_eq!(v["displaced"], 4);
    }
}
