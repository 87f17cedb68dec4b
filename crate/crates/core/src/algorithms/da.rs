use std::collections::{BinaryHeap, VecDeque};

use crate::market::{CollegeSide, Matching, Profile, Quotas, UNMATCHED};

/// Student-proposing deferred acceptance; returns the student-optimal stable
/// matching.
///
/// Free students are processed first-in first-out starting from index order.
/// Each college keeps its tentative roster in a max-heap on priority key so
/// the least preferred member is available in `O(1)`.
pub fn deferred_acceptance<C: CollegeSide>(profile: &Profile<C>, quotas: &Quotas) -> Matching {
    let n = profile.num_students();
    let m = profile.num_colleges();
    assert_eq!(quotas.num_colleges(), m, "quota/profile college count");

    let mut assignment = vec![UNMATCHED; n];
    let mut next = vec![0u32; n];
    let mut rosters: Vec<BinaryHeap<(C::Key, u32)>> = (0..m).map(|_| BinaryHeap::new()).collect();
    let mut free: VecDeque<u32> = (0..n as u32).collect();

    while let Some(i) = free.pop_front() {
        let order = profile.students.order(i as usize);
        loop {
            let pos = next[i as usize] as usize;
            let j = order[pos];
            next[i as usize] += 1;
            if j == UNMATCHED {
                // everything further down is worse than staying out
                break;
            }
            if !profile.college_accepts(j, i as usize) {
                continue;
            }
            let key = profile.colleges.key(j, i as usize);
            let roster = &mut rosters[j as usize - 1];
            if roster.len() < quotas.of(j) as usize {
                roster.push((key, i));
                assignment[i as usize] = j;
                break;
            }
            let &(worst_key, worst) = roster.peek().expect("quota >= 1");
            if key < worst_key {
                roster.pop();
                roster.push((key, i));
                assignment[i as usize] = j;
                assignment[worst as usize] = UNMATCHED;
                free.push_back(worst);
                break;
            }
        }
    }
    Matching::from_raw(assignment, m)
}

/// College-proposing deferred acceptance; returns the college-optimal stable
/// matching.
pub fn deferred_acceptance_college_proposing<C: CollegeSide>(
    profile: &Profile<C>,
    quotas: &Quotas,
) -> Matching {
    let n = profile.num_students();
    let m = profile.num_colleges();
    assert_eq!(quotas.num_colleges(), m, "quota/profile college count");

    // each college's acceptable students, best first
    let lists: Vec<Vec<u32>> = (1..=m as u32)
        .map(|j| {
            let mut l: Vec<u32> = (0..n as u32)
                .filter(|&i| profile.college_accepts(j, i as usize))
                .collect();
            l.sort_by_key(|&i| profile.colleges.key(j, i as usize));
            l
        })
        .collect();

    let mut held = vec![UNMATCHED; n];
    let mut count = vec![0u32; m];
    let mut next = vec![0usize; m];
    let mut queue: Vec<u32> = (1..=m as u32).rev().collect();

    while let Some(j) = queue.pop() {
        let jdx = j as usize - 1;
        while count[jdx] < quotas.of(j) && next[jdx] < lists[jdx].len() {
            let i = lists[jdx][next[jdx]] as usize;
            next[jdx] += 1;
            if !profile.student_accepts(i, j) {
                continue;
            }
            let current = held[i];
            if current == UNMATCHED {
                held[i] = j;
                count[jdx] += 1;
            } else if profile.students.prefers(i, j, current) {
                held[i] = j;
                count[jdx] += 1;
                count[current as usize - 1] -= 1;
                queue.push(current);
            }
        }
    }
    Matching::from_raw(held, m)
}
