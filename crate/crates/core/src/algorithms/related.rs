//! The related one-to-one market: every college `j` is split into `q_j`
//! positions `(j, 1), …, (j, q_j)` that share `j`'s ordering; students rank
//! positions of one college consecutively, lower slot first.

use crate::market::{CollegePrefs, Matching, PreferenceProfile, Quotas, StudentPrefs, UNMATCHED};

#[derive(Clone, Debug)]
pub struct RelatedMarket {
    pub profile: PreferenceProfile,
    /// All ones.
    pub quotas: Quotas,
    /// `positions[p - 1] = (college, slot)` for position `p` (slots are 1-based).
    pub positions: Vec<(u32, u32)>,
    /// First position index of each college (0-based by college).
    first_position: Vec<u32>,
    original_colleges: usize,
    original_w: CollegePrefs,
}

pub fn to_related_one_to_one(profile: &PreferenceProfile, quotas: &Quotas) -> RelatedMarket {
    let n = profile.num_students();
    let m = profile.num_colleges();
    assert_eq!(quotas.num_colleges(), m, "quota/profile college count");

    let mut positions = Vec::with_capacity(quotas.total() as usize);
    let mut first_position = Vec::with_capacity(m);
    for j in 1..=m as u32 {
        first_position.push(positions.len() as u32 + 1);
        for slot in 1..=quotas.of(j) {
            positions.push((j, slot));
        }
    }

    let student_orders: Vec<Vec<u32>> = (0..n)
        .map(|i| {
            let mut o = Vec::with_capacity(positions.len() + 1);
            for &alt in profile.students.order(i) {
                if alt == UNMATCHED {
                    o.push(UNMATCHED);
                } else {
                    let first = first_position[alt as usize - 1];
                    o.extend(first..first + quotas.of(alt));
                }
            }
            o
        })
        .collect();
    let college_orders: Vec<Vec<u32>> = positions
        .iter()
        .map(|&(j, _)| profile.colleges.order(j).to_vec())
        .collect();

    let related = PreferenceProfile::new(
        StudentPrefs::from_orders(&student_orders, positions.len()).expect("expansion is a permutation"),
        CollegePrefs::from_orders(&college_orders, n).expect("copied orderings"),
    )
    .expect("sizes agree");

    RelatedMarket {
        profile: related,
        quotas: Quotas::uniform(positions.len(), 1).expect("unit quotas"),
        positions,
        first_position,
        original_colleges: m,
        original_w: profile.colleges.clone(),
    }
}

impl RelatedMarket {
    pub fn num_positions(&self) -> usize {
        self.positions.len()
    }

    /// Seats each roster in order of the college's preference: the best
    /// member takes slot 1.
    pub fn to_one_to_one(&self, mu: &Matching) -> Matching {
        let mut out = vec![UNMATCHED; mu.num_students()];
        for (jdx, mut roster) in mu.rosters().into_iter().enumerate() {
            let j = jdx as u32 + 1;
            roster.sort_by_key(|&i| self.original_w.rank_of_student(j, i));
            let first = self.first_position[jdx];
            for (slot, i) in roster.into_iter().enumerate() {
                out[i] = first + slot as u32;
            }
        }
        Matching::from_raw(out, self.positions.len())
    }

    pub fn to_many_to_one(&self, mu_bar: &Matching) -> Matching {
        let a = mu_bar
            .assignment()
            .iter()
            .map(|&p| if p == UNMATCHED { UNMATCHED } else { self.positions[p as usize - 1].0 })
            .collect();
        Matching::from_raw(a, self.original_colleges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::market::is_stable;

    #[test]
    fn splits_into_total_quota_positions() {
        let r = to_related_one_to_one(&fixtures::example_profile(), &fixtures::tight_quotas());
        assert_eq!(r.num_positions(), 5);
        assert_eq!(r.positions, vec![(1, 1), (2, 1), (2, 2), (3, 1), (3, 2)]);
    }

    #[test]
    fn example_three_round_trip_and_stability() {
        let u = fixtures::example_profile();
        let q = fixtures::tight_quotas();
        let r = to_related_one_to_one(&u, &q);
        let mu = fixtures::example_sosm();
        let bar = r.to_one_to_one(&mu);
        assert_eq!(r.to_many_to_one(&bar), mu);
        assert!(is_stable(&bar, &r.profile, &r.quotas));
        // j2 ranks i2 above i3, so i2 takes the first j2 slot
        assert_eq!(bar.college_of(1), 2);
        assert_eq!(bar.college_of(2), 3);
    }
}
