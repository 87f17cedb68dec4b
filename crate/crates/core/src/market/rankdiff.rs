//! Maximum rank difference `h(w)`: the largest gap, at any college, between
//! two members of `N' = {0} ∪ N` whose relative order some pair of colleges
//! disputes.

use serde::{Deserialize, Serialize};

use super::preferences::CollegePrefs;

/// A disputed pair and the college at which its rank gap is attained.
/// Members are ordering codes: `0` is the outside option, `i + 1` is student `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankDiffWitness {
    pub college: u32,
    /// Ranked higher at `college`.
    pub upper: u32,
    /// Ranked lower at `college`.
    pub lower: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankDiffReport {
    pub h: u32,
    pub witness: Option<RankDiffWitness>,
}

/// Computes `h(w)` in `O(m² n)`.
///
/// A pair `(a, b)` with `a` above `b` at college `j` is disputed iff some
/// other college `k` ranks `b` above `a`. Sweeping `k`'s order while tracking
/// the worst `j`-rank seen so far gives, for each `a`, the farthest disputed
/// partner below it at `j`.
pub fn max_rank_difference(w: &CollegePrefs) -> RankDiffReport {
    let m = w.num_colleges() as u32;
    let mut best = RankDiffReport { h: 0, witness: None };
    for j in 1..=m {
        for k in 1..=m {
            if j == k {
                continue;
            }
            // (rank at j, code) of the worst-at-j member seen so far in k's order
            let mut prefix: Option<(u32, u32)> = None;
            for &a in w.order(k) {
                let ra = w.rank_of_code(j, a);
                if let Some((rb, b)) = prefix {
                    if rb > ra && rb - ra > best.h {
                        best = RankDiffReport {
                            h: rb - ra,
                            witness: Some(RankDiffWitness {
                                college: j,
                                upper: a,
                                lower: b,
                            }),
                        };
                    }
                }
                if prefix.map_or(true, |(rb, _)| ra > rb) {
                    prefix = Some((ra, a));
                }
            }
        }
    }
    best
}
