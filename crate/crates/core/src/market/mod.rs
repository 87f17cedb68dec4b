//! Market primitives: quotas, matchings, preference profiles, stability
//! predicates, the maximum-rank-difference metric and a brute-force oracle.

mod matching;
mod preferences;
mod rankdiff;
mod stability;

pub use matching::{validate_matching, Matching, Quotas, UNMATCHED};
pub use preferences::{
    remove_student, CollegePrefs, CollegeSide, PreferenceProfile, Profile, StudentPrefs, OUTSIDE,
};
pub use rankdiff::{max_rank_difference, RankDiffReport, RankDiffWitness};
pub use stability::{
    blocking_pairs, classify_matching, enumerate_stable_matchings, is_individually_rational,
    is_stable, BlockingPair, EnumerationLimits, StabilityClass,
};


