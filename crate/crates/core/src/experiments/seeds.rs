//! Replication seeds: every task derives its own seed from the experiment
//! seed, a salt naming the task family, a scope (grid cell or `n`) and the
//! replication index.

pub(crate) mod salt {
    pub const REPLICATION: u64 = 1;
    pub const TARGET: u64 = 2;
    pub const TRIAL: u64 = 3;
    pub const ORACLE: u64 = 4;
    pub const RHO_ORACLE: u64 = 5;
    pub const EXCHANGE: u64 = 6;
    pub const RANKDIFF: u64 = 7;
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn replication_seed(base: u64, salt: u64, scope: u64, index: u64) -> u64 {
    splitmix(splitmix(splitmix(base ^ splitmix(salt)) ^ scope) ^ index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn seeds_are_distinct_across_salts_scopes_and_indices() {
        let mut seen = HashSet::new();
        for s in 1..=7 {
            for scope in 0..4 {
                for idx in 0..500 {
                    assert!(seen.insert(replication_seed(42, s, scope, idx)));
                }
            }
        }
        assert_eq!(replication_seed(1, 2, 3, 4), replication_seed(1, 2, 3, 4));
    }
}
