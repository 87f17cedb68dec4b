use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{rng_for, stream, CollegeDraw};

/// Observed students `N_Z` and colleges `M_Z ⊂ {0, 1..m}`, both sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservationWindow {
    students: Vec<usize>,
    colleges: Vec<u32>,
}

impl ObservationWindow {
    pub fn new(mut students: Vec<usize>, mut colleges: Vec<u32>) -> Result<Self> {
        students.sort_unstable();
        students.dedup();
        colleges.sort_unstable();
        colleges.dedup();
        if students.is_empty() {
            return Err(Error::InvalidStatistic("window has no students".into()));
        }
        if colleges.is_empty() {
            return Err(Error::InvalidStatistic("window has no colleges".into()));
        }
        Ok(ObservationWindow { students, colleges })
    }

    /// All students and all of `{0, 1..m}`.
    pub fn full(n: usize, m: usize) -> Self {
        ObservationWindow {
            students: (0..n).collect(),
            colleges: (0..=m as u32).collect(),
        }
    }

    /// The first `ceil(fraction · n)` students of a permutation seeded by the
    /// college draw alone, with all of `{0, 1..m}`.
    pub fn fraction(n: usize, colleges: &CollegeDraw, fraction: f64) -> Result<Self> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::InvalidStatistic(format!("window fraction {fraction} outside (0, 1]")));
        }
        let keep = ((fraction * n as f64).ceil() as usize).clamp(1, n.max(1));
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng_for(college_seed(colleges), stream::WINDOW));
        perm.truncate(keep);
        Self::new(perm, (0..=colleges.m as u32).collect())
    }

    pub fn with_colleges(&self, colleges: Vec<u32>) -> Result<Self> {
        Self::new(self.students.clone(), colleges)
    }

    pub fn students(&self) -> &[usize] {
        &self.students
    }

    pub fn colleges(&self) -> &[u32] {
        &self.colleges
    }

    pub fn n_z(&self) -> usize {
        self.students.len()
    }

    pub fn m_z(&self) -> usize {
        self.colleges.len()
    }

    pub fn contains_college(&self, j: u32) -> bool {
        self.colleges.binary_search(&j).is_ok()
    }
}

/// Seed derived from the bits of `(Z, ξ)`.
pub fn college_seed(colleges: &CollegeDraw) -> u64 {
    let mut h = Sha256::new();
    for v in colleges.z.iter().chain(&colleges.xi) {
        h.update(v.to_bits().to_le_bytes());
    }
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{sample_colleges, ModelConfig};

    #[test]
    fn fraction_depends_only_on_college_draw() {
        let cfg = ModelConfig::new(100, 3);
        let draw = sample_colleges(&cfg, 1).unwrap();
        let a = ObservationWindow::fraction(100, &draw, 0.3).unwrap();
        let b = ObservationWindow::fraction(100, &draw, 0.3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n_z(), 30);
        assert_eq!(a.m_z(), 4);
        let other = ObservationWindow::fraction(100, &sample_colleges(&cfg, 2).unwrap(), 0.3).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn empty_parts_rejected() {
        assert!(ObservationWindow::new(vec![], vec![1]).is_err());
        assert!(ObservationWindow::new(vec![0], vec![]).is_err());
    }
}
