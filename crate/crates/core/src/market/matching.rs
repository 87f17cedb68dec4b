use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// College label used for "not matched to any college" (the outside option).
pub const UNMATCHED: u32 = 0;

/// College capacities, indexed by college `j = 1..=m` (stored 0-based).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Quotas(Vec<u32>);

impl Quotas {
    pub fn new(q: Vec<u32>) -> Result<Self> {
        if let Some(pos) = q.iter().position(|&x| x == 0) {
            return Err(Error::InvalidQuotas(format!(
                "college {} has quota 0; every quota must be at least 1",
                pos + 1
            )));
        }
        Ok(Quotas(q))
    }

    pub fn uniform(m: usize, q: u32) -> Result<Self> {
        Self::new(vec![q; m])
    }

    pub fn num_colleges(&self) -> usize {
        self.0.len()
    }

    /// Quota of college `j` (1-based).
    #[inline]
    pub fn of(&self, j: u32) -> u32 {
        self.0[j as usize - 1]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&q| q as u64).sum()
    }

    pub fn max(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

impl TryFrom<Vec<u32>> for Quotas {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Quotas::new(v)
    }
}

impl From<Quotas> for Vec<u32> {
    fn from(q: Quotas) -> Self {
        q.0
    }
}

/// An assignment of students `0..n` to colleges `1..=m`, with `0` meaning
/// unmatched.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Matching {
    assignment: Vec<u32>,
    num_colleges: usize,
}

impl Matching {
    pub fn new(assignment: Vec<u32>, num_colleges: usize) -> Result<Self> {
        if let Some((i, &j)) = assignment
            .iter()
            .enumerate()
            .find(|(_, &j)| j as usize > num_colleges)
        {
            return Err(Error::UnknownCollege {
                student: i,
                college: j,
                num_colleges,
            });
        }
        Ok(Matching {
            assignment,
            num_colleges,
        })
    }

    pub fn unmatched(n: usize, num_colleges: usize) -> Self {
        Matching {
            assignment: vec![UNMATCHED; n],
            num_colleges,
        }
    }

    pub(crate) fn from_raw(assignment: Vec<u32>, num_colleges: usize) -> Self {
        debug_assert!(assignment.iter().all(|&j| j as usize <= num_colleges));
        Matching {
            assignment,
            num_colleges,
        }
    }

    #[inline]
    pub fn num_students(&self) -> usize {
        self.assignment.len()
    }

    #[inline]
    pub fn num_colleges(&self) -> usize {
        self.num_colleges
    }

    /// College of student `i` (`0` if unmatched).
    #[inline]
    pub fn college_of(&self, i: usize) -> u32 {
        self.assignment[i]
    }

    pub fn assignment(&self) -> &[u32] {
        &self.assignment
    }

    pub fn into_assignment(self) -> Vec<u32> {
        self.assignment
    }

    pub(crate) fn set(&mut self, i: usize, j: u32) {
        self.assignment[i] = j;
    }

    /// Rosters `μ⁻¹(j)` for `j = 1..=m`, returned 0-based by college; each
    /// roster lists students in increasing index order.
    pub fn rosters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_colleges];
        for (i, &j) in self.assignment.iter().enumerate() {
            if j != UNMATCHED {
                out[j as usize - 1].push(i);
            }
        }
        out
    }

    /// Number of students assigned to each college (0-based by college).
    pub fn fill_counts(&self) -> Vec<usize> {
        let mut out = vec![0usize; self.num_colleges];
        for &j in &self.assignment {
            if j != UNMATCHED {
                out[j as usize - 1] += 1;
            }
        }
        out
    }

    pub fn matched_students(&self) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, &j)| j != UNMATCHED)
            .map(|(i, _)| i)
            .collect()
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (pos, &j) in self.assignment.iter().enumerate() {
            if pos > 0 {
                f.write_str(",")?;
            }
            if j == UNMATCHED {
                f.write_str("0")?;
            } else {
                write!(f, "j{j}")?;
            }
        }
        f.write_str(")")
    }
}

/// Checks the capacity constraint `|μ⁻¹(j)| ≤ q_j` for every college and
/// reports the first violated college.
pub fn validate_matching(matching: &Matching, quotas: &Quotas) -> Result<()> {
    if matching.num_colleges() != quotas.num_colleges() {
        return Err(Error::SizeMismatch(format!(
            "matching has {} colleges, quotas has {}",
            matching.num_colleges(),
            quotas.num_colleges()
        )));
    }
    for (idx, (&fill, &q)) in matching
        .fill_counts()
        .iter()
        .zip(quotas.as_slice())
        .enumerate()
    {
        if fill > q as usize {
            return Err(Error::OverQuota {
                college: idx as u32 + 1,
                assigned: fill,
                quota: q,
            });
        }
    }
    Ok(())
}
