//! Strict preference orderings for both sides of the market.
//!
//! Students rank the alternatives `{0, 1..=m}` where `0` is the outside
//! option; colleges rank `{0} ∪ N`. Everything an agent ranks below `0` is
//! unacceptable to it. Acceptability is derived from the position of `0`,
//! never stored separately.
//!
//! The college side is abstracted behind [`CollegeSide`] so the matching
//! algorithms can run either on explicit rank arrays ([`CollegePrefs`]) or
//! directly on priority scores (see `model::ScoredColleges`), which avoids
//! sorting `m` lists of `n` students in Monte Carlo loops.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// College side of a market: a strict order over `{0} ∪ N` per college,
/// exposed through comparison keys. Smaller keys are preferred.
pub trait CollegeSide {
    type Key: Ord + Copy + std::fmt::Debug;

    fn num_students(&self) -> usize;
    fn num_colleges(&self) -> usize;

    /// Key of student `i` at college `j` (1-based).
    fn key(&self, j: u32, i: usize) -> Self::Key;

    /// Key of the outside option at college `j` (1-based).
    fn outside_key(&self, j: u32) -> Self::Key;
}

/// Student orderings over `{0, 1..=m}`, stored as flat order and rank arrays.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudentPrefs {
    n: usize,
    m: usize,
    order: Vec<u32>,
    rank: Vec<u32>,
}

impl StudentPrefs {
    /// Builds from explicit orderings; each must be a permutation of `0..=m`.
    pub fn from_orders(orders: &[Vec<u32>], m: usize) -> Result<Self> {
        let n = orders.len();
        let width = m + 1;
        let mut order = Vec::with_capacity(n * width);
        let mut rank = vec![u32::MAX; n * width];
        for (i, o) in orders.iter().enumerate() {
            if o.len() != width {
                return Err(Error::InvalidPreferences(format!(
                    "student {i} ranks {} alternatives, expected {width}",
                    o.len()
                )));
            }
            for (pos, &alt) in o.iter().enumerate() {
                if alt as usize > m || rank[i * width + alt as usize] != u32::MAX {
                    return Err(Error::InvalidPreferences(format!(
                        "student {i} ordering is not a permutation of 0..={m}"
                    )));
                }
                rank[i * width + alt as usize] = pos as u32;
            }
            order.extend_from_slice(o);
        }
        Ok(StudentPrefs { n, m, order, rank })
    }

    /// Orders alternatives by descending utility. `utilities` holds `m + 1`
    /// values per student, index `0` being the outside option. Exact ties are
    /// broken toward the lower alternative index; the number of tied adjacent
    /// pairs is returned alongside.
    pub fn from_utilities(utilities: &[f64], n: usize, m: usize) -> (Self, usize) {
        let width = m + 1;
        assert_eq!(utilities.len(), n * width, "utility matrix has wrong size");
        let mut order = vec![0u32; n * width];
        let mut rank = vec![0u32; n * width];
        let mut ties = 0usize;
        let mut scratch: Vec<u32> = Vec::with_capacity(width);
        for i in 0..n {
            let u = &utilities[i * width..(i + 1) * width];
            scratch.clear();
            scratch.extend(0..width as u32);
            scratch.sort_by(|&a, &b| {
                u[b as usize]
                    .total_cmp(&u[a as usize])
                    .then_with(|| a.cmp(&b))
            });
            for w in scratch.windows(2) {
                if u[w[0] as usize] == u[w[1] as usize] {
                    ties += 1;
                }
            }
            for (pos, &alt) in scratch.iter().enumerate() {
                order[i * width + pos] = alt;
                rank[i * width + alt as usize] = pos as u32;
            }
        }
        (StudentPrefs { n, m, order, rank }, ties)
    }

    pub fn num_students(&self) -> usize {
        self.n
    }

    pub fn num_colleges(&self) -> usize {
        self.m
    }

    /// Student `i`'s ordering over `{0, 1..=m}`, best first.
    #[inline]
    pub fn order(&self, i: usize) -> &[u32] {
        let w = self.m + 1;
        &self.order[i * w..(i + 1) * w]
    }

    /// Position of alternative `alt` in student `i`'s ordering (0 = best).
    #[inline]
    pub fn rank(&self, i: usize, alt: u32) -> u32 {
        self.rank[i * (self.m + 1) + alt as usize]
    }

    #[inline]
    pub fn prefers(&self, i: usize, a: u32, b: u32) -> bool {
        self.rank(i, a) < self.rank(i, b)
    }

    /// Drops student `i` (remaining students keep their relative indices).
    pub fn without(&self, i: usize) -> Self {
        let w = self.m + 1;
        let mut order = self.order.clone();
        let mut rank = self.rank.clone();
        order.drain(i * w..(i + 1) * w);
        rank.drain(i * w..(i + 1) * w);
        StudentPrefs {
            n: self.n - 1,
            m: self.m,
            order,
            rank,
        }
    }

    /// Replaces student `i`'s ordering.
    pub fn with_order(&self, i: usize, new_order: &[u32]) -> Result<Self> {
        let mut orders: Vec<Vec<u32>> = (0..self.n).map(|s| self.order(s).to_vec()).collect();
        orders[i] = new_order.to_vec();
        Self::from_orders(&orders, self.m)
    }
}

/// Code of the outside option in a college ordering; student `i` has code `i + 1`.
pub const OUTSIDE: u32 = 0;

/// College orderings over `{0} ∪ N` as explicit rank arrays.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollegePrefs {
    n: usize,
    m: usize,
    /// Per college, `n + 1` codes best first (`0` = outside, `i + 1` = student `i`).
    order: Vec<u32>,
    /// Per college, rank indexed by code.
    rank: Vec<u32>,
}

impl CollegePrefs {
    /// Builds from explicit orderings over codes `0..=n`.
    pub fn from_orders(orders: &[Vec<u32>], n: usize) -> Result<Self> {
        let m = orders.len();
        let width = n + 1;
        let mut order = Vec::with_capacity(m * width);
        let mut rank = vec![u32::MAX; m * width];
        for (jdx, o) in orders.iter().enumerate() {
            if o.len() != width {
                return Err(Error::InvalidPreferences(format!(
                    "college {} ranks {} alternatives, expected {width}",
                    jdx + 1,
                    o.len()
                )));
            }
            for (pos, &code) in o.iter().enumerate() {
                if code as usize > n || rank[jdx * width + code as usize] != u32::MAX {
                    return Err(Error::InvalidPreferences(format!(
                        "college {} ordering is not a permutation of 0..={n}",
                        jdx + 1
                    )));
                }
                rank[jdx * width + code as usize] = pos as u32;
            }
            order.extend_from_slice(o);
        }
        Ok(CollegePrefs { n, m, order, rank })
    }

    pub(crate) fn from_raw_orders(order: Vec<u32>, n: usize, m: usize) -> Self {
        let width = n + 1;
        debug_assert_eq!(order.len(), m * width);
        let mut rank = vec![0u32; m * width];
        for jdx in 0..m {
            for (pos, &code) in order[jdx * width..(jdx + 1) * width].iter().enumerate() {
                rank[jdx * width + code as usize] = pos as u32;
            }
        }
        CollegePrefs { n, m, order, rank }
    }

    pub fn num_students(&self) -> usize {
        self.n
    }

    pub fn num_colleges(&self) -> usize {
        self.m
    }

    /// College `j`'s ordering (1-based `j`) as codes, best first.
    #[inline]
    pub fn order(&self, j: u32) -> &[u32] {
        let w = self.n + 1;
        let jdx = j as usize - 1;
        &self.order[jdx * w..(jdx + 1) * w]
    }

    /// Rank of `code` at college `j` (0 = best).
    #[inline]
    pub fn rank_of_code(&self, j: u32, code: u32) -> u32 {
        self.rank[(j as usize - 1) * (self.n + 1) + code as usize]
    }

    /// Rank of student `i` at college `j`.
    #[inline]
    pub fn rank_of_student(&self, j: u32, i: usize) -> u32 {
        self.rank_of_code(j, i as u32 + 1)
    }

    /// Restricts every ordering to `N ∖ {i}`, preserving relative order, and
    /// re-indexes students above `i` down by one.
    pub fn without(&self, i: usize) -> Self {
        let removed = i as u32 + 1;
        let mut order = Vec::with_capacity(self.m * self.n);
        for j in 1..=self.m as u32 {
            for &code in self.order(j) {
                if code == removed {
                    continue;
                }
                order.push(if code > removed { code - 1 } else { code });
            }
        }
        CollegePrefs::from_raw_orders(order, self.n - 1, self.m)
    }
}

impl CollegeSide for CollegePrefs {
    type Key = u32;

    fn num_students(&self) -> usize {
        self.n
    }

    fn num_colleges(&self) -> usize {
        self.m
    }

    #[inline]
    fn key(&self, j: u32, i: usize) -> u32 {
        self.rank_of_student(j, i)
    }

    #[inline]
    fn outside_key(&self, j: u32) -> u32 {
        self.rank_of_code(j, OUTSIDE)
    }
}

/// A full preference profile `u = (v, w)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Profile<C> {
    pub students: StudentPrefs,
    pub colleges: C,
}

/// Profile with explicit college rank arrays.
pub type PreferenceProfile = Profile<CollegePrefs>;

impl<C: CollegeSide> Profile<C> {
    pub fn new(students: StudentPrefs, colleges: C) -> Result<Self> {
        if students.num_students() != colleges.num_students()
            || students.num_colleges() != colleges.num_colleges()
        {
            return Err(Error::SizeMismatch(format!(
                "students side is {}x{}, colleges side is {}x{}",
                students.num_students(),
                students.num_colleges(),
                colleges.num_students(),
                colleges.num_colleges()
            )));
        }
        Ok(Profile { students, colleges })
    }

    #[inline]
    pub fn num_students(&self) -> usize {
        self.students.num_students()
    }

    #[inline]
    pub fn num_colleges(&self) -> usize {
        self.students.num_colleges()
    }

    /// `a ≻_j b` for students `a`, `b`.
    #[inline]
    pub fn college_prefers(&self, j: u32, a: usize, b: usize) -> bool {
        self.colleges.key(j, a) < self.colleges.key(j, b)
    }

    /// `i ≻_j 0`.
    #[inline]
    pub fn college_accepts(&self, j: u32, i: usize) -> bool {
        self.colleges.key(j, i) < self.colleges.outside_key(j)
    }

    /// `j ≻_i 0`.
    #[inline]
    pub fn student_accepts(&self, i: usize, j: u32) -> bool {
        self.students.prefers(i, j, 0)
    }
}

impl PreferenceProfile {
    /// Convenience constructor from acceptable lists. `student_lists[i]`
    /// lists acceptable colleges (1-based) best first; the outside option
    /// follows, then the remaining colleges in index order.
    /// `college_lists[j-1]` lists acceptable students (0-based) best first,
    /// followed by the outside option and the remaining students.
    pub fn from_lists(student_lists: &[Vec<u32>], college_lists: &[Vec<usize>]) -> Result<Self> {
        let n = student_lists.len();
        let m = college_lists.len();
        let student_orders: Vec<Vec<u32>> = student_lists
            .iter()
            .map(|list| {
                let mut o = list.clone();
                o.push(0);
                o.extend((1..=m as u32).filter(|j| !list.contains(j)));
                o
            })
            .collect();
        let college_orders: Vec<Vec<u32>> = college_lists
            .iter()
            .map(|list| {
                let mut o: Vec<u32> = list.iter().map(|&i| i as u32 + 1).collect();
                o.push(OUTSIDE);
                o.extend((0..n).filter(|i| !list.contains(i)).map(|i| i as u32 + 1));
                o
            })
            .collect();
        Profile::new(
            StudentPrefs::from_orders(&student_orders, m)?,
            CollegePrefs::from_orders(&college_orders, n)?,
        )
    }

    /// Removes student `i` from the market, yielding `u_{-i}` over the
    /// remaining students (indices above `i` shift down by one).
    pub fn remove_student(&self, i: usize) -> Self {
        assert!(i < self.num_students(), "student {i} out of range");
        Profile {
            students: self.students.without(i),
            colleges: self.colleges.without(i),
        }
    }
}

/// Removes student `i`; see [`PreferenceProfile::remove_student`].
pub fn remove_student(profile: &PreferenceProfile, i: usize) -> PreferenceProfile {
    profile.remove_student(i)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_orders_rejects_non_permutations() {
        assert!(StudentPrefs::from_orders(&[vec![1, 1, 0]], 2).is_err());
        assert!(StudentPrefs::from_orders(&[vec![1, 0]], 2).is_err());
        assert!(CollegePrefs::from_orders(&[vec![0, 1, 3]], 2).is_err());
    }

    #[test]
    fn utilities_sort_descending_with_index_tie_break() {
        // U_i0 = 0.5, U_i1 = 2.0, U_i2 = 1.0 -> (j1, j2, 0)
        let (s, ties) = StudentPrefs::from_utilities(&[0.5, 2.0, 1.0], 1, 2);
        assert_eq!(s.order(0), &[1, 2, 0]);
        assert_eq!(ties, 0);
        let (s, ties) = StudentPrefs::from_utilities(&[1.0, 1.0, 0.0], 1, 2);
        assert_eq!(s.order(0), &[0, 1, 2]);
        assert_eq!(ties, 1);
    }

    #[test]
    fn removing_student_preserves_relative_order() {
        let p = PreferenceProfile::from_lists(
            &[vec![1], vec![1], vec![1]],
            &[vec![2, 0, 1]],
        )
        .unwrap();
        let r = p.remove_student(0);
        assert_eq!(r.num_students(), 2);
        // old student 2 (code 3) -> new student 1 (code 2); old 1 -> new 0.
        assert_eq!(r.colleges.order(1), &[2, 1, 0]);
        // Re-inserting: relative order of the survivors matches the original.
        assert!(r.college_prefers(1, 1, 0));
        assert!(p.college_prefers(1, 2, 1));
    }
}
