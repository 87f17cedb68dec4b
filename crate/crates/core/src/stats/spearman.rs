//! Spearman-type sorting measure between `X_{i,k}` and `Z_{Y_i,r}` over the
//! matched window students, with leave-out empirical CDFs.
//!
//! Writing `a_i = X_{i,k}` and `b_i = Z_{Y_i,r}` for the `n` matched students,
//! the double sum collapses to counts:
//!
//! ```text
//! GA(i) = #{i' : a_i' ≥ a_i}     LA(i) = #{i' : a_i' ≤ a_i}     (self included)
//! D     = Σ GA·GB − Σ GA − Σ GB + n
//! SA    = Σ (LA − 1),  SB = Σ (LB − 1)
//! ρ̂     = 12/n² · ( D/(n−2) − SA·SB/(n−1)² )
//! ```
//!
//! The leave-out joint CDF always divides by `n − 2`, also on the diagonal
//! `i = ℓ`, so fully tied data give `12 / (n(n − 2))` rather than zero.
//! Both evaluation paths produce the same integers and hence bit-identical
//! results.

use rayon::prelude::*;

use super::{Characteristics, ObservationWindow};
use crate::error::{Error, Result};
use crate::market::Matching;

/// Matched-student count above which [`spearman_rho_hat`] switches from the
/// pairwise path to the sorted path.
pub const PAIRWISE_LIMIT: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Counts {
    n: i128,
    ga_gb: i128,
    ga: i128,
    gb: i128,
    sa: i128,
    sb: i128,
}

impl Counts {
    fn rho(&self) -> f64 {
        let n = self.n;
        let d = self.ga_gb - self.ga - self.gb + n;
        let num = d * (n - 1) * (n - 1) - self.sa * self.sb * (n - 2);
        let den = (n - 2) * (n - 1) * (n - 1);
        12.0 * num as f64 / ((n * n) as f64 * den as f64)
    }
}

fn matched_pairs(
    matching: &Matching,
    x: &Characteristics<'_>,
    z: &Characteristics<'_>,
    window: &ObservationWindow,
    k: usize,
    r: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if k >= x.dim() || r >= z.dim() {
        return Err(Error::InvalidStatistic(format!(
            "coordinates k = {k}, r = {r} out of range ({}, {})",
            x.dim(),
            z.dim()
        )));
    }
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for &i in window.students() {
        let y = matching.college_of(i);
        if y != 0 {
            a.push(x.row(i)[k]);
            b.push(z.row(y as usize - 1)[r]);
        }
    }
    if a.len() < 3 {
        return Err(Error::InvalidStatistic(format!("need at least 3 matched students, have {}", a.len())));
    }
    if a.iter().chain(&b).any(|v| v.is_nan()) {
        return Err(Error::InvalidStatistic("NaN characteristic".into()));
    }
    Ok((a, b))
}

fn pairwise_counts(a: &[f64], b: &[f64]) -> Counts {
    let n = a.len();
    let rows: Vec<[i128; 5]> = (0..n)
        .into_par_iter()
        .map(|p| {
            let (mut ga, mut la, mut gb, mut lb) = (0i128, 0i128, 0i128, 0i128);
            for q in 0..n {
                ga += i128::from(a[q] >= a[p]);
                la += i128::from(a[q] <= a[p]);
                gb += i128::from(b[q] >= b[p]);
                lb += i128::from(b[q] <= b[p]);
            }
            [ga * gb, ga, gb, la - 1, lb - 1]
        })
        .collect();
    sum_rows(n, &rows)
}

fn sorted_counts(a: &[f64], b: &[f64]) -> Counts {
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_unstable_by(f64::total_cmp);
    sb.sort_unstable_by(f64::total_cmp);
    let n = a.len();
    let rows: Vec<[i128; 5]> = (0..n)
        .map(|p| {
            let ga = (n - sa.partition_point(|&v| v < a[p])) as i128;
            let la = sa.partition_point(|&v| v <= a[p]) as i128;
            let gb = (n - sb.partition_point(|&v| v < b[p])) as i128;
            let lb = sb.partition_point(|&v| v <= b[p]) as i128;
            [ga * gb, ga, gb, la - 1, lb - 1]
        })
        .collect();
    sum_rows(n, &rows)
}

fn sum_rows(n: usize, rows: &[[i128; 5]]) -> Counts {
    let mut t = [0i128; 5];
    for r in rows {
        for (acc, v) in t.iter_mut().zip(r) {
            *acc += v;
        }
    }
    Counts {
        n: n as i128,
        ga_gb: t[0],
        ga: t[1],
        gb: t[2],
        sa: t[3],
        sb: t[4],
    }
}

/// `ρ̂` via per-student pairwise comparisons, `O(n²)`.
pub fn spearman_rho_hat_pairwise(
    matching: &Matching,
    x: &Characteristics<'_>,
    z: &Characteristics<'_>,
    window: &ObservationWindow,
    k: usize,
    r: usize,
) -> Result<f64> {
    let (a, b) = matched_pairs(matching, x, z, window, k, r)?;
    Ok(pairwise_counts(&a, &b).rho())
}

/// `ρ̂` via sorting, `O(n log n)`.
pub fn spearman_rho_hat_sorted(
    matching: &Matching,
    x: &Characteristics<'_>,
    z: &Characteristics<'_>,
    window: &ObservationWindow,
    k: usize,
    r: usize,
) -> Result<f64> {
    let (a, b) = matched_pairs(matching, x, z, window, k, r)?;
    Ok(sorted_counts(&a, &b).rho())
}

/// `ρ̂` for coordinate `k` of `X` and `r` of `Z` (both 0-based).
pub fn spearman_rho_hat(
    matching: &Matching,
    x: &Characteristics<'_>,
    z: &Characteristics<'_>,
    window: &ObservationWindow,
    k: usize,
    r: usize,
) -> Result<f64> {
    let (a, b) = matched_pairs(matching, x, z, window, k, r)?;
    let counts = if a.len() <= PAIRWISE_LIMIT {
        pairwise_counts(&a, &b)
    } else {
        sorted_counts(&a, &b)
    };
    Ok(counts.rho())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The displayed double sum, evaluated literally in `O(n³)`.
    fn literal(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len();
        let nf = n as f64;
        let mut total = 0.0;
        for i in 0..n {
            for l in 0..n {
                let joint = (0..n)
                    .filter(|&q| q != i && q != l && a[q] <= a[i] && b[q] <= b[l])
                    .count() as f64
                    / (nf - 2.0);
                let fx = (0..n).filter(|&q| q != i && a[q] <= a[i]).count() as f64 / (nf - 1.0);
                let fz = (0..n).filter(|&q| q != l && b[q] <= b[l]).count() as f64 / (nf - 1.0);
                total += joint - fx * fz;
            }
        }
        12.0 / (nf * nf) * total
    }

    #[test]
    fn three_student_fixture_by_hand() {
        let a = [1.0, 2.0, 3.0];
        let b = [1.0, 2.0, 3.0];
        // GA = (3,2,1), GB = (3,2,1): Σ GA·GB = 14, Σ GA = Σ GB = 6, D = 14 - 12 + 3 = 5
        // SA = SB = 0 + 1 + 2 = 3; ρ̂ = 12/9 · (5/1 − 9/4) = 11/3
        let rho = pairwise_counts(&a, &b).rho();
        assert!((rho - 11.0 / 3.0).abs() < 1e-12);
        assert!((literal(&a, &b) - 11.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn fully_tied_data() {
        let n = 10;
        let a = vec![0.5; n];
        let b = vec![2.0; n];
        let expected = 12.0 / (n as f64 * (n as f64 - 2.0));
        assert!((pairwise_counts(&a, &b).rho() - expected).abs() < 1e-15);
        assert!((literal(&a, &b) - expected).abs() < 1e-12);
    }

    #[test]
    fn matches_literal_sum_and_paths_agree() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for n in [3usize, 4, 7, 15, 40] {
            // coarse values force ties
            let a: Vec<f64> = (0..n).map(|_| (rng.random::<f64>() * 5.0).floor()).collect();
            let b: Vec<f64> = (0..n).map(|_| (rng.random::<f64>() * 4.0).floor()).collect();
            let p = pairwise_counts(&a, &b);
            assert_eq!(p, sorted_counts(&a, &b));
            assert!((p.rho() - literal(&a, &b)).abs() < 1e-10, "n = {n}");
        }
    }

    #[test]
    fn needs_three_matched_students() {
        let mu = Matching::new(vec![1, 0, 1], 1).unwrap();
        let x = [0.1, 0.2, 0.3];
        let z = [1.0];
        let w = ObservationWindow::full(3, 1);
        let r = spearman_rho_hat(&mu, &Characteristics::new(&x, 1), &Characteristics::new(&z, 1), &w, 0, 0);
        assert!(matches!(r, Err(Error::InvalidStatistic(_))));
    }
}
