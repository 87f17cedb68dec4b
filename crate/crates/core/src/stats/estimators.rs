use serde::{Deserialize, Serialize};

use super::{Characteristics, ObservationWindow, StatisticSpec};
use crate::error::{Error, Result};
use crate::market::Matching;

/// `θ̂(τ)` with the aggregate bounds `b̄(Z) = Σ_{j∈M_Z} b_j(Z)` and
/// `c̄(Z) = Σ_{j∈M_Z} c_j(Z)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaHat {
    pub value: f64,
    pub b_bar: f64,
    pub c_bar: f64,
}

/// `θ̂(τ) = Σ_{j∈M_Z} (1/n_Z) Σ_{i∈N_Z} τ_j(X_i, Z) 1{Y_i = j}`.
pub fn theta_hat<S: StatisticSpec + ?Sized>(
    matching: &Matching,
    x: &Characteristics<'_>,
    z: &Characteristics<'_>,
    spec: &S,
    window: &ObservationWindow,
) -> Result<ThetaHat> {
    if window.m_z() == 0 {
        return Err(Error::InvalidStatistic("empty college window".into()));
    }
    let mut sum = 0.0;
    for &i in window.students() {
        let y = matching.college_of(i);
        if window.contains_college(y) {
            sum += spec.tau(y, x.row(i), z);
        }
    }
    let (b_bar, c_bar) = window
        .colleges()
        .iter()
        .fold((0.0, 0.0), |(b, c), &j| (b + spec.bound(j, z), c + spec.oscillation(j, z)));
    Ok(ThetaHat {
        value: sum / window.n_z() as f64,
        b_bar,
        c_bar,
    })
}

/// Share of window students matched to `j` (`0` = unmatched).
pub fn matching_frequency(matching: &Matching, window: &ObservationWindow, j: u32) -> f64 {
    let hits = window.students().iter().filter(|&&i| matching.college_of(i) == j).count();
    hits as f64 / window.n_z() as f64
}

/// Share of window students with `X_i ∈ A` matched to a college with
/// `Z_j ∈ A'`. Unmatched students never count.
pub fn characteristic_matching_frequency<A, B>(
    matching: &Matching,
    x: &Characteristics<'_>,
    z: &Characteristics<'_>,
    window: &ObservationWindow,
    a: A,
    a_prime: B,
) -> f64
where
    A: Fn(&[f64]) -> bool,
    B: Fn(&[f64]) -> bool,
{
    let hits = window
        .students()
        .iter()
        .filter(|&&i| {
            let y = matching.college_of(i);
            y != 0 && a(x.row(i)) && a_prime(z.row(y as usize - 1))
        })
        .count();
    hits as f64 / window.n_z() as f64
}

/// `F̂_j(point)`: share of window students at `j` with `X_i ≤ point`
/// coordinatewise. `None` when nobody in the window is at `j`.
pub fn conditional_cdf(
    matching: &Matching,
    x: &Characteristics<'_>,
    window: &ObservationWindow,
    j: u32,
    point: &[f64],
) -> Option<f64> {
    let (mut num, mut den) = (0usize, 0usize);
    for &i in window.students() {
        if matching.college_of(i) == j {
            den += 1;
            if x.row(i).iter().zip(point).all(|(a, b)| a <= b) {
                num += 1;
            }
        }
    }
    (den > 0).then(|| num as f64 / den as f64)
}

/// Compactly supported kernels on `[−1, 1]`, taken as products over
/// coordinates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    #[default]
    Epanechnikov,
    Triangular,
}

impl Kernel {
    pub fn eval1(&self, u: f64) -> f64 {
        if u.abs() > 1.0 {
            return 0.0;
        }
        match self {
            Kernel::Epanechnikov => 0.75 * (1.0 - u * u),
            Kernel::Triangular => 1.0 - u.abs(),
        }
    }

    /// `K((x − point) / h)`.
    pub fn weight(&self, x: &[f64], point: &[f64], h: f64) -> f64 {
        x.iter().zip(point).map(|(a, b)| self.eval1((a - b) / h)).product()
    }

    /// `sup |K|` in dimension `d`.
    pub fn sup_norm(&self, d: usize) -> f64 {
        self.eval1(0.0).powi(d as i32)
    }
}

/// `n_Z^(−1/(4+d))`.
pub fn default_bandwidth(n_z: usize, d: usize) -> f64 {
    (n_z as f64).powf(-1.0 / (4.0 + d as f64))
}

/// Local constant estimate of `P{Y_i = j | X_i = point}`. `None` when the
/// window carries no kernel mass at `point`.
pub fn kernel_conditional_prob(
    matching: &Matching,
    x: &Characteristics<'_>,
    window: &ObservationWindow,
    j: u32,
    point: &[f64],
    bandwidth: f64,
    kernel: Kernel,
) -> Result<Option<f64>> {
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::InvalidStatistic(format!("bandwidth must be positive, got {bandwidth}")));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for &i in window.students() {
        let k = kernel.weight(x.row(i), point, bandwidth);
        den += k;
        if matching.college_of(i) == j {
            num += k;
        }
    }
    Ok((den > 0.0).then(|| num / den))
}
