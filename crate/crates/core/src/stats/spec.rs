use super::{Characteristics, Kernel};

/// The family `τ = (τ_0, …, τ_m)` with declared bounds:
/// `|τ_j(x, Z)| ≤ b_j(Z)` and `|τ_j(x, Z) − τ_j(x', Z)| ≤ c_j(Z)`.
pub trait StatisticSpec: Sync {
    fn tau(&self, j: u32, x: &[f64], z: &Characteristics<'_>) -> f64;
    fn bound(&self, j: u32, z: &Characteristics<'_>) -> f64;
    fn oscillation(&self, j: u32, z: &Characteristics<'_>) -> f64;
}

/// `τ_j ≡ 1`: with `M_Z = M` the statistic is the matched fraction.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Ones;

impl StatisticSpec for Ones {
    fn tau(&self, _: u32, _: &[f64], _: &Characteristics<'_>) -> f64 {
        1.0
    }
    fn bound(&self, _: u32, _: &Characteristics<'_>) -> f64 {
        1.0
    }
    fn oscillation(&self, _: u32, _: &Characteristics<'_>) -> f64 {
        0.0
    }
}

/// `τ_j' = 1{j' = college}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollegeIndicator {
    pub college: u32,
}

impl StatisticSpec for CollegeIndicator {
    fn tau(&self, j: u32, _: &[f64], _: &Characteristics<'_>) -> f64 {
        f64::from(u8::from(j == self.college))
    }
    fn bound(&self, _: u32, _: &Characteristics<'_>) -> f64 {
        1.0
    }
    fn oscillation(&self, _: u32, _: &Characteristics<'_>) -> f64 {
        0.0
    }
}

/// `τ_j(x, Z) = 1{x ∈ A, Z_j ∈ A'}`; the outside option has no
/// characteristics and never lies in `A'`.
pub struct CharacteristicIndicator<A, B> {
    pub a: A,
    pub a_prime: B,
}

impl<A, B> StatisticSpec for CharacteristicIndicator<A, B>
where
    A: Fn(&[f64]) -> bool + Sync,
    B: Fn(&[f64]) -> bool + Sync,
{
    fn tau(&self, j: u32, x: &[f64], z: &Characteristics<'_>) -> f64 {
        let hit = j != 0 && (self.a)(x) && (self.a_prime)(z.row(j as usize - 1));
        f64::from(u8::from(hit))
    }
    fn bound(&self, _: u32, _: &Characteristics<'_>) -> f64 {
        1.0
    }
    fn oscillation(&self, _: u32, _: &Characteristics<'_>) -> f64 {
        1.0
    }
}

/// `τ_j(x) = K((x − point) / h)`, bounded by 1 and oscillating by at most
/// `2 sup |K|`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelWeight {
    pub point: Vec<f64>,
    pub bandwidth: f64,
    pub kernel: Kernel,
}

impl StatisticSpec for KernelWeight {
    fn tau(&self, _: u32, x: &[f64], _: &Characteristics<'_>) -> f64 {
        self.kernel.weight(x, &self.point, self.bandwidth)
    }
    fn bound(&self, _: u32, _: &Characteristics<'_>) -> f64 {
        1.0
    }
    fn oscillation(&self, _: u32, _: &Characteristics<'_>) -> f64 {
        2.0 * self.kernel.sup_norm(self.point.len())
    }
}

/// A closure with declared constant bounds.
pub struct FnStatistic<F> {
    pub tau: F,
    pub bound: f64,
    pub oscillation: f64,
}

impl<F> StatisticSpec for FnStatistic<F>
where
    F: Fn(u32, &[f64], &Characteristics<'_>) -> f64 + Sync,
{
    fn tau(&self, j: u32, x: &[f64], z: &Characteristics<'_>) -> f64 {
        (self.tau)(j, x, z)
    }
    fn bound(&self, _: u32, _: &Characteristics<'_>) -> f64 {
        self.bound
    }
    fn oscillation(&self, _: u32, _: &Characteristics<'_>) -> f64 {
        self.oscillation
    }
}

/// Declared-bound violations found by evaluating `τ_j` at every row of
/// `probes`: counts of `|τ_j| > b_j` and of `max τ_j − min τ_j > c_j`.
pub fn probe_bounds<S: StatisticSpec + ?Sized>(
    spec: &S,
    probes: &Characteristics<'_>,
    z: &Characteristics<'_>,
    colleges: &[u32],
) -> (usize, usize) {
    let (mut over, mut osc) = (0, 0);
    for &j in colleges {
        let b = spec.bound(j, z);
        let c = spec.oscillation(j, z);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..probes.len() {
            let v = spec.tau(j, probes.row(i), z);
            if v.abs() > b {
                over += 1;
            }
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if hi - lo > c {
            osc += 1;
        }
    }
    (over, osc)
}
