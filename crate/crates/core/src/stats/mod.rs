//! Statistics of observed matchings: the generic `θ̂(τ)`, matching
//! frequencies, conditional CDFs, a Spearman-type sorting measure and a
//! kernel estimator of conditional matching probabilities.

mod estimators;
mod spearman;
mod spec;
mod window;

pub use estimators::{
    characteristic_matching_frequency, conditional_cdf, default_bandwidth, kernel_conditional_prob,
    matching_frequency, theta_hat, Kernel, ThetaHat,
};
pub use spearman::{spearman_rho_hat, spearman_rho_hat_pairwise, spearman_rho_hat_sorted, PAIRWISE_LIMIT};
pub use spec::{
    probe_bounds, CharacteristicIndicator, CollegeIndicator, FnStatistic, KernelWeight, Ones,
    StatisticSpec,
};
pub use window::{college_seed, ObservationWindow};

/// Row-major view of a characteristic matrix (`X` by student, `Z` by
/// college with row `j − 1` for college `j`).
#[derive(Clone, Copy, Debug)]
pub struct Characteristics<'a> {
    data: &'a [f64],
    dim: usize,
}

impl<'a> Characteristics<'a> {
    pub fn new(data: &'a [f64], dim: usize) -> Self {
        assert!(dim > 0 && data.len() % dim == 0, "data length is not a multiple of dim");
        Characteristics { data, dim }
    }

    #[inline]
    pub fn row(&self, idx: usize) -> &'a [f64] {
        &self.data[idx * self.dim..(idx + 1) * self.dim]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

impl crate::model::MarketRealization {
    pub fn x_chars(&self) -> Characteristics<'_> {
        Characteristics::new(&self.x, self.x_dim)
    }

    pub fn z_chars(&self) -> Characteristics<'_> {
        Characteristics::new(&self.z, self.z_dim)
    }
}
