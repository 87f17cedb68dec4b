use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use super::config::{ModelConfig, NoiseDist, UtilitySpec};
use super::jsonfloat;
use crate::error::Result;
use crate::market::Quotas;

/// RNG stream identifiers; every purpose draws from its own ChaCha stream.
pub mod stream {
    pub const COLLEGES: u64 = 0;
    pub const STUDENTS: u64 = 1;
    pub const PERTURB: u64 = 2;
    pub const WINDOW: u64 = 3;
}

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// College-side draw `Z̃ = (Z, ξ)` together with the thresholds it implies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollegeDraw {
    pub m: usize,
    pub z_dim: usize,
    /// `m × z_dim`, row-major.
    pub z: Vec<f64>,
    pub xi: Vec<f64>,
    #[serde(with = "jsonfloat::vec")]
    pub c: Vec<f64>,
}

impl CollegeDraw {
    pub fn z_row(&self, j: u32) -> &[f64] {
        let jdx = j as usize - 1;
        &self.z[jdx * self.z_dim..(jdx + 1) * self.z_dim]
    }
}

/// One draw of student qualities and college characteristics.
///
/// Matrices are row-major: `n × x_dim` for `x`, `n × m` for `eps`, `eta` and
/// `omega`, `m × z_dim` for `z`. Column `j - 1` belongs to college `j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarketRealization {
    pub n: usize,
    pub m: usize,
    pub x_dim: usize,
    pub z_dim: usize,
    pub sigma: f64,
    pub x: Vec<f64>,
    pub eps: Vec<f64>,
    pub eta: Vec<f64>,
    pub z: Vec<f64>,
    pub xi: Vec<f64>,
    pub lambda: Vec<f64>,
    pub omega: Vec<f64>,
    #[serde(with = "jsonfloat::vec")]
    pub c: Vec<f64>,
    pub quotas: Quotas,
    pub utility: UtilitySpec,
    #[serde(with = "jsonfloat::scalar")]
    pub outside_utility: f64,
}

impl MarketRealization {
    pub fn x_row(&self, i: usize) -> &[f64] {
        &self.x[i * self.x_dim..(i + 1) * self.x_dim]
    }

    pub fn z_row(&self, j: u32) -> &[f64] {
        let jdx = j as usize - 1;
        &self.z[jdx * self.z_dim..(jdx + 1) * self.z_dim]
    }

    #[inline]
    pub fn omega_at(&self, i: usize, j: u32) -> f64 {
        self.omega[i * self.m + j as usize - 1]
    }

    pub fn college_draw(&self) -> CollegeDraw {
        CollegeDraw {
            m: self.m,
            z_dim: self.z_dim,
            z: self.z.clone(),
            xi: self.xi.clone(),
            c: self.c.clone(),
        }
    }

    /// Student utilities, `m + 1` per student with the outside option first.
    pub fn utilities(&self) -> Vec<f64> {
        let w = self.m + 1;
        let mut u = vec![0.0; self.n * w];
        for i in 0..self.n {
            let x = self.x_row(i);
            u[i * w] = self.outside_utility;
            for j in 1..=self.m as u32 {
                let jdx = j as usize - 1;
                u[i * w + j as usize] = self.utility.systematic(x, self.z_row(j), self.xi[jdx])
                    + self.eps[i * self.m + jdx];
            }
        }
        u
    }

    /// Largest `|ω_ij − (λ_i + σ η_ij)|` over the stored parts.
    pub fn omega_reconstruction_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for jdx in 0..self.m {
                let k = i * self.m + jdx;
                worst = worst.max((self.omega[k] - (self.lambda[i] + self.sigma * self.eta[k])).abs());
            }
        }
        worst
    }

    /// Realization with student rows reordered: row `i` of the result is row
    /// `perm[i]` of `self`.
    pub fn permute_students(&self, perm: &[usize]) -> MarketRealization {
        assert_eq!(perm.len(), self.n);
        let gather = |data: &[f64], width: usize| -> Vec<f64> {
            perm.iter().flat_map(|&p| data[p * width..(p + 1) * width].iter().copied()).collect()
        };
        MarketRealization {
            x: gather(&self.x, self.x_dim),
            eps: gather(&self.eps, self.m),
            eta: gather(&self.eta, self.m),
            lambda: gather(&self.lambda, 1),
            omega: gather(&self.omega, self.m),
            ..self.clone()
        }
    }
}

fn draw_noise<R: Rng>(dist: &NoiseDist, rng: &mut R) -> f64 {
    match *dist {
        NoiseDist::Normal { sd } => Normal::new(0.0, sd).expect("validated sd").sample(rng),
        NoiseDist::Uniform { half_width } => Uniform::new_inclusive(-half_width, half_width)
            .expect("validated width")
            .sample(rng),
    }
}

/// Draws `Z̃` from `seed`'s college stream.
pub fn sample_colleges(config: &ModelConfig, seed: u64) -> Result<CollegeDraw> {
    config.validate()?;
    let mut rng = rng_for(seed, stream::COLLEGES);
    let z: Vec<f64> = (0..config.m * config.z_dim).map(|_| StandardNormal.sample(&mut rng)).collect();
    let xi: Vec<f64> = (0..config.m).map(|_| StandardNormal.sample(&mut rng)).collect();
    let c = (0..config.m)
        .map(|jdx| config.thresholds.eval(&config.lambda, &z[jdx * config.z_dim..(jdx + 1) * config.z_dim]))
        .collect();
    Ok(CollegeDraw { m: config.m, z_dim: config.z_dim, z, xi, c })
}

struct StudentRow {
    x: Vec<f64>,
    eps: Vec<f64>,
    eta: Vec<f64>,
    lambda: f64,
}

fn draw_student_row<R: Rng>(config: &ModelConfig, rng: &mut R) -> StudentRow {
    let x: Vec<f64> = (0..config.x_dim).map(|_| rng.random::<f64>()).collect();
    let eps = (0..config.m).map(|_| draw_noise(&config.eps, rng)).collect();
    let eta = (0..config.m).map(|_| draw_noise(&config.eta, rng)).collect();
    let lambda = config.lambda.eval(&x);
    StudentRow { x, eps, eta, lambda }
}

/// Draws `n` i.i.d. student rows given a frozen college draw, using the
/// student stream of `student_seed`.
pub fn sample_students(config: &ModelConfig, colleges: &CollegeDraw, student_seed: u64) -> Result<MarketRealization> {
    config.validate()?;
    assert_eq!(colleges.m, config.m, "college draw has wrong m");
    assert_eq!(colleges.z_dim, config.z_dim, "college draw has wrong z_dim");
    let (n, m) = (config.n, config.m);
    let sigma = config.sigma_n();
    let mut rng = rng_for(student_seed, stream::STUDENTS);
    let mut real = MarketRealization {
        n,
        m,
        x_dim: config.x_dim,
        z_dim: config.z_dim,
        sigma,
        x: Vec::with_capacity(n * config.x_dim),
        eps: Vec::with_capacity(n * m),
        eta: Vec::with_capacity(n * m),
        z: colleges.z.clone(),
        xi: colleges.xi.clone(),
        lambda: Vec::with_capacity(n),
        omega: Vec::with_capacity(n * m),
        c: colleges.c.clone(),
        quotas: config.resolve_quotas()?,
        utility: config.utility.clone(),
        outside_utility: config.outside_utility,
    };
    for _ in 0..n {
        let row = draw_student_row(config, &mut rng);
        real.omega.extend(row.eta.iter().map(|e| row.lambda + sigma * e));
        real.x.extend(row.x);
        real.eps.extend(row.eps);
        real.eta.extend(row.eta);
        real.lambda.push(row.lambda);
    }
    Ok(real)
}

/// Draws a full market from `config.seed`: colleges first, then students.
pub fn sample_market(config: &ModelConfig) -> Result<MarketRealization> {
    let colleges = sample_colleges(config, config.seed)?;
    sample_students(config, &colleges, config.seed)
}

/// Replaces student `i`'s whole quality row `(X_i, ε_i·, η_i·)` with a fresh
/// draw and recomputes `λ_i` and `ω_i·`.
pub fn resample_student_row<R: Rng>(
    real: &MarketRealization,
    config: &ModelConfig,
    i: usize,
    rng: &mut R,
) -> MarketRealization {
    assert!(i < real.n);
    let row = draw_student_row(config, rng);
    let mut out = real.clone();
    let m = real.m;
    out.x[i * real.x_dim..(i + 1) * real.x_dim].copy_from_slice(&row.x);
    out.eps[i * m..(i + 1) * m].copy_from_slice(&row.eps);
    out.eta[i * m..(i + 1) * m].copy_from_slice(&row.eta);
    out.lambda[i] = row.lambda;
    for jdx in 0..m {
        out.omega[i * m + jdx] = row.lambda + real.sigma * row.eta[jdx];
    }
    out
}
