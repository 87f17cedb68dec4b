//! Python bindings: explicit markets, sampled realizations, the
//! concentration bound, the sorting measure and experiment runs.

use std::path::Path;

use lhmatch_core::algorithms::{deferred_acceptance, deferred_acceptance_college_proposing, restabilize};
use lhmatch_core::experiments::{theorem_bound as core_bound, BoundInputs};
use lhmatch_core::io::{example_fixtures as core_fixtures, parse_config, run, Command};
use lhmatch_core::market::{
    classify_matching, enumerate_stable_matchings, max_rank_difference, EnumerationLimits, Matching,
    PreferenceProfile, Quotas,
};
use lhmatch_core::model::{derive_college_preferences, sample_market, scored_profile, MarketRealization, ModelConfig, QuotaSpec};
use lhmatch_core::stats::{spearman_rho_hat as core_rho, Characteristics, ObservationWindow};
use lhmatch_core::{fixtures, Error};
use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(_) => PyIOError::new_err(e.to_string()),
        Error::NotOneEnvyFree | Error::IterationCap { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// An explicit market: preference lists plus quotas.
#[pyclass(name = "Market", module = "lhmatch", skip_from_py_object)]
#[derive(Clone)]
struct PyMarket {
    profile: PreferenceProfile,
    quotas: Quotas,
}

impl PyMarket {
    fn matching(&self, assignment: Vec<u32>) -> PyResult<Matching> {
        Matching::new(assignment, self.quotas.num_colleges()).map_err(to_py)
    }
}

#[pymethods]
impl PyMarket {
    /// `student_lists[i]`: acceptable colleges (1-based), best first.
    /// `college_lists[j-1]`: acceptable students (0-based), best first.
    #[new]
    fn new(student_lists: Vec<Vec<u32>>, college_lists: Vec<Vec<usize>>, quotas: Vec<u32>) -> PyResult<Self> {
        let profile = PreferenceProfile::from_lists(&student_lists, &college_lists).map_err(to_py)?;
        let quotas = Quotas::new(quotas).map_err(to_py)?;
        if quotas.num_colleges() != profile.num_colleges() {
            return Err(PyValueError::new_err("one quota per college required"));
        }
        Ok(PyMarket { profile, quotas })
    }

    /// The five-student example market with quotas `(1, 2, 2)`, or its
    /// perturbed version.
    #[staticmethod]
    #[pyo3(signature = (perturbed = false))]
    fn example(perturbed: bool) -> Self {
        let profile = if perturbed { fixtures::perturbed_example_profile() } else { fixtures::example_profile() };
        PyMarket { profile, quotas: fixtures::tight_quotas() }
    }

    #[getter]
    fn n(&self) -> usize {
        self.profile.num_students()
    }

    #[getter]
    fn m(&self) -> usize {
        self.profile.num_colleges()
    }

    fn with_quotas(&self, quotas: Vec<u32>) -> PyResult<Self> {
        Self::new_from(self.profile.clone(), quotas)
    }

    /// Student-optimal stable matching, `0` meaning unmatched.
    fn deferred_acceptance(&self) -> Vec<u32> {
        deferred_acceptance(&self.profile, &self.quotas).into_assignment()
    }

    fn college_optimal(&self) -> Vec<u32> {
        deferred_acceptance_college_proposing(&self.profile, &self.quotas).into_assignment()
    }

    /// One of `Unstable`, `IndividuallyRational`, `EnvyFree`,
    /// `OneEnvyFree`, `Stable`.
    fn classify(&self, assignment: Vec<u32>) -> PyResult<String> {
        let mu = self.matching(assignment)?;
        Ok(format!("{:?}", classify_matching(&mu, &self.profile, &self.quotas)))
    }

    fn restabilize(&self, assignment: Vec<u32>) -> PyResult<Vec<u32>> {
        let mu = self.matching(assignment)?;
        let (out, _) = restabilize(&mu, &self.profile, &self.quotas).map_err(to_py)?;
        Ok(out.into_assignment())
    }

    fn rank_difference(&self) -> u32 {
        max_rank_difference(&self.profile.colleges).h
    }

    /// Every stable matching by exhaustive search (small markets only).
    fn stable_matchings(&self) -> PyResult<Vec<Vec<u32>>> {
        let all = enumerate_stable_matchings(&self.profile, &self.quotas, EnumerationLimits::default()).map_err(to_py)?;
        Ok(all.into_iter().map(Matching::into_assignment).collect())
    }

    fn remove_student(&self, i: usize) -> PyResult<Self> {
        if i >= self.profile.num_students() {
            return Err(PyValueError::new_err(format!("student {i} out of range")));
        }
        Ok(PyMarket { profile: self.profile.remove_student(i), quotas: self.quotas.clone() })
    }
}

impl PyMarket {
    fn new_from(profile: PreferenceProfile, quotas: Vec<u32>) -> PyResult<Self> {
        let quotas = Quotas::new(quotas).map_err(to_py)?;
        if quotas.num_colleges() != profile.num_colleges() {
            return Err(PyValueError::new_err("one quota per college required"));
        }
        Ok(PyMarket { profile, quotas })
    }
}

/// A sampled market realization.
#[pyclass(name = "Realization", module = "lhmatch")]
struct PyRealization {
    inner: MarketRealization,
}

#[pymethods]
impl PyRealization {
    /// Draws a market with default model settings; `sigma` fixes `σ_n`
    /// instead of the default schedule.
    #[staticmethod]
    #[pyo3(signature = (n, m, seed = 0, sigma = None, seats_ratio = None))]
    fn sample(n: usize, m: usize, seed: u64, sigma: Option<f64>, seats_ratio: Option<f64>) -> PyResult<Self> {
        let mut cfg = ModelConfig::new(n, m).with_seed(seed);
        if let Some(s) = sigma {
            cfg = cfg.with_sigma(s);
        }
        if let Some(r) = seats_ratio {
            cfg.quotas = QuotaSpec::Proportional { seats_ratio: r };
        }
        Ok(PyRealization { inner: sample_market(&cfg).map_err(to_py)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.sigma
    }

    #[getter]
    fn x(&self) -> Vec<f64> {
        self.inner.x.clone()
    }

    #[getter]
    fn z(&self) -> Vec<f64> {
        self.inner.z.clone()
    }

    /// Row-major `n × m` priority indices.
    #[getter]
    fn omega(&self) -> Vec<f64> {
        self.inner.omega.clone()
    }

    #[getter]
    fn quotas(&self) -> Vec<u32> {
        self.inner.quotas.as_slice().to_vec()
    }

    /// Student-optimal stable matching under truthful reports.
    fn match_students(&self) -> Vec<u32> {
        let profile = scored_profile(&self.inner);
        deferred_acceptance(&profile, &self.inner.quotas).into_assignment()
    }

    fn rank_difference(&self) -> u32 {
        max_rank_difference(&derive_college_preferences(&self.inner).0).h
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyValueError::new_err(e.to_string()))
    }
}

/// `4 exp(−C n_Z (t² ∧ t^(3/2)) / (c̄² + b̄² (a + b t)))`.
#[pyfunction]
fn theorem_bound(n_z: usize, m: usize, sigma_n: f64, b_bar: f64, c_bar: f64, c: f64, t: f64) -> PyResult<f64> {
    let inputs = BoundInputs { n_z, m, m_z: m, sigma_n, b_bar, c_bar, c };
    core_bound(&inputs, t).map_err(to_py)
}

/// Sorting measure between scalar student characteristics `x` and scalar
/// college characteristics `z`, over all students.
#[pyfunction]
fn spearman_rho_hat(assignment: Vec<u32>, x: Vec<f64>, z: Vec<f64>) -> PyResult<f64> {
    if assignment.len() != x.len() {
        return Err(PyValueError::new_err("assignment and x differ in length"));
    }
    let mu = Matching::new(assignment, z.len()).map_err(to_py)?;
    let window = ObservationWindow::full(x.len(), z.len());
    core_rho(&mu, &Characteristics::new(&x, 1), &Characteristics::new(&z, 1), &window, 0, 0).map_err(to_py)
}

/// Runs a CLI subcommand from TOML text; returns the manifest as JSON.
#[pyfunction]
fn run_experiment(command: &str, config_toml: &str, out_dir: &str) -> PyResult<String> {
    let cmd = match command {
        "simulate" => Command::Simulate,
        "audit-bdc" => Command::AuditBdc,
        "audit-equilibration" => Command::AuditEquilibration,
        "concentration" => Command::Concentration,
        "estimators" => Command::Estimators,
        "rankdiff" => Command::Rankdiff,
        "exchangeability" => Command::Exchangeability,
        "example-fixtures" => Command::ExampleFixtures,
        other => return Err(PyValueError::new_err(format!("unknown command {other:?}"))),
    };
    let config = parse_config(config_toml).map_err(to_py)?;
    let outcome = run(cmd, &config, Path::new(out_dir), config.output.format).map_err(to_py)?;
    serde_json::to_string(&outcome.manifest).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// The worked-example comparison as JSON.
#[pyfunction]
fn example_fixtures() -> PyResult<String> {
    serde_json::to_string(&core_fixtures()).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule(name = "lhmatch")]
fn lhmatch_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMarket>()?;
    m.add_class::<PyRealization>()?;
    m.add_function(wrap_pyfunction!(theorem_bound, m)?)?;
    m.add_function(wrap_pyfunction!(spearman_rho_hat, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(example_fixtures, m)?)?;
    Ok(())
}
