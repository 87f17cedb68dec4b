//! Acceptance suite: one pass/fail line per criterion. Runs without the
//! libtest harness so the lines always reach stdout.

use std::cell::OnceCell;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use lhmatch::algorithms::{deferred_acceptance, embed_without_student, restabilize};
use lhmatch::experiments::{
    bounded_difference_audit, concentration_profile, equilibration_audit, estimator_consistency_sweep,
    rank_difference_scaling, ConcentrationRow, ExperimentConfig,
};
use lhmatch::fixtures;
use lhmatch::io::parse_config;
use lhmatch::market::{
    enumerate_stable_matchings, CollegePrefs, EnumerationLimits, Matching, Profile, Quotas, StudentPrefs,
};
use lhmatch::model::{sample_market, scored_profile, ModelConfig};
use lhmatch::stats::{spearman_rho_hat, Characteristics, ObservationWindow};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn config(text: &str) -> ExperimentConfig {
    parse_config(text).expect("acceptance config parses")
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn golden_examples() -> Outcome {
    let start = Instant::now();
    let u = fixtures::example_profile();
    let v = fixtures::perturbed_example_profile();
    let tight = fixtures::tight_quotas();
    let slack = fixtures::slack_quotas();
    let a = deferred_acceptance(&u, &tight);
    let b = deferred_acceptance(&v, &tight);
    ensure(a.assignment() == [1, 2, 2, 3, 3], format!("SOSM {:?}", a.assignment()))?;
    ensure(b.assignment() == [2, 3, 3, 1, 2], format!("perturbed SOSM {:?}", b.assignment()))?;
    let c = deferred_acceptance(&u, &slack);
    let d = deferred_acceptance(&v, &slack);
    let changed: Vec<usize> = (0..5).filter(|&i| c.college_of(i) != d.college_of(i)).collect();
    ensure(changed == [0], format!("slack quotas change students {changed:?}"))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("exact matchings, slack change only i1, {:.2?}", start.elapsed()))
}

fn random_market(rng: &mut ChaCha8Rng) -> (Profile<CollegePrefs>, Quotas) {
    let n = rng.random_range(1..=7usize);
    let m = rng.random_range(1..=3usize);
    let students: Vec<Vec<u32>> = (0..n)
        .map(|_| {
            let mut o: Vec<u32> = (0..=m as u32).collect();
            o.shuffle(rng);
            o
        })
        .collect();
    let colleges: Vec<Vec<u32>> = (0..m)
        .map(|_| {
            let mut o: Vec<u32> = (0..=n as u32).collect();
            o.shuffle(rng);
            o
        })
        .collect();
    let quotas = Quotas::new((0..m).map(|_| rng.random_range(1..=2)).collect()).unwrap();
    let profile = Profile::new(
        StudentPrefs::from_orders(&students, m).unwrap(),
        CollegePrefs::from_orders(&colleges, n).unwrap(),
    )
    .unwrap();
    (profile, quotas)
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce);
    let markets = 2000;
    let mut violations = Vec::new();
    let limits = EnumerationLimits { max_students: 7, max_colleges: 3 };
    for t in 0..markets {
        let (u, q) = random_market(&mut rng);
        let mu = deferred_acceptance(&u, &q);
        let stable = enumerate_stable_matchings(&u, &q, limits).map_err(|e| e.to_string())?;
        if !stable.contains(&mu) {
            violations.push(format!("market {t}: DA not stable"));
        }
        let optimal = stable.iter().all(|other| {
            (0..u.num_students()).all(|i| {
                let (a, b) = (mu.college_of(i), other.college_of(i));
                a == b || u.students.prefers(i, a, b)
            })
        });
        if !optimal {
            violations.push(format!("market {t}: DA not student-optimal"));
        }
        if stable.iter().any(|s| s.fill_counts() != mu.fill_counts()) {
            violations.push(format!("market {t}: fill counts differ across stable matchings"));
        }
        for i in 0..u.num_students() {
            let reduced = deferred_acceptance(&u.remove_student(i), &q);
            match restabilize(&embed_without_student(&reduced, i), &u, &q) {
                Ok((r, _)) if r == mu => {}
                Ok(_) => violations.push(format!("market {t}, student {i}: restabilized != DA")),
                Err(e) => violations.push(format!("market {t}, student {i}: {e}")),
            }
        }
    }
    ensure(violations.is_empty(), format!("{} violations, first: {}", violations.len(), violations.join("; ")))?;
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!("{markets} markets, 0 violations, {:.2?}", start.elapsed()))
}

fn equilibration() -> Outcome {
    let cfg = config(
        "replications = 5000\nn_grid = [20, 100, 500]\nm_grid = [3, 10]\nsigma_grid = [0.0, 0.01, 0.1]\n\
         [model]\nn = 20\nm = 3\nseed = 9\n",
    );
    let report = equilibration_audit(&cfg).map_err(|e| e.to_string())?;
    ensure(report.records.len() >= 5000, format!("{} trials", report.records.len()))?;
    let mismatches = report.records.iter().filter(|r| !r.restabilized_equals_sosm).count();
    ensure(mismatches == 0, format!("{mismatches} trials where restabilization missed the SOSM"))?;
    ensure(report.total_violations() == 0, format!("violations {:?}", report.violations))?;
    let max_k = report.summary.iter().map(|s| s.max_k).max().unwrap_or(0);
    Ok(format!("{} trials, 100% exact, 0 bound violations, max k = {max_k}", report.records.len()))
}

fn bounded_difference() -> Outcome {
    let start = Instant::now();
    let cfg = config(
        "replications = 10000\nn_grid = [50, 200, 1000]\nm_grid = [3, 5]\nsigma_grid = [0.0, 0.01, 0.1]\n\
         [model]\nn = 50\nm = 3\nseed = 7\n",
    );
    let report = bounded_difference_audit(&cfg).map_err(|e| e.to_string())?;
    ensure(report.records.len() >= 10_000, format!("{} trials", report.records.len()))?;
    ensure(report.total_violations() == 0, format!("violations {:?}", report.violations))?;
    within(start.elapsed(), Duration::from_secs(600))?;
    Ok(format!("{} trials, 0 violations, {:.2?}", report.records.len(), start.elapsed()))
}

const CONCENTRATION: &str = "replications = 2000\ntarget_multiplier = 5\nn_grid = [500, 2000, 8000]\n\
    t_grid = [0.005, 0.01, 0.015, 0.02, 0.03, 0.04, 0.06]\n\
    [statistic]\nkind = \"matching_frequency\"\ncollege = 1\n\
    [model]\nn = 500\nm = 3\nseed = 11\nquotas = { rule = \"proportional\", seats_ratio = 1.0 }\n";

fn rms_by_n(rows: &[ConcentrationRow]) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = Vec::new();
    for r in rows {
        if out.last().map(|l| l.0) != Some(r.n) {
            out.push((r.n, r.rms_deviation));
        }
    }
    out
}

struct Concentration {
    default_rows: Vec<ConcentrationRow>,
    sigma0_rows: Vec<ConcentrationRow>,
    default_c: Option<f64>,
    sigma0_c: Option<f64>,
}

fn run_concentration() -> Result<Concentration, String> {
    let default = concentration_profile(&config(CONCENTRATION)).map_err(|e| e.to_string())?;
    let mut zero = config(CONCENTRATION);
    zero.model = zero.model.with_sigma(0.0);
    let zero = concentration_profile(&zero).map_err(|e| e.to_string())?;
    Ok(Concentration {
        default_c: default.scalars.get("fitted_c").copied(),
        sigma0_c: zero.scalars.get("fitted_c").copied(),
        default_rows: default.summary,
        sigma0_rows: zero.summary,
    })
}

fn lln(run: &Result<Concentration, String>) -> Outcome {
    let c = run.as_ref().map_err(Clone::clone)?;
    let default = rms_by_n(&c.default_rows);
    let zero = rms_by_n(&c.sigma0_rows);
    let fmt = |v: &[(usize, f64)]| v.iter().map(|(n, r)| format!("{n}:{r:.5}")).collect::<Vec<_>>().join(" ");
    ensure(
        default.len() == 3 && default.windows(2).all(|w| w[1].1 < w[0].1),
        format!("default schedule rms not strictly decreasing: {}", fmt(&default)),
    )?;
    let ratio = zero[2].1 / zero[0].1;
    ensure((0.2..=0.6).contains(&ratio), format!("sigma = 0 rms ratio {ratio:.3} outside [0.2, 0.6]"))?;
    Ok(format!("default rms {}; sigma = 0 ratio {ratio:.3}", fmt(&default)))
}

fn bound_shape(rows: &[ConcentrationRow], fitted: Option<f64>, label: &str) -> Result<String, String> {
    let c = fitted.ok_or_else(|| format!("{label}: no C fitted"))?;
    let n0 = rows.iter().map(|r| r.n).min().unwrap();
    for r in rows.iter().filter(|r| r.n > n0) {
        let bound = r.fitted_bound.ok_or_else(|| format!("{label}: missing bound at n = {}", r.n))?;
        ensure(
            r.empirical_tail <= bound,
            format!("{label}: tail {} above bound {bound:.4} at n = {}, t = {}", r.empirical_tail, r.n, r.t),
        )?;
    }
    for n in rows.iter().map(|r| r.n) {
        let tails: Vec<f64> = rows.iter().filter(|r| r.n == n).map(|r| r.empirical_tail).collect();
        ensure(tails.windows(2).all(|w| w[1] <= w[0]), format!("{label}: tails not monotone in t at n = {n}"))?;
    }
    Ok(format!("{label} C = {c:.1}"))
}

fn theorem_shape(run: &Result<Concentration, String>) -> Outcome {
    let c = run.as_ref().map_err(Clone::clone)?;
    let a = bound_shape(&c.default_rows, c.default_c, "default")?;
    let b = bound_shape(&c.sigma0_rows, c.sigma0_c, "sigma = 0")?;
    Ok(format!("{a}, {b}; bound covers n = 2000, 8000 at every t"))
}

fn rank_difference() -> Outcome {
    let cfg = config(
        "replications = 200\nn_grid = [100, 400, 1600]\nm_grid = [1, 3]\nsigma_grid = [0.0, 0.05, 0.2, 1.0]\n\
         [model]\nn = 100\nm = 3\nseed = 23\n",
    );
    let report = rank_difference_scaling(&cfg).map_err(|e| e.to_string())?;
    let mut nontrivial = 0;
    for row in &report.summary {
        if row.sigma_n == 0.0 || row.m == 1 {
            ensure(row.max_h == 0, format!("h = {} at n = {}, m = {}, sigma = {}", row.max_h, row.n, row.m, row.sigma_n))?;
        }
        if row.nontrivial {
            nontrivial += 1;
            let bound = row.lower_bound.ok_or("nontrivial row without bound")?;
            ensure(
                row.mean_h >= bound - 3.0 * row.se_h,
                format!("mean h {} below {bound} - 3 SE at n = {}, sigma = {}", row.mean_h, row.n, row.sigma_n),
            )?;
        }
    }
    ensure(nontrivial > 0, "no nontrivial grid points")?;
    let c = report.summary.iter().find_map(|r| r.c).unwrap_or(0.0);
    Ok(format!("{nontrivial} nontrivial cells hold (c = {c:.3e}), h = 0 for sigma = 0 or m = 1"))
}

fn aligned_fixture() -> ExperimentConfig {
    let mut cfg = config(
        "replications = 100\nn_grid = [250, 1000, 4000]\n\
         [model]\nn = 250\nm = 2\nseed = 31\noutside_utility = -inf\n\
         sigma = { kind = \"fixed\", value = 0.0 }\n\
         quotas = { rule = \"proportional\", seats_ratio = 1.0 }\n\
         utility = { kind = \"dot\", beta = 50.0, xi_weight = 0.0 }\n\
         eps = { kind = \"normal\", sd = 0.01 }\n",
    );
    cfg.estimators.rho_oracle_scale = 10;
    cfg
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".into(), |x| format!("{x:.4}"))
}

fn estimators() -> Outcome {
    let cfg = config("replications = 500\nn_grid = [250, 1000, 4000]\n[model]\nn = 250\nm = 2\nseed = 21\n");
    let report = estimator_consistency_sweep(&cfg).map_err(|e| e.to_string())?;
    for name in ["cdf_error_decreasing", "rho_error_decreasing", "kernel_error_decreasing"] {
        let rows: Vec<String> = report
            .summary
            .iter()
            .map(|r| format!("{}/{}/{}", opt(r.median_cdf_error), opt(r.median_rho_error), opt(r.median_kernel_error)))
            .collect();
        ensure(report.check(name) == Some(true), format!("{name} failed: {}", rows.join(" ")))?;
    }

    let aligned = estimator_consistency_sweep(&aligned_fixture()).map_err(|e| e.to_string())?;
    let rho_star = aligned.scalars["rho_oracle"];
    let errors: Option<Vec<f64>> = aligned.records.iter().map(|r| r.rho_hat.map(|v| (v - rho_star).abs())).collect();
    let worst = errors.ok_or("aligned fixture: a replication had no rho_hat")?.into_iter().fold(0.0, f64::max);
    ensure(worst <= 0.05, format!("aligned fixture: |rho_hat - oracle| reaches {worst:.4}"))?;

    let real = sample_market(&ModelConfig::new(3000, 4).with_seed(5)).map_err(|e| e.to_string())?;
    let mu: Matching = deferred_acceptance(&scored_profile(&real), &real.quotas);
    let window = ObservationWindow::full(real.n, real.m);
    let exp_x: Vec<f64> = real.x.iter().map(|v| v.exp()).collect();
    let base = spearman_rho_hat(&mu, &real.x_chars(), &real.z_chars(), &window, 0, 0).map_err(|e| e.to_string())?;
    let mapped = spearman_rho_hat(&mu, &Characteristics::new(&exp_x, 1), &real.z_chars(), &window, 0, 0)
        .map_err(|e| e.to_string())?;
    ensure(base.to_bits() == mapped.to_bits(), format!("rho_hat {base} vs {mapped} under exp(X)"))?;

    let medians: Vec<String> = report
        .summary
        .iter()
        .map(|r| {
            format!(
                "n={} cdf {} rho {} kernel {}",
                r.n,
                opt(r.median_cdf_error),
                opt(r.median_rho_error),
                opt(r.median_kernel_error)
            )
        })
        .collect();
    Ok(format!(
        "{}; aligned rho oracle {rho_star:.3}, worst error {worst:.4}; exp(X) invariant",
        medians.join(", ")
    ))
}

fn determinism_and_speed() -> Outcome {
    let cfg = config(
        "replications = 300\nn_grid = [50, 200]\nm_grid = [3]\nsigma_grid = [0.0, 0.1]\n[model]\nn = 50\nm = 3\nseed = 77\n",
    );
    let a = serde_json::to_vec(&bounded_difference_audit(&cfg).map_err(|e| e.to_string())?).unwrap();
    let b = serde_json::to_vec(&bounded_difference_audit(&cfg).map_err(|e| e.to_string())?).unwrap();
    ensure(a == b, "bounded-difference reports differ between identical runs")?;
    let conc = config(
        "replications = 50\ntarget_multiplier = 2\nn_grid = [200, 400]\n[model]\nn = 200\nm = 3\nseed = 78\n",
    );
    let a = serde_json::to_vec(&concentration_profile(&conc).map_err(|e| e.to_string())?).unwrap();
    let b = serde_json::to_vec(&concentration_profile(&conc).map_err(|e| e.to_string())?).unwrap();
    ensure(a == b, "concentration reports differ between identical runs")?;

    let real = sample_market(&ModelConfig::new(100_000, 50).with_seed(3)).map_err(|e| e.to_string())?;
    let profile = scored_profile(&real);
    let start = Instant::now();
    let mu = deferred_acceptance(&profile, &real.quotas);
    let elapsed = start.elapsed();
    ensure(mu.num_students() == 100_000, "wrong matching size")?;
    within(elapsed, Duration::from_secs(5))?;
    Ok(format!("reports byte-identical; DA at n = 1e5, m = 50 in {elapsed:.2?}"))
}

fn main() -> ExitCode {
    let mut results: Vec<(u32, &str, Outcome, Duration)> = Vec::new();
    let mut timed = |id: u32, name: &'static str, f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let out = f();
        results.push((id, name, out, start.elapsed()));
        let (id, name, out, took) = results.last().unwrap();
        let (tag, detail) = match out {
            Ok(s) => ("PASS", s),
            Err(s) => ("FAIL", s),
        };
        println!("criterion {id} [{tag}] {name}: {detail} ({took:.1?})");
    };

    timed(1, "golden examples", &golden_examples);
    timed(2, "oracle equivalence", &oracle_equivalence);
    timed(3, "equilibration", &equilibration);
    timed(4, "bounded difference", &bounded_difference);
    let conc = OnceCell::new();
    timed(5, "law of large numbers", &|| lln(conc.get_or_init(run_concentration)));
    timed(6, "concentration bound shape", &|| theorem_shape(conc.get_or_init(run_concentration)));
    timed(7, "rank difference lower bound", &rank_difference);
    timed(8, "estimator consistency", &estimators);
    timed(9, "determinism and performance", &determinism_and_speed);

    let failed = results.iter().filter(|r| r.2.is_err()).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
