use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lhmatch::experiments::{ExperimentConfig, OutputFormat};
use lhmatch::io::{load_config, run, Command, EXIT_CONFIG};
use lhmatch::model::ModelConfig;

#[derive(Parser)]
#[command(name = "lhmatch", version, about = "Simulate and audit large many-to-one stable matching markets")]
struct Cli {
    #[command(subcommand)]
    command: Sub,

    /// Experiment config (TOML).
    #[arg(long, global = true, env = "LHMATCH_CONFIG")]
    config: Option<PathBuf>,

    /// Overrides `model.seed`.
    #[arg(long, global = true, env = "LHMATCH_SEED")]
    seed: Option<u64>,

    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true, env = "LHMATCH_OUT")]
    out: Option<PathBuf>,

    /// Overrides `replications`.
    #[arg(long, global = true, env = "LHMATCH_REPLICATIONS")]
    replications: Option<usize>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "LHMATCH_THREADS")]
    threads: Option<usize>,

    /// Overrides `output.format`.
    #[arg(long, global = true, value_enum, env = "LHMATCH_FORMAT")]
    format: Option<Format>,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Draw one market, match it and dump the realization.
    Simulate,
    /// Bounded-difference audit under single-student perturbations.
    AuditBdc,
    /// Remove-one-student equilibration audit.
    AuditEquilibration,
    /// Empirical tails against the concentration bound.
    Concentration,
    /// Estimator consistency sweep.
    Estimators,
    /// Rank-difference scaling.
    Rankdiff,
    /// First-half versus last-half exchangeability audit.
    Exchangeability,
    /// Reproduce the worked examples and print the comparison table.
    ExampleFixtures,
}

#[derive(ValueEnum, Clone, Copy)]
enum Format {
    Csv,
    Jsonl,
    Both,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Simulate => Command::Simulate,
            Sub::AuditBdc => Command::AuditBdc,
            Sub::AuditEquilibration => Command::AuditEquilibration,
            Sub::Concentration => Command::Concentration,
            Sub::Estimators => Command::Estimators,
            Sub::Rankdiff => Command::Rankdiff,
            Sub::Exchangeability => Command::Exchangeability,
            Sub::ExampleFixtures => Command::ExampleFixtures,
        }
    }
}

fn fail(msg: impl std::fmt::Display, code: i32) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = Command::from(cli.command);

    let mut config = match (&cli.config, command) {
        (Some(path), _) => match load_config(path) {
            Ok(c) => c,
            Err(e) => return fail(&e, e.exit_code()),
        },
        (None, Command::ExampleFixtures) => ExperimentConfig::new(ModelConfig::new(5, 3)),
        (None, _) => return fail("--config is required for this subcommand", EXIT_CONFIG),
    };
    if let Some(seed) = cli.seed {
        config.model.seed = seed;
    }
    if let Some(r) = cli.replications {
        config.replications = r;
    }
    if let Some(f) = cli.format {
        config.output.format = match f {
            Format::Csv => OutputFormat::Csv,
            Format::Jsonl => OutputFormat::Jsonl,
            Format::Both => OutputFormat::Both,
        };
    }
    if let Some(dir) = &cli.out {
        config.output.dir = dir.to_string_lossy().into_owned();
    }
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            return fail(e, EXIT_CONFIG);
        }
    }

    let out = PathBuf::from(&config.output.dir);
    match run(command, &config, &out, config.output.format) {
        Ok(outcome) => {
            print!("{}", outcome.message);
            println!("manifest: {}", outcome.manifest_path.display());
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => fail(&e, e.exit_code()),
    }
}
