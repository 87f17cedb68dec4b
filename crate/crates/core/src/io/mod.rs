//! Config loading, experiment dispatch and serialization of reports,
//! realizations and run manifests.

mod config;
mod output;
mod run;

pub use config::{canonical_text, config_hash, load_config, parse_config};
pub use output::{unix_ms, write_csv, write_json, write_jsonl, write_report, OutputFile, RunManifest};
pub use run::{
    example_fixtures, run, Command, FixtureComparison, RunOutcome, ARTIFACT_VERSION, EXIT_CONFIG, EXIT_IO, EXIT_OK,
    EXIT_VIOLATION,
};
