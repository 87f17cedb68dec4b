//! The random market model: priority indices `ω_ij = λ(S_i) + σ_n η_ij`,
//! student utilities over college characteristics, thresholds, and the
//! truthful report map.

pub mod binary;
mod config;
mod derive;
pub(crate) mod jsonfloat;
mod rankbound;
mod realization;

pub use config::{
    LambdaSpec, ModelConfig, NoiseDist, QuotaSpec, SigmaSpec, ThresholdSpec, UtilitySpec,
};
pub use derive::{
    derive_college_preferences, derive_student_preferences, preference_profile, scored_profile,
    truthful_report, CollegeReport, ReportProfile, ScoredColleges, ScoredProfile, TieDiagnostics,
};
pub use rankbound::{proposition1_constant, rank_difference_lower_bound, separated_middle_probability};
pub use realization::{
    resample_student_row, rng_for, sample_colleges, sample_market, sample_students, stream,
    CollegeDraw, MarketRealization,
};
