use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("college {college} holds {assigned} students but has quota {quota}")]
    OverQuota {
        college: u32,
        assigned: usize,
        quota: u32,
    },

    #[error("student {student} is assigned to unknown college {college} (m = {num_colleges})")]
    UnknownCollege {
        student: usize,
        college: u32,
        num_colleges: usize,
    },

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("invalid preferences: {0}")]
    InvalidPreferences(String),

    #[error("invalid quotas: {0}")]
    InvalidQuotas(String),

    #[error("brute-force enumeration refused: n = {n}, m = {m} exceeds cap (n <= {max_n}, m <= {max_m})")]
    EnumerationCap {
        n: usize,
        m: usize,
        max_n: usize,
        max_m: usize,
    },

    #[error("matching is not 1-envy-free")]
    NotOneEnvyFree,

    #[error("re-stabilization did not reach a fixed point within {cap} iterations")]
    IterationCap { cap: usize },

    #[error("invalid model configuration: {0}")]
    InvalidModel(String),

    #[error("invalid statistic input: {0}")]
    InvalidStatistic(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
