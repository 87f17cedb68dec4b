//! Many-to-one stable matching markets with large numbers of students:
//! market primitives, deferred acceptance, re-stabilization, a random
//! preference model, matching-based statistics and Monte Carlo audits.

pub mod algorithms;
pub mod error;
pub mod experiments;
pub mod fixtures;
pub mod io;
pub mod market;
pub mod model;
pub mod stats;

pub use error::{Error, Result};
