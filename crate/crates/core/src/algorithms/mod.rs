//! Deferred acceptance, re-stabilization, the related one-to-one market and
//! perturbation diffs.

mod da;
mod perturb;
mod related;
mod restab;

pub use da::{deferred_acceptance, deferred_acceptance_college_proposing};
pub use perturb::{k_or_one, perturbation_diff, PerturbationDiff};
pub use related::{to_related_one_to_one, RelatedMarket};
pub use restab::{
    embed_without_student, iteration_cap, restabilize, restabilize_step, restrict_without_student,
    RestabStep, RestabTrace,
};
