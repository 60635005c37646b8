//! Likelihood-based estimation of BWeibull parameters.

pub mod fisher;
pub mod fit;
pub mod harmony;
pub mod likelihood;

pub use crate::dataset::Dataset;
pub use fisher::{fisher_information, q_fisher_information, standard_errors, FisherMethod, StandardErrors};
pub use fit::{fit, fit_with, select_q, FitResult, QCandidate, QSelection, DEFAULT_Q_GRID};
pub use harmony::{harmony_search, HarmonyConfig, HarmonyOutcome};
pub use likelihood::{
    evaluate, hessian, log_likelihood, log_likelihood_with, log_q, logq_likelihood, score, Evaluation,
};

/// Independent seed for task `counter` derived from `seed` (SplitMix64).
pub fn derive_seed(seed: u64, counter: u64) -> u64 {
    let mut z = seed.wrapping_add(counter.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
