//! Scaling experiments: configuration retrieval under noise and scaling, and
//! the lower bound on usable scales for coefficient normalization.

mod bound;
mod report;
mod retrieval;

pub use bound::{
    beta_grid, beta_search, bound_experiment, failure_bound_xi, xi_from_basis, xi_value, BoundReport, BoundSettings,
    XiBound,
};
pub use report::{write_beta_csv, write_bound_csv, write_retrieval_csv, write_trial_log};
pub use retrieval::{
    coefficient_distance, configuration_retrieval, epsilon_grid, epsilon_linear_search, extent_of_vanishing,
    retrieval_experiment, search_grid, target_configuration, EpsilonSearch, RetrievalReport, RetrievalSettings,
    TargetConfiguration, TrialRecord,
};

/// Seed streams derived from `seed + trial`.
pub(crate) fn trial_seeds(seed: u64, trial: usize) -> TrialSeeds {
    let base = seed.wrapping_add(trial as u64);
    TrialSeeds {
        sample: base,
        noise: base ^ 0x9E37_79B9_7F4A_7C15,
        reference: base ^ 0xD1B5_4A32_D192_ED03,
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct TrialSeeds {
    pub sample: u64,
    pub noise: u64,
    pub reference: u64,
}
