//! Discrete-time equivalent of the passband chain.

mod mindex;
mod model;
mod pulse;

pub use mindex::{sigma_tilde, sign_vectors, MIndex};
pub use model::{
    branch_output, model_apply, model_from_ct, monomial_eval, parse_model_dump, recon_filter, BasebandModel, Branch,
    BranchRecord,
};
pub use pulse::{pulse_window, split_delays, DelaySplit, PulseKernel, PulseWindow};
