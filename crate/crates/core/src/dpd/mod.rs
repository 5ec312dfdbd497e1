//! Compensator structures, least-squares fitting and pruning.

mod basis;
mod compensator;
mod lstsq;
mod prune;
mod structure;

pub use basis::{basis_size, binomial, enumerate_basis, ExponentPattern};
pub use compensator::{
    closed_loop_evm, ideal_compensator, Compensator, FittedCompensator, IdealCompensator, NoCompensation,
};
pub use lstsq::{fit_least_squares, mat_vec, LeastSquares};
pub use prune::{prune_significant, PruneReport, PRUNE_TOLERANCE};
pub use structure::{block_filter, evaluate_pattern, regressor_matrix, CompensatorStructure};
