//! Free-energy decompositions under a symmetry: the asymmetry/covariant split,
//! chain splits with Holevo cross-checks, and audits of passive covariant
//! channels against them.

mod asymmetry;
mod audit;
mod chain;

pub use asymmetry::{asymmetry, holevo_ceiling, holevo_information, overlap, split_two, TwoTermSplit};
pub use audit::{
    certify_channel, loss_bound_audit, monotonicity_audit, shift_mixture_defect, LossBoundReport, MonotonicityReport,
    Residuals, ShiftMixtureReport, Tolerances, MONOTONICITY_TOL, ORTHOGONALITY_TOL,
};
pub use chain::{chain_states, split_chain, FreeEnergySplit, MeasureChain};
