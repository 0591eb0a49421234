//! Scripted numerical experiments producing tabular reports.

mod budget;
mod delay;
mod ncopy;
mod report;
mod superadd;

pub use budget::qubit_plus_budget;
pub use delay::{default_jitter_grid, delay_loss_scan, SCAN_TOL};
pub use ncopy::{
    binomial_entropy, ncopy_binomial, ncopy_sweep, NCopyConfig, DEFAULT_T_OVER_GAP, MAX_QUBITS, NCOPY_COLUMNS,
};
pub use report::{Check, ExperimentReport};
pub use superadd::{pair_slack, plus_pair_slack, superadditivity_sweep, PairSlack, MAX_LOCAL_DIM, SLACK_TOL};
