//! Splitting quantum free energy into parts that covariant channels cannot
//! convert into one another.
//!
//! * [`qcore`]: states, Gibbs states, entropies and the free energy `F`.
//! * [`symmetry`]: unitary representations commuting with `H`, measures on the
//!   group and the averaging maps `A_mu`.
//! * [`channels`]: CPTP maps, covariance and passivity checks, twirling and
//!   instruments.
//! * [`splitting`]: asymmetry, the two-term and measure-chain splittings,
//!   Holevo information, loss bounds and monotonicity audits.
//! * [`experiments`]: scripted scenarios (qubit budget, n-copy asymptotics,
//!   superadditivity, delay-loss scans).

#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::approx_constant))]

pub mod channels;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod io;
pub mod qcore;
pub mod splitting;
pub mod symmetry;

pub use error::{Error, ErrorKind, Result};
