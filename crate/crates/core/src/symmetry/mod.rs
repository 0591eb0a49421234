//! Symmetry representations commuting with the Hamiltonian, probability
//! measures on the group, averaging maps `A_mu` and measure convolution.

mod average;
mod measure;
mod rep;

pub use average::{
    conjugate, convolve, haar_average, haar_average_operator, measure_average, measure_average_operator,
    orbit_ensemble, superoperator_matrix, superoperator_residual, verify_chain, CHAIN_TOL,
};
pub use measure::{Atom, Atoms, GroupMeasure, WEIGHT_SUM_TOL};
pub use rep::{circle_distance, reduce_angle, GroupElement, SymmetryRep, ANGLE_TOL, COMMUTATION_TOL, UNITARY_TOL};

use crate::error::Result;
use crate::qcore::CMatrix;

/// `U_g` for `g` in the group of `rep`.
pub fn unitary_at(rep: &SymmetryRep, g: &GroupElement) -> Result<CMatrix> {
    rep.unitary_at(g)
}
