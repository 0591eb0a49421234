//! Finite-dimensional states, Hamiltonians, entropies and the free-energy functional.
//!
//! Units: `k_B = 1`, temperatures carry energy units and entropies are in nats.

pub mod linalg;
mod state;
mod system;

pub use linalg::{c64, CMatrix};
pub use state::{
    complex_ginibre, entropy_term, matrix_entropy, random_hermitian, random_state, random_state_seeded, random_unitary,
    rel_entropy, shannon_entropy, tensor_state, vn_entropy, DensityMatrix, RelativeEntropy, EIG_CUTOFF, STATE_TOL,
};
pub use system::{free_energy, gibbs_state, HamiltonianSystem, HAMILTONIAN_TOL};
