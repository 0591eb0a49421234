use crate::error::{Error, Result};
use crate::qcore::linalg::{self, CMatrix};
use crate::qcore::{free_energy, shannon_entropy, vn_entropy, DensityMatrix, HamiltonianSystem};
use crate::symmetry::{haar_average, SymmetryRep};

/// Tolerance on the probabilities of an ensemble.
const PROB_TOL: f64 = 1e-12;

fn check_rep(rho: &DensityMatrix, rep: &SymmetryRep) -> Result<()> {
    if rho.dim() != rep.dim() {
        return Err(Error::DimensionMismatch {
            expected: rep.dim(),
            found: rho.dim(),
        });
    }
    Ok(())
}

/// `R(rho) = S(rho_bar) - S(rho)` in nats.
pub fn asymmetry(rho: &DensityMatrix, rep: &SymmetryRep) -> Result<f64> {
    check_rep(rho, rep)?;
    Ok(vn_entropy(&haar_average(rep, rho)?)? - vn_entropy(rho)?)
}

/// The two parts of `F(rho) = T R(rho) + F(rho_bar)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TwoTermSplit {
    pub asym_energy: f64,
    pub covariant_f: f64,
    pub total: f64,
}

/// Splits the free energy into the asymmetry part `T R(rho)` and the
/// covariant part `F(rho_bar)`; `total` is `F(rho)` evaluated directly.
pub fn split_two(rho: &DensityMatrix, sys: &HamiltonianSystem, rep: &SymmetryRep) -> Result<TwoTermSplit> {
    check_rep(rho, rep)?;
    sys.check_dim(rho.dim())?;
    rep.check_commutes(sys.hamiltonian())?;
    let avg = haar_average(rep, rho)?;
    Ok(TwoTermSplit {
        asym_energy: sys.temperature() * (vn_entropy(&avg)? - vn_entropy(rho)?),
        covariant_f: free_energy(&avg, sys)?,
        total: free_energy(rho, sys)?,
    })
}

/// `S(sum_i p_i rho_i) - sum_i p_i S(rho_i)`.
pub fn holevo_information(states: &[DensityMatrix], probs: &[f64]) -> Result<f64> {
    if states.is_empty() || states.len() != probs.len() {
        return Err(Error::invalid(
            "ensemble",
            format!("{} states with {} probabilities", states.len(), probs.len()),
        ));
    }
    if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
        return Err(Error::invalid("ensemble", "probabilities must be non-negative"));
    }
    let total: f64 = probs.iter().sum();
    if !((total - 1.0).abs() <= PROB_TOL) {
        return Err(Error::invalid("ensemble", format!("probabilities sum to {total}")));
    }
    let d = states[0].dim();
    let mut avg = CMatrix::zeros(d, d);
    let mut inner = 0.0;
    for (rho, &p) in states.iter().zip(probs) {
        if rho.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: rho.dim(),
            });
        }
        avg += rho.matrix().scale(p);
        inner += p * vn_entropy(rho)?;
    }
    Ok(vn_entropy(&DensityMatrix::from_output(avg)?)? - inner)
}

/// Upper bound `H(p)` on the Holevo information of an ensemble.
pub fn holevo_ceiling(probs: &[f64]) -> f64 {
    shannon_entropy(probs)
}

/// `tr(rho sigma)` for two states of the same dimension.
pub fn overlap(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    Ok(linalg::trace_product(rho.matrix(), sigma.matrix()).re)
}
