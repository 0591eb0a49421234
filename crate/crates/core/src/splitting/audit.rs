use serde::Serialize;

use super::asymmetry::{asymmetry, overlap};
use super::chain::{split_chain, MeasureChain};
use crate::channels::{covariance_residual, passivity_residual, QuantumChannel, COVARIANCE_TOL, PASSIVITY_TOL};
use crate::error::{Error, Result};
use crate::qcore::{free_energy, shannon_entropy, vn_entropy, DensityMatrix, HamiltonianSystem};
use crate::symmetry::{haar_average, measure_average, GroupElement, GroupMeasure, SymmetryRep};

/// One-sided slack allowed before a monotonicity check counts as violated.
pub const MONOTONICITY_TOL: f64 = 1e-8;
/// Input and shifted input count as distinguishable below this overlap.
pub const ORTHOGONALITY_TOL: f64 = 1e-9;

/// Thresholds used to certify a channel before an audit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub covariance: f64,
    pub passivity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            covariance: COVARIANCE_TOL,
            passivity: PASSIVITY_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    pub covariance: f64,
    pub passivity: f64,
}

/// Computes both residuals and fails unless each is within tolerance.
pub fn certify_channel(
    c: &QuantumChannel,
    sys: &HamiltonianSystem,
    rep: &SymmetryRep,
    tol: Tolerances,
) -> Result<Residuals> {
    let res = Residuals {
        covariance: covariance_residual(c, rep)?,
        passivity: passivity_residual(c, sys)?,
    };
    if !(res.covariance <= tol.covariance) {
        return Err(Error::certification(
            "channel covariance",
            res.covariance,
            tol.covariance,
        ));
    }
    if !(res.passivity <= tol.passivity) {
        return Err(Error::certification("channel passivity", res.passivity, tol.passivity));
    }
    Ok(res)
}

fn shifted(rep: &SymmetryRep, rho: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    rho.conjugate_by(&rep.unitary_at(&GroupElement::Angle(t))?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossBoundReport {
    /// `F(rho) - F(C(rho))`.
    pub actual_loss: f64,
    /// `(ln 2 - c) T` when the input is distinguishable from its shift.
    pub bound: Option<f64>,
    /// `S(A_mu(C(rho))) - S(C(rho))` with `mu = (delta_0 + delta_s)/2`.
    pub c: f64,
    pub distinguishable_in: bool,
    /// `tr(rho alpha_s(rho))`.
    pub overlap: f64,
    pub residuals: Residuals,
}

/// Free-energy loss of a passive covariant channel against the bound set by
/// how well its output still distinguishes a time shift `s`.
pub fn loss_bound_audit(
    rho: &DensityMatrix,
    sys: &HamiltonianSystem,
    rep: &SymmetryRep,
    c: &QuantumChannel,
    s: f64,
    tol: Tolerances,
) -> Result<LossBoundReport> {
    if !rep.is_u1() {
        return Err(Error::invalid("rep", "the shift audit needs a U1 rep"));
    }
    if !s.is_finite() {
        return Err(Error::invalid("shift", "must be finite"));
    }
    sys.check_dim(rho.dim())?;
    let residuals = certify_channel(c, sys, rep, tol)?;
    let out = c.apply(rho)?;
    let avg = measure_average(rep, &GroupMeasure::two_point(s), &out)?;
    let c_val = vn_entropy(&avg)? - vn_entropy(&out)?;
    let ov = overlap(rho, &shifted(rep, rho, s)?)?;
    let distinguishable_in = ov <= ORTHOGONALITY_TOL;
    Ok(LossBoundReport {
        actual_loss: free_energy(rho, sys)? - free_energy(&out, sys)?,
        bound: distinguishable_in.then(|| (std::f64::consts::LN_2 - c_val) * sys.temperature()),
        c: c_val,
        distinguishable_in,
        overlap: ov,
        residuals,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftMixtureReport {
    /// `F(rho) - F(sum_j p_j alpha_{t_j}(rho))`.
    pub defect: f64,
    /// `T S(p)`.
    pub entropy_term: f64,
    /// Largest `tr(alpha_{t_i}(rho) alpha_{t_j}(rho))` over `i != j`.
    pub max_overlap: f64,
    pub orthogonal: bool,
}

/// Free-energy defect of a random time shift; equals `T S(p)` when the
/// shifted copies are mutually orthogonal.
pub fn shift_mixture_defect(
    rho: &DensityMatrix,
    sys: &HamiltonianSystem,
    rep: &SymmetryRep,
    shifts: &[f64],
    probs: &[f64],
) -> Result<ShiftMixtureReport> {
    if !rep.is_u1() {
        return Err(Error::invalid("rep", "time shifts need a U1 rep"));
    }
    sys.check_dim(rho.dim())?;
    let mu = GroupMeasure::u1_atoms(shifts, probs)?;
    let copies: Vec<DensityMatrix> = shifts.iter().map(|&t| shifted(rep, rho, t)).collect::<Result<_>>()?;
    let mut max_overlap = 0.0f64;
    for i in 0..copies.len() {
        for j in 0..i {
            max_overlap = max_overlap.max(overlap(&copies[i], &copies[j])?);
        }
    }
    let mixture = measure_average(rep, &mu, rho)?;
    Ok(ShiftMixtureReport {
        defect: free_energy(rho, sys)? - free_energy(&mixture, sys)?,
        entropy_term: sys.temperature() * shannon_entropy(probs),
        max_overlap,
        orthogonal: max_overlap <= ORTHOGONALITY_TOL,
    })
}

/// Chain terms before and after a channel, with the two-term quantities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub terms_before: Vec<f64>,
    pub terms_after: Vec<f64>,
    pub total_before: f64,
    pub total_after: f64,
    pub residuals: Residuals,
    /// `after - before` per chain term.
    pub deltas: Vec<f64>,
    pub asymmetry_before: f64,
    pub asymmetry_after: f64,
    pub covariant_f_before: f64,
    pub covariant_f_after: f64,
    /// Quantities that grew by more than [`MONOTONICITY_TOL`].
    pub violations: Vec<String>,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Applies a certified passive covariant channel and compares every chain
/// term, the asymmetry and the covariant free energy before and after.
pub fn monotonicity_audit(
    rho: &DensityMatrix,
    sys: &HamiltonianSystem,
    rep: &SymmetryRep,
    c: &QuantumChannel,
    chain: &MeasureChain,
    tol: Tolerances,
) -> Result<MonotonicityReport> {
    let residuals = certify_channel(c, sys, rep, tol)?;
    let out = c.apply(rho)?;
    let before = split_chain(rho, sys, rep, chain)?;
    let after = split_chain(&out, sys, rep, chain)?;
    let deltas: Vec<f64> = before.terms.iter().zip(&after.terms).map(|(b, a)| a - b).collect();
    let asym = (asymmetry(rho, rep)?, asymmetry(&out, rep)?);
    let cov = (
        free_energy(&haar_average(rep, rho)?, sys)?,
        free_energy(&haar_average(rep, &out)?, sys)?,
    );
    let mut violations = Vec::new();
    for (j, d) in deltas.iter().enumerate() {
        if *d > MONOTONICITY_TOL {
            violations.push(format!("term {j} increased by {d:.3e}"));
        }
    }
    if asym.1 - asym.0 > MONOTONICITY_TOL {
        violations.push(format!("asymmetry increased by {:.3e}", asym.1 - asym.0));
    }
    if cov.1 - cov.0 > MONOTONICITY_TOL {
        violations.push(format!("covariant free energy increased by {:.3e}", cov.1 - cov.0));
    }
    Ok(MonotonicityReport {
        terms_before: before.terms,
        terms_after: after.terms,
        total_before: before.total,
        total_after: after.total,
        residuals,
        deltas,
        asymmetry_before: asym.0,
        asymmetry_after: asym.1,
        covariant_f_before: cov.0,
        covariant_f_after: cov.1,
        violations,
    })
}
