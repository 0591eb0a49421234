use std::collections::BTreeMap;

use super::channel::{CpMap, QuantumChannel};
use crate::error::{Error, Result};
use crate::qcore::linalg::{self, c64, CMatrix};
use crate::qcore::HamiltonianSystem;
use crate::symmetry::{GroupElement, GroupMeasure, SymmetryRep};

/// Covariance is certified when the residual is at most this.
pub const COVARIANCE_TOL: f64 = 1e-9;
/// Passivity is certified when the residual is at most this.
pub const PASSIVITY_TOL: f64 = 1e-9;

fn check_rep_dims(rep_in: &SymmetryRep, rep_out: &SymmetryRep, dim_in: usize, dim_out: usize) -> Result<()> {
    if rep_in.dim() != dim_in {
        return Err(Error::DimensionMismatch {
            expected: dim_in,
            found: rep_in.dim(),
        });
    }
    if rep_out.dim() != dim_out {
        return Err(Error::DimensionMismatch {
            expected: dim_out,
            found: rep_out.dim(),
        });
    }
    match (rep_in.is_u1(), rep_out.is_u1()) {
        (true, true) => Ok(()),
        (false, false) if rep_in.table() == rep_out.table() => Ok(()),
        _ => Err(Error::invalid("reps", "input and output reps are not the same group")),
    }
}

/// `max ‖f(U_g E U_g^dagger) - V_g f(E) V_g^dagger‖` over matrix units and the
/// checked elements; U(1) adds the generator test `f([G, E])` vs `[G', f(E)]`.
fn covariance_of_map(
    f: impl Fn(&CMatrix) -> Result<CMatrix>,
    dim_in: usize,
    rep_in: &SymmetryRep,
    rep_out: &SymmetryRep,
) -> Result<f64> {
    let mut worst = 0.0f64;
    if let (Some(g_in), Some(g_out)) = (rep_in.generator(), rep_out.generator()) {
        worst = worst.max(crate::symmetry::superoperator_residual(
            dim_in,
            |e| f(&linalg::commutator(&g_in, e)),
            |e| Ok(linalg::commutator(&g_out, &f(e)?)),
        )?);
    }
    for g in rep_in.sample_elements() {
        let u = rep_in.unitary_at(&g)?;
        let v = rep_out.unitary_at(&g)?;
        worst = worst.max(crate::symmetry::superoperator_residual(
            dim_in,
            |e| f(&(&u * e * u.adjoint())),
            |e| Ok(&v * f(e)? * v.adjoint()),
        )?);
    }
    Ok(worst)
}

/// Covariance residual of a channel with the same rep on input and output.
pub fn covariance_residual(c: &QuantumChannel, rep: &SymmetryRep) -> Result<f64> {
    covariance_residual_between(c, rep, rep)
}

/// Covariance residual `C(U_g x U_g^dagger)` vs `V_g C(x) V_g^dagger` for
/// possibly different input and output reps of the same group.
pub fn covariance_residual_between(c: &QuantumChannel, rep_in: &SymmetryRep, rep_out: &SymmetryRep) -> Result<f64> {
    check_rep_dims(rep_in, rep_out, c.dim_in(), c.dim_out())?;
    covariance_of_map(|x| c.apply_operator(x), c.dim_in(), rep_in, rep_out)
}

/// Covariance residual of a square CP map.
pub fn cp_covariance_residual(c: &CpMap, rep: &SymmetryRep) -> Result<f64> {
    check_rep_dims(rep, rep, c.dim_in(), c.dim_out())?;
    covariance_of_map(|x| c.apply_operator(x), c.dim_in(), rep, rep)
}

/// `‖C(gamma) - gamma‖_1`.
pub fn passivity_residual(c: &QuantumChannel, sys: &HamiltonianSystem) -> Result<f64> {
    if c.dim_in() != sys.dim() || c.dim_out() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            found: if c.dim_in() != sys.dim() {
                c.dim_in()
            } else {
                c.dim_out()
            },
        });
    }
    let gamma = sys.gibbs().matrix();
    linalg::trace_norm_hermitian(&(c.apply_operator(gamma)? - gamma))
}

/// `K^(D)`: the part of `k` that shifts weight by `D`, in the rep bases.
fn weight_difference_split(k: &CMatrix, rep_in: &SymmetryRep, rep_out: &SymmetryRep) -> Vec<CMatrix> {
    let (w_in, w_out) = (rep_in.weights().unwrap(), rep_out.weights().unwrap());
    let (b_in, b_out) = (rep_in.basis().unwrap(), rep_out.basis().unwrap());
    let local = b_out.adjoint() * k * b_in;
    let mut parts: BTreeMap<i64, CMatrix> = BTreeMap::new();
    for a in 0..local.nrows() {
        for i in 0..local.ncols() {
            let z = local[(a, i)];
            if z.norm() == 0.0 {
                continue;
            }
            let delta = w_out[a] - w_in[i];
            parts
                .entry(delta)
                .or_insert_with(|| CMatrix::zeros(local.nrows(), local.ncols()))[(a, i)] = z;
        }
    }
    parts.into_values().map(|p| b_out * p * b_in.adjoint()).collect()
}

/// Twirl with the same rep on input and output.
pub fn twirl(c: &QuantumChannel, rep: &SymmetryRep, mu: &GroupMeasure) -> Result<QuantumChannel> {
    twirl_between(c, rep, rep, mu)
}

/// `∫ V_g^dagger C(U_g rho U_g^dagger) V_g dmu(g)`.
///
/// Atoms give the Kraus set `{sqrt(w) V_g^dagger K U_g}`. Haar on U(1) splits
/// each Kraus operator by weight difference, which is exactly covariant; Haar
/// on a finite group is the uniform measure.
pub fn twirl_between(
    c: &QuantumChannel,
    rep_in: &SymmetryRep,
    rep_out: &SymmetryRep,
    mu: &GroupMeasure,
) -> Result<QuantumChannel> {
    check_rep_dims(rep_in, rep_out, c.dim_in(), c.dim_out())?;
    mu.check_for(rep_in)?;
    let kraus: Vec<CMatrix> = match mu {
        GroupMeasure::Haar if rep_in.is_u1() => c
            .kraus()
            .iter()
            .flat_map(|k| weight_difference_split(k, rep_in, rep_out))
            .collect(),
        GroupMeasure::Haar => {
            let n = rep_in.order().unwrap();
            let atoms: Vec<(GroupElement, f64)> = (0..n).map(|k| (GroupElement::Index(k), 1.0 / n as f64)).collect();
            conjugated_kraus(c, rep_in, rep_out, &atoms)?
        }
        GroupMeasure::Atoms(a) => {
            let atoms: Vec<(GroupElement, f64)> = a.iter().map(|x| (x.element, x.weight)).collect();
            conjugated_kraus(c, rep_in, rep_out, &atoms)?
        }
    };
    QuantumChannel::new(kraus)?.compressed()
}

fn conjugated_kraus(
    c: &QuantumChannel,
    rep_in: &SymmetryRep,
    rep_out: &SymmetryRep,
    atoms: &[(GroupElement, f64)],
) -> Result<Vec<CMatrix>> {
    let mut out = Vec::with_capacity(atoms.len() * c.kraus().len());
    for (g, w) in atoms {
        let u = rep_in.unitary_at(g)?;
        let v = rep_out.unitary_at(g)?;
        let s = c64(w.sqrt(), 0.0);
        for k in c.kraus() {
            out.push(v.adjoint() * k * &u * s);
        }
    }
    Ok(out)
}
