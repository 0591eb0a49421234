use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

use super::channel::QuantumChannel;
use super::covariance::{covariance_residual, passivity_residual, COVARIANCE_TOL, PASSIVITY_TOL};
use crate::error::{Error, Result};
use crate::qcore::linalg::{self, c64, CMatrix};
use crate::qcore::{random_hermitian, DensityMatrix, HamiltonianSystem};
use crate::symmetry::{haar_average_operator, GroupElement, GroupMeasure, SymmetryRep, COMMUTATION_TOL};

/// Relative tolerance for grouping energy levels into eigenspaces.
const LEVEL_TOL: f64 = 1e-9;

/// Haar average as a channel: weight projections for U(1), the uniform
/// group mixture otherwise.
pub fn make_dephasing(rep: &SymmetryRep) -> Result<QuantumChannel> {
    match rep.weight_projections() {
        Some(projections) => QuantumChannel::new(projections.into_iter().map(|(_, p)| p).collect()),
        None => make_group_mixture(rep, &GroupMeasure::Haar),
    }
}

/// `(1 - lambda) id + lambda A_Haar`.
pub fn make_partial_dephasing(rep: &SymmetryRep, lambda: f64) -> Result<QuantumChannel> {
    make_dephasing(rep)?.mix(&QuantumChannel::identity(rep.dim()), lambda)
}

/// `rho -> (1 - p) rho + p gamma`.
pub fn make_thermalizing(sys: &HamiltonianSystem, p: f64) -> Result<QuantumChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid("thermalizing strength", format!("{p} outside [0, 1]")));
    }
    make_replace(sys.gibbs(), sys.dim())?.mix(&QuantumChannel::identity(sys.dim()), p)
}

/// `rho -> sigma tr(rho)`.
pub fn make_replace(sigma: &DensityMatrix, dim_in: usize) -> Result<QuantumChannel> {
    QuantumChannel::replace(sigma, dim_in)
}

/// `rho -> sum_g w_g U_g rho U_g^dagger`.
pub fn make_group_mixture(rep: &SymmetryRep, mu: &GroupMeasure) -> Result<QuantumChannel> {
    mu.check_for(rep)?;
    let atoms: Vec<(GroupElement, f64)> = match mu {
        GroupMeasure::Haar if rep.is_u1() => return make_dephasing(rep),
        GroupMeasure::Haar => {
            let n = rep.order().unwrap();
            (0..n).map(|k| (GroupElement::Index(k), 1.0 / n as f64)).collect()
        }
        GroupMeasure::Atoms(a) => a.iter().map(|x| (x.element, x.weight)).collect(),
    };
    let mut kraus = Vec::with_capacity(atoms.len());
    for (g, w) in atoms {
        kraus.push(rep.unitary_at(&g)? * c64(w.sqrt(), 0.0));
    }
    QuantumChannel::new(kraus)?.compressed()
}

/// Stochastic time delay `rho -> sum_k q_k U_{t_k} rho U_{t_k}^dagger`.
pub fn make_delay(rep: &SymmetryRep, shifts: &[f64], probs: &[f64]) -> Result<QuantumChannel> {
    if !rep.is_u1() {
        return Err(Error::invalid("delay", "time shifts need a U1 rep"));
    }
    make_group_mixture(rep, &GroupMeasure::u1_atoms(shifts, probs)?)
}

/// `rho -> V rho V^dagger` for a unitary commuting with `H` and the rep.
pub fn make_energy_unitary(sys: &HamiltonianSystem, rep: &SymmetryRep, v: CMatrix) -> Result<QuantumChannel> {
    if v.shape() != (sys.dim(), sys.dim()) {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            found: v.nrows(),
        });
    }
    let with_h = linalg::max_abs(&linalg::commutator(&v, sys.hamiltonian()));
    if !(with_h <= COMMUTATION_TOL) {
        return Err(Error::invalid(
            "energy unitary",
            format!("does not commute with H (residual {with_h:.3e})"),
        ));
    }
    let with_rep = rep.commutation_residual(&v)?;
    if !(with_rep <= COMMUTATION_TOL) {
        return Err(Error::invalid(
            "energy unitary",
            format!("does not commute with the rep (residual {with_rep:.3e})"),
        ));
    }
    QuantumChannel::unitary(v)
}

/// `exp(-i X)` with `X` a random Hermitian averaged over the group and pinched
/// onto the energy eigenspaces.
pub fn random_energy_unitary<R: Rng + ?Sized>(
    sys: &HamiltonianSystem,
    rep: &SymmetryRep,
    rng: &mut R,
) -> Result<CMatrix> {
    let x = haar_average_operator(rep, &random_hermitian(sys.dim(), rng))?;
    let projections = sys.energy_projections(LEVEL_TOL);
    let pinched = projections
        .iter()
        .fold(CMatrix::zeros(sys.dim(), sys.dim()), |acc, q| acc + q * &x * q);
    linalg::hermitian_function(&pinched, |e| c64(e.cos(), -e.sin()))
}

fn random_component<R: Rng + ?Sized>(
    sys: &HamiltonianSystem,
    rep: &SymmetryRep,
    rng: &mut R,
) -> Result<QuantumChannel> {
    match rng.random_range(0..4u8) {
        0 => make_partial_dephasing(rep, rng.random::<f64>()),
        1 => make_thermalizing(sys, rng.random::<f64>()),
        2 => {
            let n = rng.random_range(1..=3usize);
            let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-3).collect();
            let total: f64 = raw.iter().sum();
            let probs: Vec<f64> = raw.iter().map(|w| w / total).collect();
            let elements: Vec<GroupElement> = match rep.order() {
                Some(order) => (0..n)
                    .map(|_| GroupElement::Index(rng.random_range(0..order)))
                    .collect(),
                None => (0..n).map(|_| GroupElement::Angle(TAU * rng.random::<f64>())).collect(),
            };
            make_group_mixture(rep, &GroupMeasure::from_atoms(elements.into_iter().zip(probs))?)
        }
        _ => {
            let v = random_energy_unitary(sys, rep, rng)?;
            make_energy_unitary(sys, rep, v)
        }
    }
}

/// Random passive covariant channel from a fresh ChaCha stream for `seed`.
pub fn random_passive_covariant(sys: &HamiltonianSystem, rep: &SymmetryRep, seed: u64) -> Result<QuantumChannel> {
    random_passive_covariant_with(sys, rep, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Random composition and convex combination of partial dephasing,
/// thermalizing, group mixtures and energy unitaries, certified covariant
/// and passive before it is returned.
pub fn random_passive_covariant_with<R: Rng + ?Sized>(
    sys: &HamiltonianSystem,
    rep: &SymmetryRep,
    rng: &mut R,
) -> Result<QuantumChannel> {
    if rep.dim() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            found: rep.dim(),
        });
    }
    rep.check_commutes(sys.hamiltonian())?;
    let steps = rng.random_range(1..=3usize);
    let mut channel = random_component(sys, rep, rng)?;
    for _ in 1..steps {
        channel = channel.then(&random_component(sys, rep, rng)?)?;
    }
    if rng.random_bool(0.5) {
        let lambda = rng.random::<f64>();
        channel = channel.mix(&random_component(sys, rep, rng)?, lambda)?;
    }
    let cov = covariance_residual(&channel, rep)?;
    if !(cov <= COVARIANCE_TOL) {
        return Err(Error::certification(
            "covariance of generated channel",
            cov,
            COVARIANCE_TOL,
        ));
    }
    let pass = passivity_residual(&channel, sys)?;
    if !(pass <= PASSIVITY_TOL) {
        return Err(Error::certification(
            "passivity of generated channel",
            pass,
            PASSIVITY_TOL,
        ));
    }
    Ok(channel)
}
