use serde::Serialize;

use super::asymmetry::holevo_information;
use crate::error::{Error, Result};
use crate::qcore::{free_energy, DensityMatrix, HamiltonianSystem};
use crate::symmetry::{measure_average, orbit_ensemble, verify_chain, GroupMeasure, SymmetryRep, CHAIN_TOL};

/// Measures `mu_1 = delta_e, ..., mu_n` with witnesses `nu_j` such that
/// `A_{mu_{j+1}} = A_{nu_j} ∘ A_{mu_j}`.
#[derive(Debug, Clone)]
pub struct MeasureChain {
    measures: Vec<GroupMeasure>,
    witnesses: Vec<GroupMeasure>,
    residuals: Vec<f64>,
    verified: bool,
    rep_dim: usize,
    label: String,
}

impl MeasureChain {
    /// Checks every link against `rep`; the chain is marked verified when all
    /// residuals are at most `tol`.
    pub fn new(
        rep: &SymmetryRep,
        measures: Vec<GroupMeasure>,
        witnesses: Vec<GroupMeasure>,
        label: impl Into<String>,
        tol: f64,
    ) -> Result<Self> {
        let residuals = verify_chain(rep, &measures, &witnesses)?;
        let verified = residuals.iter().all(|&r| r <= tol);
        Ok(Self {
            measures,
            witnesses,
            residuals,
            verified,
            rep_dim: rep.dim(),
            label: label.into(),
        })
    }

    /// `(delta_e, Haar)`.
    pub fn two_step(rep: &SymmetryRep) -> Result<Self> {
        Self::new(
            rep,
            vec![GroupMeasure::identity(rep), GroupMeasure::Haar],
            vec![GroupMeasure::Haar],
            "delta_0,haar",
            CHAIN_TOL,
        )
    }

    /// `(delta_0, (delta_0 + delta_s)/2, Haar)` on U(1).
    pub fn three_step(rep: &SymmetryRep, s: f64) -> Result<Self> {
        Self::new(
            rep,
            vec![
                GroupMeasure::identity(rep),
                GroupMeasure::two_point(s),
                GroupMeasure::Haar,
            ],
            vec![GroupMeasure::two_point(s), GroupMeasure::Haar],
            format!("delta_0,two_point({s}),haar"),
            CHAIN_TOL,
        )
    }

    pub fn measures(&self) -> &[GroupMeasure] {
        &self.measures
    }

    pub fn witnesses(&self) -> &[GroupMeasure] {
        &self.witnesses
    }

    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    pub fn verified(&self) -> bool {
        self.verified
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.measures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measures.is_empty()
    }

    fn check_usable(&self, rep: &SymmetryRep) -> Result<()> {
        if !self.verified {
            let worst = self.residuals.iter().cloned().fold(0.0, f64::max);
            return Err(Error::invalid(
                "measure chain",
                format!("not verified (largest link residual {worst:.3e})"),
            ));
        }
        if self.rep_dim != rep.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.rep_dim,
                found: rep.dim(),
            });
        }
        Ok(())
    }
}

/// Chain decomposition of the free energy.
#[derive(Debug, Clone, Serialize)]
pub struct FreeEnergySplit {
    /// `F_j = F(A_{mu_j} rho) - F(A_{mu_{j+1}} rho)`, and `F_n = F(A_{mu_n} rho)`.
    pub terms: Vec<f64>,
    /// `F(rho)`.
    pub total: f64,
    pub temperature: f64,
    pub chain_label: String,
    /// Holevo information of `{U_g rho_j U_g^dagger, nu_j}` for each link, in nats.
    pub holevo_terms: Vec<f64>,
    /// `max_j |F_j / T - holevo_j|`.
    pub holevo_deviation: f64,
}

impl FreeEnergySplit {
    /// `|sum_j F_j - F|`.
    pub fn telescoping_gap(&self) -> f64 {
        (self.terms.iter().sum::<f64>() - self.total).abs()
    }
}

/// States `A_{mu_j}(rho)` along the chain.
pub fn chain_states(rho: &DensityMatrix, rep: &SymmetryRep, chain: &MeasureChain) -> Result<Vec<DensityMatrix>> {
    chain.measures.iter().map(|mu| measure_average(rep, mu, rho)).collect()
}

fn terms_from_states(states: &[DensityMatrix], sys: &HamiltonianSystem) -> Result<Vec<f64>> {
    let f: Vec<f64> = states.iter().map(|s| free_energy(s, sys)).collect::<Result<_>>()?;
    let mut terms: Vec<f64> = f.windows(2).map(|w| w[0] - w[1]).collect();
    terms.push(*f.last().unwrap());
    Ok(terms)
}

/// Free-energy terms of a verified chain, cross-checked against the Holevo
/// information of each link's orbit ensemble.
pub fn split_chain(
    rho: &DensityMatrix,
    sys: &HamiltonianSystem,
    rep: &SymmetryRep,
    chain: &MeasureChain,
) -> Result<FreeEnergySplit> {
    chain.check_usable(rep)?;
    sys.check_dim(rho.dim())?;
    rep.check_commutes(sys.hamiltonian())?;
    let states = chain_states(rho, rep, chain)?;
    let terms = terms_from_states(&states, sys)?;
    let t = sys.temperature();
    let mut holevo_terms = Vec::with_capacity(chain.witnesses.len());
    let mut deviation = 0.0f64;
    for (j, nu) in chain.witnesses.iter().enumerate() {
        let (ens, probs) = orbit_ensemble(rep, nu, &states[j])?;
        let chi = holevo_information(&ens, &probs)?;
        deviation = deviation.max((terms[j] / t - chi).abs());
        holevo_terms.push(chi);
    }
    Ok(FreeEnergySplit {
        terms,
        total: free_energy(rho, sys)?,
        temperature: t,
        chain_label: chain.label.clone(),
        holevo_terms,
        holevo_deviation: deviation,
    })
}
