use rand::Rng;

use super::channel::{CpMap, QuantumChannel};
use super::covariance::twirl_between;
use crate::error::{Error, Result};
use crate::qcore::linalg::{self, c64, CMatrix};
use crate::qcore::{complex_ginibre, DensityMatrix};
use crate::symmetry::{GroupMeasure, SymmetryRep};

/// `rho -> sum_j |j><j| ⊗ C_j(rho)`, with Kraus operators `|j> ⊗ K`
/// (ancilla first, output dimension `m * d_out`).
pub fn instrument_channel(parts: &[CpMap]) -> Result<QuantumChannel> {
    let first = parts
        .first()
        .ok_or_else(|| Error::invalid("instrument", "needs at least one part"))?;
    let (d_in, d_out) = (first.dim_in(), first.dim_out());
    let m = parts.len();
    let mut kraus = Vec::new();
    for (j, part) in parts.iter().enumerate() {
        if (part.dim_in(), part.dim_out()) != (d_in, d_out) {
            return Err(Error::invalid(
                "instrument",
                format!("part {j} has different dimensions"),
            ));
        }
        let ket = linalg::matrix_unit(m, 1, j, 0);
        kraus.extend(part.kraus().iter().map(|k| linalg::kron(&ket, k)));
    }
    QuantumChannel::new(kraus).map_err(|e| match e {
        Error::Invalid { reason, .. } => {
            Error::invalid("instrument", format!("parts do not sum to a channel: {reason}"))
        }
        other => other,
    })
}

/// Outcome probabilities `p_j = tr C_j(rho)` and normalized post-measurement
/// states (`None` when `p_j` vanishes).
pub fn instrument_outcomes(parts: &[CpMap], rho: &DensityMatrix) -> Result<(Vec<f64>, Vec<Option<DensityMatrix>>)> {
    let mut probs = Vec::with_capacity(parts.len());
    let mut states = Vec::with_capacity(parts.len());
    for part in parts {
        let out = part.apply_operator(rho.matrix())?;
        let p = linalg::trace(&out).re.max(0.0);
        probs.push(p);
        states.push(if p > 1e-14 {
            Some(DensityMatrix::from_output(out / c64(p, 0.0))?)
        } else {
            None
        });
    }
    Ok((probs, states))
}

/// Projective measurement of the rep's weight: parts `P_n · P_n`.
pub fn weight_measurement(rep: &SymmetryRep) -> Result<Vec<CpMap>> {
    let projections = rep
        .weight_projections()
        .ok_or_else(|| Error::invalid("rep", "weight measurement needs a U1 rep"))?;
    projections.into_iter().map(|(_, p)| CpMap::new(vec![p])).collect()
}

/// Random covariant instrument with `outcomes` parts for a U(1) rep.
///
/// A random channel into the ancilla-extended space is Haar twirled against
/// `I_m ⊗ U`, then each part is the projection onto one ancilla level.
pub fn random_covariant_instrument<R: Rng + ?Sized>(
    rep: &SymmetryRep,
    outcomes: usize,
    rng: &mut R,
) -> Result<Vec<CpMap>> {
    if !rep.is_u1() {
        return Err(Error::invalid("rep", "random covariant instruments need a U1 rep"));
    }
    if outcomes == 0 {
        return Err(Error::invalid("outcomes", "must be positive"));
    }
    let d = rep.dim();
    let out_rep = rep.extend_trivially(outcomes)?;
    let n_kraus = rng.random_range(1..=d);
    let stacked = complex_ginibre(outcomes * d * n_kraus, d, rng);
    let q = stacked.qr().q();
    let kraus: Vec<CMatrix> = (0..n_kraus)
        .map(|k| q.rows(k * outcomes * d, outcomes * d).into_owned())
        .collect();
    let channel = QuantumChannel::new(kraus)?;
    let covariant = twirl_between(&channel, rep, &out_rep, &GroupMeasure::Haar)?;
    (0..outcomes)
        .map(|j| {
            let bra = linalg::matrix_unit(1, outcomes, 0, j);
            let proj = linalg::kron(&bra, &linalg::identity(d));
            CpMap::new(covariant.kraus().iter().map(|k| &proj * k).collect())
        })
        .collect()
}
