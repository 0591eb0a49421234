use super::measure::{Atom, GroupMeasure};
use super::rep::{GroupElement, SymmetryRep};
use crate::error::{Error, Result};
use crate::qcore::linalg::{self, c64, CMatrix};
use crate::qcore::DensityMatrix;

/// A chain link is accepted when its superoperator residual is at most this.
pub const CHAIN_TOL: f64 = 1e-9;

fn check_operator(rep: &SymmetryRep, x: &CMatrix) -> Result<()> {
    if x.nrows() != rep.dim() || x.ncols() != rep.dim() {
        return Err(Error::DimensionMismatch {
            expected: rep.dim(),
            found: x.nrows(),
        });
    }
    Ok(())
}

/// `U x U^dagger`.
pub fn conjugate(u: &CMatrix, x: &CMatrix) -> CMatrix {
    u * x * u.adjoint()
}

/// Haar average of an arbitrary operator.
///
/// For U(1) this removes every matrix element between distinct weights
/// (in the representation basis); for a finite group it is the uniform
/// average over all elements.
pub fn haar_average_operator(rep: &SymmetryRep, x: &CMatrix) -> Result<CMatrix> {
    check_operator(rep, x)?;
    if let Some(weights) = rep.weights() {
        let dephase = |m: &CMatrix| {
            CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
                if weights[i] == weights[j] {
                    m[(i, j)]
                } else {
                    c64(0.0, 0.0)
                }
            })
        };
        if rep.computational_basis() {
            return Ok(dephase(x));
        }
        let b = rep.basis().expect("u1 rep has a basis");
        return Ok(b * dephase(&(b.adjoint() * x * b)) * b.adjoint());
    }
    let unitaries = rep.unitaries().expect("finite rep has unitaries");
    let mut acc = CMatrix::zeros(x.nrows(), x.ncols());
    for u in unitaries {
        acc += conjugate(u, x);
    }
    Ok(acc / c64(unitaries.len() as f64, 0.0))
}

/// Orbit average `rho_bar` under the Haar measure.
pub fn haar_average(rep: &SymmetryRep, rho: &DensityMatrix) -> Result<DensityMatrix> {
    DensityMatrix::from_output(haar_average_operator(rep, rho.matrix())?)
}

/// `A_mu(x) = sum_g w_g U_g x U_g^dagger`, or the Haar average.
pub fn measure_average_operator(rep: &SymmetryRep, mu: &GroupMeasure, x: &CMatrix) -> Result<CMatrix> {
    check_operator(rep, x)?;
    match mu {
        GroupMeasure::Haar => haar_average_operator(rep, x),
        GroupMeasure::Atoms(atoms) => {
            let mut acc = CMatrix::zeros(x.nrows(), x.ncols());
            for atom in atoms.iter() {
                let u = rep.unitary_at(&atom.element)?;
                acc += conjugate(&u, x) * c64(atom.weight, 0.0);
            }
            Ok(acc)
        }
    }
}

/// `A_mu(rho)`.
pub fn measure_average(rep: &SymmetryRep, mu: &GroupMeasure, rho: &DensityMatrix) -> Result<DensityMatrix> {
    DensityMatrix::from_output(measure_average_operator(rep, mu, rho.matrix())?)
}

/// Convolution `mu * nu`: the law of `h ∘ g` for independent `g ~ mu`, `h ~ nu`.
///
/// Haar absorbs everything. Coinciding products are merged, so `k` and `m`
/// atoms give at most `k m` atoms.
pub fn convolve(rep: &SymmetryRep, mu: &GroupMeasure, nu: &GroupMeasure) -> Result<GroupMeasure> {
    mu.check_for(rep)?;
    nu.check_for(rep)?;
    let (a, b) = match (mu, nu) {
        (GroupMeasure::Haar, _) | (_, GroupMeasure::Haar) => return Ok(GroupMeasure::Haar),
        (GroupMeasure::Atoms(a), GroupMeasure::Atoms(b)) => (a, b),
    };
    let mut products = Vec::with_capacity(a.len() * b.len());
    for g in a.iter() {
        for h in b.iter() {
            products.push(Atom {
                element: rep.compose(&h.element, &g.element)?,
                weight: g.weight * h.weight,
            });
        }
    }
    Ok(GroupMeasure::merged(rep, products))
}

/// Matrix of a linear map on `d_in x d_in` operators in the matrix-unit basis
/// (column `i d_in + j` holds the row-major image of `|i><j|`).
pub fn superoperator_matrix(d_in: usize, f: impl Fn(&CMatrix) -> Result<CMatrix>) -> Result<CMatrix> {
    let mut columns: Vec<Vec<num_complex::Complex64>> = Vec::with_capacity(d_in * d_in);
    for i in 0..d_in {
        for j in 0..d_in {
            columns.push(linalg::vec_row_major(&f(&linalg::matrix_unit(d_in, d_in, i, j))?));
        }
    }
    let rows = columns[0].len();
    Ok(CMatrix::from_fn(rows, d_in * d_in, |r, c| columns[c][r]))
}

/// `max_E |f(E) - g(E)|` over all matrix units `E`: the entrywise distance of
/// the two superoperator matrices.
pub fn superoperator_residual(
    d_in: usize,
    f: impl Fn(&CMatrix) -> Result<CMatrix>,
    g: impl Fn(&CMatrix) -> Result<CMatrix>,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..d_in {
        for j in 0..d_in {
            let e = linalg::matrix_unit(d_in, d_in, i, j);
            let (a, b) = (f(&e)?, g(&e)?);
            if a.shape() != b.shape() {
                return Err(Error::invalid("superoperator", "maps have different output dimensions"));
            }
            worst = worst.max(linalg::max_abs(&(a - b)));
        }
    }
    Ok(worst)
}

/// Residuals `|A_{mu_{j+1}} - A_{nu_j} ∘ A_{mu_j}|` for each link of a chain.
///
/// `chain[0]` must be the Dirac measure at the identity and there must be one
/// witness per link.
pub fn verify_chain(rep: &SymmetryRep, chain: &[GroupMeasure], witnesses: &[GroupMeasure]) -> Result<Vec<f64>> {
    if chain.is_empty() {
        return Err(Error::invalid("measure chain", "needs at least one measure"));
    }
    if witnesses.len() + 1 != chain.len() {
        return Err(Error::invalid(
            "measure chain",
            format!(
                "{} measures need {} witnesses, got {}",
                chain.len(),
                chain.len() - 1,
                witnesses.len()
            ),
        ));
    }
    for m in chain.iter().chain(witnesses) {
        m.check_for(rep)?;
    }
    if !chain[0].is_identity_dirac(rep) {
        return Err(Error::invalid(
            "measure chain",
            "first measure must be the Dirac measure at the identity",
        ));
    }
    let d = rep.dim();
    (0..witnesses.len())
        .map(|j| {
            superoperator_residual(
                d,
                |e| measure_average_operator(rep, &chain[j + 1], e),
                |e| {
                    let inner = measure_average_operator(rep, &chain[j], e)?;
                    measure_average_operator(rep, &witnesses[j], &inner)
                },
            )
        })
        .collect()
}

/// Orbit ensemble `{U_g x U_g^dagger, w_g}` of a state under a measure; Haar
/// is replaced by the exact finite design of [`SymmetryRep::haar_design`].
pub fn orbit_ensemble(
    rep: &SymmetryRep,
    mu: &GroupMeasure,
    rho: &DensityMatrix,
) -> Result<(Vec<DensityMatrix>, Vec<f64>)> {
    let atoms: Vec<(GroupElement, f64)> = match mu {
        GroupMeasure::Atoms(a) => a.iter().map(|x| (x.element, x.weight)).collect(),
        GroupMeasure::Haar => {
            let design = rep.haar_design();
            let w = 1.0 / design.len() as f64;
            design.into_iter().map(|g| (g, w)).collect()
        }
    };
    let mut states = Vec::with_capacity(atoms.len());
    let mut probs = Vec::with_capacity(atoms.len());
    for (g, w) in atoms {
        states.push(rho.conjugate_by(&rep.unitary_at(&g)?)?);
        probs.push(w);
    }
    Ok((states, probs))
}
