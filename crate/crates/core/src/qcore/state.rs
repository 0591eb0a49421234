use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::sync::Arc;

use super::linalg::{self, c64, CMatrix};
use crate::error::{Error, Result};

/// Tolerance on Hermiticity, unit trace and negative eigenvalues of a state.
pub const STATE_TOL: f64 = 1e-10;
/// Eigenvalues below this do not contribute to entropies.
pub const EIG_CUTOFF: f64 = 1e-12;
/// Channel outputs whose trace is off by at most this much are renormalized.
const OUTPUT_TRACE_SLACK: f64 = 1e-8;

/// A Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: CMatrix,
    // exact eigenbasis and log-eigenvalues, kept when the state is built from a spectrum
    log_spectrum: Option<Arc<(Vec<f64>, CMatrix)>>,
}

impl PartialEq for DensityMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.mat == other.mat
    }
}

impl DensityMatrix {
    /// Validates `mat` as a density matrix.
    pub fn new(mat: CMatrix) -> Result<Self> {
        validate(&mat)?;
        Ok(Self {
            mat,
            log_spectrum: None,
        })
    }

    /// State with known eigenvectors (columns of `vectors`) and log-eigenvalues.
    pub(crate) fn from_log_spectrum(log_values: Vec<f64>, vectors: CMatrix) -> Result<Self> {
        let m = linalg::spectral_sum(&log_values, &vectors, |l| c64(l.exp(), 0.0));
        let mut rho = Self::from_output(m)?;
        rho.log_spectrum = Some(Arc::new((log_values, vectors)));
        Ok(rho)
    }

    /// Builds a state from a matrix produced by a channel or average.
    ///
    /// Round-off in the Hermitian part is removed and a trace within
    /// `1e-8` of one is renormalized before validation.
    pub fn from_output(mat: CMatrix) -> Result<Self> {
        let mut m = linalg::hermitize(&mat);
        let tr = linalg::trace(&m).re;
        if (tr - 1.0).abs() <= OUTPUT_TRACE_SLACK && tr > 0.0 {
            m /= c64(tr, 0.0);
        }
        Self::new(m)
    }

    /// Pure state `|psi><psi|`; the vector is normalized first.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if psi.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::invalid("state vector", "zero or non-finite norm"));
        }
        let v: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        Self::new(linalg::outer(&v))
    }

    /// Computational basis state `|k><k|` in dimension `d`.
    pub fn basis(d: usize, k: usize) -> Result<Self> {
        if k >= d {
            return Err(Error::invalid(
                "basis index",
                format!("{k} out of range for dimension {d}"),
            ));
        }
        Self::new(linalg::matrix_unit(d, d, k, k))
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(linalg::diag_real(probs))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            mat: linalg::identity(d).scale(1.0 / d as f64),
            log_spectrum: None,
        }
    }

    /// `(|0> + |1>)/sqrt(2)`.
    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            mat: linalg::outer(&[c64(h, 0.0), c64(h, 0.0)]),
            log_spectrum: None,
        }
    }

    /// Uniform superposition of all `d` computational basis states.
    pub fn uniform_superposition(d: usize) -> Self {
        Self {
            mat: CMatrix::from_element(d, d, c64(1.0 / d as f64, 0.0)),
            log_spectrum: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn purity(&self) -> f64 {
        linalg::trace_product(&self.mat, &self.mat).re
    }

    /// Eigenvalues with round-off negatives clipped to zero.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let vals = linalg::eigvalsh(&self.mat)?;
        Ok(vals.into_iter().map(|x| x.max(0.0)).collect())
    }

    /// `tr(rho X)`; real part only, as every observable here is Hermitian.
    pub fn expectation(&self, observable: &CMatrix) -> f64 {
        linalg::trace_product(&self.mat, observable).re
    }

    /// `tr(rho sigma)`.
    pub fn overlap(&self, other: &DensityMatrix) -> f64 {
        linalg::trace_product(&self.mat, &other.mat).re
    }

    /// `U rho U^dagger`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.nrows(),
            });
        }
        Self::from_output(u * &self.mat * u.adjoint())
    }
}

fn validate(mat: &CMatrix) -> Result<()> {
    if !mat.is_square() || mat.nrows() == 0 {
        return Err(Error::invalid(
            "density matrix",
            format!("expected non-empty square matrix, got {}x{}", mat.nrows(), mat.ncols()),
        ));
    }
    let herm = linalg::hermitian_deviation(mat);
    if !(herm <= STATE_TOL) {
        return Err(Error::NotHermitian(herm));
    }
    let tr = linalg::trace(mat).re;
    if !((tr - 1.0).abs() <= STATE_TOL) {
        return Err(Error::BadTrace(tr));
    }
    let min = linalg::eigvalsh(mat)?[0];
    if min < -STATE_TOL {
        return Err(Error::NotPsd(min));
    }
    Ok(())
}

/// `-lambda ln lambda` with the `0 ln 0 = 0` convention and the entropy cutoff.
#[inline]
pub fn entropy_term(lambda: f64) -> f64 {
    if lambda < EIG_CUTOFF {
        0.0
    } else {
        -lambda * lambda.ln()
    }
}

/// Shannon entropy of a probability vector, in nats.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs.iter().map(|&p| entropy_term(p)).sum()
}

/// Von Neumann entropy `-tr(rho ln rho)` in nats.
pub fn vn_entropy(rho: &DensityMatrix) -> Result<f64> {
    // eigenvalues a hair above 1 would otherwise give a tiny negative entropy
    Ok(shannon_entropy(&rho.spectrum()?).max(0.0))
}

/// Von Neumann entropy of an arbitrary matrix after validating it as a state.
pub fn matrix_entropy(mat: &CMatrix) -> Result<f64> {
    vn_entropy(&DensityMatrix::new(mat.clone())?)
}

/// Quantum relative entropy `D(rho || sigma)` in nats.
///
/// When the support of `rho` is not contained in that of `sigma` the value
/// is `+inf` and `supported` is false.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeEntropy {
    pub value: f64,
    pub supported: bool,
}

impl RelativeEntropy {
    pub fn is_finite(&self) -> bool {
        self.supported
    }
}

pub fn rel_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<RelativeEntropy> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let neg_entropy = -vn_entropy(rho)?;
    if let Some(spec) = &sigma.log_spectrum {
        let (log_values, vectors) = spec.as_ref();
        let cross: f64 = log_values
            .iter()
            .enumerate()
            .map(|(k, &l)| {
                let v = vectors.column(k);
                (v.adjoint() * rho.matrix() * v)[(0, 0)].re * l
            })
            .sum();
        return Ok(RelativeEntropy {
            value: neg_entropy - cross,
            supported: true,
        });
    }
    let (svals, svecs) = linalg::eigh(sigma.matrix())?;
    let mut cross = 0.0;
    for (k, &s) in svals.iter().enumerate() {
        let v = svecs.column(k);
        // <v|rho|v>
        let weight = (v.adjoint() * rho.matrix() * v)[(0, 0)].re;
        if s < EIG_CUTOFF {
            if weight > EIG_CUTOFF {
                return Ok(RelativeEntropy {
                    value: f64::INFINITY,
                    supported: false,
                });
            }
            continue;
        }
        cross += weight * s.ln();
    }
    Ok(RelativeEntropy {
        value: neg_entropy - cross,
        supported: true,
    })
}

/// `rho ⊗ sigma`.
pub fn tensor_state(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<DensityMatrix> {
    DensityMatrix::from_output(linalg::kron(rho.matrix(), sigma.matrix()))
}

/// Matrix of i.i.d. standard complex Gaussians (real and imaginary parts with variance 1/2).
pub fn complex_ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut g = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            g[(i, j)] = c64(s * re, s * im);
        }
    }
    g
}

/// Random state `G G^dagger / tr(G G^dagger)` with `G` a `dim x rank` Ginibre matrix.
pub fn random_state<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    if dim == 0 || rank == 0 || rank > dim {
        return Err(Error::invalid(
            "rank",
            format!("need 1 <= rank <= dim, got rank {rank} for dim {dim}"),
        ));
    }
    let g = complex_ginibre(dim, rank, rng);
    let w = &g * g.adjoint();
    let tr = linalg::trace(&w).re;
    DensityMatrix::from_output(w / c64(tr, 0.0))
}

/// [`random_state`] driven by a fresh ChaCha stream for `seed`.
pub fn random_state_seeded(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_state(dim, rank, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = complex_ginibre(dim, dim, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c64(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    linalg::hermitize(&complex_ginibre(dim, dim, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn entropy_of_maximally_mixed_qubit() {
        let s = vn_entropy(&DensityMatrix::maximally_mixed(2)).unwrap();
        assert!((s - LN_2).abs() < 1e-12);
    }

    #[test]
    fn entropy_of_pure_state_is_zero() {
        let rho = DensityMatrix::pure(&[c64(0.6, 0.0), c64(0.0, 0.8), c64(0.0, 0.0)]).unwrap();
        assert!(vn_entropy(&rho).unwrap().abs() < 1e-12);
    }

    #[test]
    fn entropy_of_diagonal_example() {
        // -0.7311 ln 0.7311 - 0.2689 ln 0.2689 evaluated by hand
        let rho = DensityMatrix::diagonal(&[0.7311, 0.2689]).unwrap();
        assert!((vn_entropy(&rho).unwrap() - 0.5822).abs() < 1e-3);
    }

    #[test]
    fn rejects_invalid_states() {
        let nonherm = CMatrix::from_row_slice(2, 2, &[c64(0.5, 0.0), c64(0.1, 0.0), c64(0.0, 0.0), c64(0.5, 0.0)]);
        assert!(matches!(DensityMatrix::new(nonherm), Err(Error::NotHermitian(_))));
        let negative = linalg::diag_real(&[1.5, -0.5]);
        assert!(matches!(DensityMatrix::new(negative), Err(Error::NotPsd(_))));
        let badtrace = linalg::diag_real(&[0.5, 0.4]);
        assert!(matches!(DensityMatrix::new(badtrace), Err(Error::BadTrace(_))));
        assert!(matrix_entropy(&linalg::diag_real(&[1.2, -0.2])).is_err());
    }

    #[test]
    fn tiny_negative_eigenvalues_are_clipped() {
        let rho = DensityMatrix::new(linalg::diag_real(&[1.0 + 5e-11, -5e-11])).unwrap();
        assert!(vn_entropy(&rho).unwrap().abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_examples() {
        let zero = DensityMatrix::basis(2, 0).unwrap();
        let one = DensityMatrix::basis(2, 1).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2);
        let d = rel_entropy(&zero, &mixed).unwrap();
        assert!(d.supported && (d.value - LN_2).abs() < 1e-12);
        assert!(rel_entropy(&mixed, &mixed).unwrap().value.abs() < 1e-12);
        let gibbs = DensityMatrix::diagonal(&[0.731059, 0.268941]).unwrap();
        assert!((rel_entropy(&one, &gibbs).unwrap().value - 1.31326).abs() < 1e-5);
    }

    #[test]
    fn relative_entropy_support_violation_is_flagged() {
        let zero = DensityMatrix::basis(2, 0).unwrap();
        let one = DensityMatrix::basis(2, 1).unwrap();
        let d = rel_entropy(&zero, &one).unwrap();
        assert!(!d.supported);
        assert!(d.value.is_infinite());
    }

    #[test]
    fn tensor_of_basis_states() {
        let t = tensor_state(
            &DensityMatrix::basis(2, 0).unwrap(),
            &DensityMatrix::basis(2, 1).unwrap(),
        )
        .unwrap();
        assert_eq!(t.matrix(), &linalg::matrix_unit(4, 4, 1, 1));
        let mm = tensor_state(&DensityMatrix::maximally_mixed(2), &DensityMatrix::maximally_mixed(2)).unwrap();
        assert!(linalg::max_abs(&(mm.matrix() - DensityMatrix::maximally_mixed(4).matrix())) < 1e-15);
    }

    #[test]
    fn entropy_is_additive_on_products() {
        let a = random_state_seeded(2, 2, 11).unwrap();
        let b = random_state_seeded(2, 2, 12).unwrap();
        let ab = tensor_state(&a, &b).unwrap();
        let diff = vn_entropy(&ab).unwrap() - vn_entropy(&a).unwrap() - vn_entropy(&b).unwrap();
        assert!(diff.abs() <= 1e-9);
    }

    #[test]
    fn random_state_rank_and_determinism() {
        let pure = random_state_seeded(2, 1, 5).unwrap();
        assert!((pure.purity() - 1.0).abs() < 1e-9);
        let full = random_state_seeded(4, 4, 5).unwrap();
        assert!(full.spectrum().unwrap()[0] > 0.0);
        assert_eq!(
            random_state_seeded(3, 2, 99).unwrap(),
            random_state_seeded(3, 2, 99).unwrap()
        );
        assert!(random_state_seeded(2, 3, 1).is_err());
        assert!(random_state_seeded(2, 0, 1).is_err());
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_unitary(5, &mut rng);
        assert!(linalg::unitarity_residual(&u) < 1e-12);
    }
}
