//! Dense complex matrix helpers.
//!
//! Every matrix function in the crate goes through the Hermitian
//! eigendecomposition provided here; all operators in scope are normal.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix used for states, Hamiltonians, unitaries and Kraus operators.
pub type CMatrix = DMatrix<Complex64>;

const EIGH_MAX_ITER: usize = 100_000;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Square diagonal matrix from real entries.
pub fn diag_real(values: &[f64]) -> CMatrix {
    let d = values.len();
    CMatrix::from_fn(d, d, |i, j| if i == j { c64(values[i], 0.0) } else { c64(0.0, 0.0) })
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// `|i><j|` in a `rows x cols` space.
pub fn matrix_unit(rows: usize, cols: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols);
    m[(i, j)] = c64(1.0, 0.0);
    m
}

/// `|psi><psi|` for a (not necessarily normalized) vector.
pub fn outer(psi: &[Complex64]) -> CMatrix {
    let d = psi.len();
    CMatrix::from_fn(d, d, |i, j| psi[i] * psi[j].conj())
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entrywise deviation between `m` and its adjoint.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(m + m^dagger) / 2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().copied().sum()
}

/// `tr(a b)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let mut acc = c64(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `max |U^dagger U - I|`.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    max_abs(&(u.adjoint() * u - identity(u.nrows())))
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted ascending.
///
/// The input is symmetrized before factorization, so callers are expected
/// to have checked Hermiticity themselves when it matters.
pub fn eigh(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    if !m.is_square() {
        return Err(Error::invalid(
            "matrix",
            format!("expected square matrix, got {}x{}", m.nrows(), m.ncols()),
        ));
    }
    let n = m.nrows();
    if n == 0 {
        return Err(Error::invalid("matrix", "empty matrix"));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical("non-finite matrix entry".into()));
    }
    let eig = SymmetricEigen::try_new(hermitize(m), f64::EPSILON, EIGH_MAX_ITER)
        .ok_or_else(|| Error::Numerical("Hermitian eigendecomposition did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

pub fn eigvalsh(m: &CMatrix) -> Result<Vec<f64>> {
    eigh(m).map(|(v, _)| v)
}

/// `V f(Λ) V^dagger` for Hermitian `m = V Λ V^dagger`.
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> Complex64) -> Result<CMatrix> {
    let (values, vectors) = eigh(m)?;
    Ok(spectral_sum(&values, &vectors, f))
}

pub(crate) fn spectral_sum(values: &[f64], vectors: &CMatrix, f: impl Fn(f64) -> Complex64) -> CMatrix {
    let n = vectors.nrows();
    let mut scaled = vectors.clone();
    for (j, &lam) in values.iter().enumerate() {
        let fl = f(lam);
        for i in 0..n {
            scaled[(i, j)] *= fl;
        }
    }
    scaled * vectors.adjoint()
}

/// Trace norm of a Hermitian matrix, computed from its spectrum.
pub fn trace_norm_hermitian(m: &CMatrix) -> Result<f64> {
    Ok(eigvalsh(m)?.iter().map(|x| x.abs()).sum())
}

/// Groups indices of an ascending list into clusters of values closer than `tol`
/// (relative to the magnitude of the values).
pub fn cluster_levels(sorted: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (k, &v) in sorted.iter().enumerate() {
        match clusters.last_mut() {
            Some(cl) if (v - sorted[*cl.last().unwrap()]).abs() <= tol * v.abs().max(1.0) => cl.push(k),
            _ => clusters.push(vec![k]),
        }
    }
    clusters
}

/// Row-major flattening, used for superoperator columns.
pub(crate) fn vec_row_major(m: &CMatrix) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigh_reconstructs_and_sorts() {
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[
                c64(2.0, 0.0),
                c64(0.5, -0.25),
                c64(0.0, 1.0),
                c64(0.5, 0.25),
                c64(-1.0, 0.0),
                c64(0.3, 0.0),
                c64(0.0, -1.0),
                c64(0.3, 0.0),
                c64(0.5, 0.0),
            ],
        );
        let (vals, vecs) = eigh(&m).unwrap();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let rebuilt = spectral_sum(&vals, &vecs, |x| c64(x, 0.0));
        assert!(max_abs(&(rebuilt - &m)) < 1e-12);
        assert!(unitarity_residual(&vecs) < 1e-12);
    }

    #[test]
    fn eigh_rejects_non_square() {
        assert!(eigh(&CMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn clusters_degenerate_levels() {
        let cl = cluster_levels(&[0.0, 1e-12, 1.0, 2.0, 2.0], 1e-9);
        assert_eq!(cl, vec![vec![0, 1], vec![2], vec![3, 4]]);
    }

    #[test]
    fn trace_norm_of_diagonal() {
        let m = diag_real(&[0.5, -0.25, 0.0]);
        assert!((trace_norm_hermitian(&m).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn trace_product_matches_explicit() {
        let a = CMatrix::from_fn(3, 3, |i, j| c64(i as f64 + 1.0, j as f64 - 1.0));
        let b = CMatrix::from_fn(3, 3, |i, j| c64((i * j) as f64, 0.5));
        let t = trace(&(&a * &b));
        assert!((trace_product(&a, &b) - t).norm() < 1e-12);
    }
}
