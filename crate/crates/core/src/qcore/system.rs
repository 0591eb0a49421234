use super::linalg::{self, CMatrix};
use super::state::{vn_entropy, DensityMatrix};
use crate::error::{Error, Result};

/// Hermiticity tolerance for Hamiltonians.
pub const HAMILTONIAN_TOL: f64 = 1e-10;

/// A Hamiltonian at a fixed bath temperature (`k_B = 1`), with its
/// spectral data and Gibbs state cached.
#[derive(Debug, Clone)]
pub struct HamiltonianSystem {
    hamiltonian: CMatrix,
    temperature: f64,
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
    gibbs: DensityMatrix,
    /// `T ln Z`, the constant that zeroes `F` at the Gibbs state.
    offset: f64,
}

impl HamiltonianSystem {
    pub fn new(hamiltonian: CMatrix, temperature: f64) -> Result<Self> {
        check_temperature(temperature)?;
        check_hamiltonian(&hamiltonian)?;
        let h = linalg::hermitize(&hamiltonian);
        let (eigenvalues, eigenvectors) = linalg::eigh(&h)?;
        let gibbs = gibbs_from_spectrum(&eigenvalues, &eigenvectors, temperature)?;
        let offset = temperature * log_partition(&eigenvalues, temperature);
        Ok(Self {
            hamiltonian: h,
            temperature,
            eigenvalues,
            eigenvectors,
            gibbs,
            offset,
        })
    }

    /// Diagonal Hamiltonian with the given energies.
    pub fn diagonal(energies: &[f64], temperature: f64) -> Result<Self> {
        Self::new(linalg::diag_real(energies), temperature)
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn hamiltonian(&self) -> &CMatrix {
        &self.hamiltonian
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn gibbs(&self) -> &DensityMatrix {
        &self.gibbs
    }

    /// Same Hamiltonian at another temperature.
    pub fn at_temperature(&self, temperature: f64) -> Result<Self> {
        Self::new(self.hamiltonian.clone(), temperature)
    }

    /// Spectral projections onto the energy eigenspaces, grouping levels
    /// that agree within `tol` (relative).
    pub fn energy_projections(&self, tol: f64) -> Vec<CMatrix> {
        linalg::cluster_levels(&self.eigenvalues, tol)
            .into_iter()
            .map(|cluster| {
                let d = self.dim();
                let mut p = CMatrix::zeros(d, d);
                for k in cluster {
                    let v = self.eigenvectors.column(k);
                    p += v * v.adjoint();
                }
                p
            })
            .collect()
    }

    /// `H_A ⊗ I + I ⊗ H_B` at this system's temperature.
    pub fn compose(&self, other: &HamiltonianSystem) -> Result<Self> {
        let ia = linalg::identity(self.dim());
        let ib = linalg::identity(other.dim());
        let h = linalg::kron(&self.hamiltonian, &ib) + linalg::kron(&ia, &other.hamiltonian);
        Self::new(h, self.temperature)
    }

    pub(crate) fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }
}

fn check_temperature(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::invalid(
            "temperature",
            format!("must be positive and finite, got {t}"),
        ));
    }
    Ok(())
}

fn check_hamiltonian(h: &CMatrix) -> Result<()> {
    if !h.is_square() || h.nrows() == 0 {
        return Err(Error::invalid(
            "hamiltonian",
            format!("expected non-empty square matrix, got {}x{}", h.nrows(), h.ncols()),
        ));
    }
    let dev = linalg::hermitian_deviation(h);
    if !(dev <= HAMILTONIAN_TOL) {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

/// `ln tr exp(-H/T)`, shifted by the ground energy so the largest Boltzmann factor is 1.
fn log_partition(values: &[f64], t: f64) -> f64 {
    let e0 = values[0];
    values.iter().map(|&e| (-(e - e0) / t).exp()).sum::<f64>().ln() - e0 / t
}

fn gibbs_from_spectrum(values: &[f64], vectors: &CMatrix, t: f64) -> Result<DensityMatrix> {
    let ln_z = log_partition(values, t);
    let log_values = values.iter().map(|&e| -e / t - ln_z).collect();
    DensityMatrix::from_log_spectrum(log_values, vectors.clone())
}

/// Gibbs state `exp(-H/T) / tr exp(-H/T)`.
pub fn gibbs_state(hamiltonian: &CMatrix, temperature: f64) -> Result<DensityMatrix> {
    check_temperature(temperature)?;
    check_hamiltonian(hamiltonian)?;
    let (values, vectors) = linalg::eigh(hamiltonian)?;
    gibbs_from_spectrum(&values, &vectors, temperature)
}

/// Free energy relative to the Gibbs state:
/// `tr(rho H) - T S(rho) - tr(gamma H) + T S(gamma)`.
pub fn free_energy(rho: &DensityMatrix, sys: &HamiltonianSystem) -> Result<f64> {
    sys.check_dim(rho.dim())?;
    let energy = rho.expectation(&sys.hamiltonian);
    Ok(energy - sys.temperature * vn_entropy(rho)? + sys.offset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::c64;
    use crate::qcore::state::rel_entropy;

    fn qubit(t: f64) -> HamiltonianSystem {
        HamiltonianSystem::diagonal(&[0.0, 1.0], t).unwrap()
    }

    #[test]
    fn gibbs_of_qubit() {
        // 1/(1+e^-1) and e^-1/(1+e^-1)
        let g0 = 1.0 / (1.0 + (-1.0f64).exp());
        let g = gibbs_state(&linalg::diag_real(&[0.0, 1.0]), 1.0).unwrap();
        assert!((g.matrix()[(0, 0)].re - g0).abs() < 1e-12);
        assert!((g.matrix()[(1, 1)].re - (1.0 - g0)).abs() < 1e-12);
        assert!((g0 - 0.731059).abs() < 1e-6);
        assert!(g.matrix()[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn gibbs_of_degenerate_hamiltonian_is_maximally_mixed() {
        for t in [0.1, 1.0, 50.0] {
            let g = gibbs_state(&CMatrix::zeros(2, 2), t).unwrap();
            assert!(linalg::max_abs(&(g.matrix() - DensityMatrix::maximally_mixed(2).matrix())) < 1e-15);
        }
    }

    #[test]
    fn gibbs_at_high_temperature() {
        let g = gibbs_state(&linalg::diag_real(&[0.0, 1.0]), 1000.0).unwrap();
        for k in 0..2 {
            assert!((g.matrix()[(k, k)].re - 0.5).abs() < 1e-3);
        }
    }

    #[test]
    fn gibbs_rejects_bad_temperature() {
        let h = linalg::diag_real(&[0.0, 1.0]);
        assert!(gibbs_state(&h, 0.0).is_err());
        assert!(gibbs_state(&h, -1.0).is_err());
        assert!(HamiltonianSystem::new(h, f64::NAN).is_err());
    }

    #[test]
    fn gibbs_is_shift_invariant() {
        let h = CMatrix::from_row_slice(2, 2, &[c64(0.3, 0.0), c64(0.2, 0.1), c64(0.2, -0.1), c64(1.1, 0.0)]);
        let shifted = &h + linalg::identity(2).scale(17.5);
        let a = gibbs_state(&h, 0.7).unwrap();
        let b = gibbs_state(&shifted, 0.7).unwrap();
        assert!(linalg::max_abs(&(a.matrix() - b.matrix())) <= 1e-10);
    }

    #[test]
    fn free_energy_examples() {
        let sys = qubit(1.0);
        assert!(free_energy(sys.gibbs(), &sys).unwrap().abs() < 1e-12);

        // T D(|1><1| || gamma) = -ln gamma_11 = 1 + ln(1 + e^-1)
        let excited = DensityMatrix::basis(2, 1).unwrap();
        let expected = 1.0 + (1.0 + (-1.0f64).exp()).ln();
        assert!((free_energy(&excited, &sys).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 1.31326).abs() < 1e-5);

        // 0.5 - 0 - 0.268941 + 0.582203
        let plus = DensityMatrix::plus();
        assert!((free_energy(&plus, &sys).unwrap() - 0.81326).abs() < 1e-5);
    }

    #[test]
    fn free_energy_matches_relative_entropy_oracle() {
        let sys = qubit(0.8);
        let rho = crate::qcore::random_state_seeded(2, 2, 4).unwrap();
        let f = free_energy(&rho, &sys).unwrap();
        let d = rel_entropy(&rho, sys.gibbs()).unwrap();
        assert!((f - sys.temperature() * d.value).abs() <= 1e-9);
    }

    #[test]
    fn free_energy_dimension_mismatch() {
        let sys = qubit(1.0);
        assert!(matches!(
            free_energy(&DensityMatrix::maximally_mixed(3), &sys),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn eigendecomposition_reconstructs_hamiltonian() {
        let h = CMatrix::from_row_slice(2, 2, &[c64(0.3, 0.0), c64(0.2, 0.1), c64(0.2, -0.1), c64(1.1, 0.0)]);
        let sys = HamiltonianSystem::new(h.clone(), 1.0).unwrap();
        let rebuilt = linalg::spectral_sum(sys.eigenvalues(), sys.eigenvectors(), |e| c64(e, 0.0));
        assert!(linalg::max_abs(&(rebuilt - h)) <= 1e-9);
    }
}
