use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::report::ExperimentReport;
use crate::error::{Error, Result};
use crate::qcore::{free_energy, random_hermitian, random_state, tensor_state, DensityMatrix, HamiltonianSystem};
use crate::splitting::asymmetry;
use crate::symmetry::{haar_average, haar_average_operator, SymmetryRep};

/// Largest local dimension in a sweep.
pub const MAX_LOCAL_DIM: usize = 4;
/// Tolerance on negative slack.
pub const SLACK_TOL: f64 = 1e-9;

/// Slacks of one bipartite trial under the joint rep `U ⊗ V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSlack {
    /// `F(avg(rho ⊗ sigma)) - F(rho_bar) - F(sigma_bar)`.
    pub free_energy: f64,
    /// `R(rho) + R(sigma) - R_joint(rho ⊗ sigma)`.
    pub asymmetry: f64,
}

/// Superadditivity slacks of the covariant free energy and subadditivity
/// slack of the asymmetry for a product state.
pub fn pair_slack(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    sys_a: &HamiltonianSystem,
    sys_b: &HamiltonianSystem,
    rep_a: &SymmetryRep,
    rep_b: &SymmetryRep,
) -> Result<PairSlack> {
    let joint_sys = sys_a.compose(sys_b)?;
    let joint_rep = rep_a.joint(rep_b)?;
    let product = tensor_state(rho, sigma)?;
    let left = free_energy(&haar_average(&joint_rep, &product)?, &joint_sys)?;
    let right = free_energy(&haar_average(rep_a, rho)?, sys_a)? + free_energy(&haar_average(rep_b, sigma)?, sys_b)?;
    let r_joint = asymmetry(&product, &joint_rep)?;
    Ok(PairSlack {
        free_energy: left - right,
        asymmetry: asymmetry(rho, rep_a)? + asymmetry(sigma, rep_b)? - r_joint,
    })
}

/// Slack of `|+> ⊗ |+>` under `H = diag(0, gap)` on each qubit.
pub fn plus_pair_slack(gap: f64, temperature: f64) -> Result<PairSlack> {
    let sys = HamiltonianSystem::diagonal(&[0.0, gap], temperature)?;
    let rep = SymmetryRep::u1(vec![0, 1])?;
    let plus = DensityMatrix::plus();
    pair_slack(&plus, &plus, &sys, &sys, &rep, &rep)
}

/// Random local system: integer weights in `0..=3`, a Hamiltonian commuting
/// with them, and a temperature in `[0.2, 3]`.
fn random_local<R: Rng + ?Sized>(
    dim: usize,
    temperature: f64,
    rng: &mut R,
) -> Result<(HamiltonianSystem, SymmetryRep)> {
    let weights: Vec<i64> = (0..dim).map(|_| rng.random_range(0..=3)).collect();
    let rep = SymmetryRep::u1(weights)?;
    let h = haar_average_operator(&rep, &random_hermitian(dim, rng))?;
    Ok((HamiltonianSystem::new(h, temperature)?, rep))
}

fn run_trial(seed: u64, trial: u64, dims: &[usize]) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let da = dims[rng.random_range(0..dims.len())];
    let db = dims[rng.random_range(0..dims.len())];
    let t = rng.random_range(0.2..3.0);
    let (sys_a, rep_a) = random_local(da, t, &mut rng)?;
    let (sys_b, rep_b) = random_local(db, t, &mut rng)?;
    let rank_a = rng.random_range(1..=da);
    let rank_b = rng.random_range(1..=db);
    let rho = random_state(da, rank_a, &mut rng)?;
    let sigma = random_state(db, rank_b, &mut rng)?;
    let s = pair_slack(&rho, &sigma, &sys_a, &sys_b, &rep_a, &rep_b)?;
    Ok(vec![trial as f64, da as f64, db as f64, t, s.free_energy, s.asymmetry])
}

/// Random bipartite trials of covariant free-energy superadditivity and
/// asymmetry subadditivity; trial `k` uses stream `k` of the seeded generator.
pub fn superadditivity_sweep(trials: usize, dims: &[usize], seed: u64) -> Result<ExperimentReport> {
    if trials == 0 {
        return Err(Error::invalid("trials", "must be positive"));
    }
    if dims.is_empty() || dims.iter().any(|&d| d == 0 || d > MAX_LOCAL_DIM) {
        return Err(Error::invalid(
            "dims",
            format!("each must be in 1..={MAX_LOCAL_DIM}, got {dims:?}"),
        ));
    }
    let rows: Vec<Vec<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|k| run_trial(seed, k, dims))
        .collect::<Result<_>>()?;

    let mut report = ExperimentReport::new(
        "superadditivity_sweep",
        &["trial", "dim_a", "dim_b", "temperature", "slack_f", "slack_r"],
    );
    report
        .param("trials", trials as u64)
        .param("dims", dims.iter().map(|&d| d as u64).collect::<Vec<_>>())
        .param("seed", seed);
    for row in rows {
        report.push_row(row);
    }
    let min_f = report.rows.iter().map(|r| r[4]).fold(f64::INFINITY, f64::min);
    let min_r = report.rows.iter().map(|r| r[5]).fold(f64::INFINITY, f64::min);
    report.note(format!("min slack_f = {min_f:.6e}"));
    report.note(format!("min slack_r = {min_r:.6e}"));
    report.check(
        "covariant free energy superadditive",
        min_f >= -SLACK_TOL,
        format!("min slack {min_f:.3e}"),
    );
    report.check(
        "asymmetry subadditive",
        min_r >= -SLACK_TOL,
        format!("min slack {min_r:.3e}"),
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn plus_pair_has_half_bit_slack() {
        for t in [0.5, 1.0, 4.0] {
            let s = plus_pair_slack(1.0, t).unwrap();
            assert!((s.free_energy - t * LN_2 / 2.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn diagonal_states_have_zero_slack() {
        let sys = HamiltonianSystem::diagonal(&[0.0, 1.0, 1.5], 0.8).unwrap();
        let rep = SymmetryRep::u1(vec![0, 1, 2]).unwrap();
        let rho = DensityMatrix::diagonal(&[0.2, 0.5, 0.3]).unwrap();
        let s = pair_slack(&rho, &rho, &sys, &sys, &rep, &rep).unwrap();
        assert!(s.free_energy.abs() <= 1e-12);
        assert!(s.asymmetry.abs() <= 1e-12);
    }

    #[test]
    fn sweep_is_reproducible_and_passes() {
        let a = superadditivity_sweep(30, &[2, 3, 4], 7).unwrap();
        let b = superadditivity_sweep(30, &[2, 3, 4], 7).unwrap();
        assert_eq!(a, b);
        assert!(a.all_passed());
    }

    #[test]
    fn rejects_large_dims() {
        assert!(superadditivity_sweep(3, &[5], 0).is_err());
        assert!(superadditivity_sweep(0, &[2], 0).is_err());
    }
}
