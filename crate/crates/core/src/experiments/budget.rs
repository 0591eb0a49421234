use std::f64::consts::LN_2;

use super::report::ExperimentReport;
use crate::error::{Error, Result};
use crate::qcore::{DensityMatrix, HamiltonianSystem};
use crate::splitting::{asymmetry, split_two};
use crate::symmetry::SymmetryRep;

/// Free-energy budget of `|+><+|` for `H = diag(0, gap)`: the asymmetry part,
/// the covariant part and their ratio to the total.
pub fn qubit_plus_budget(gap: f64, temperature: f64) -> Result<ExperimentReport> {
    if !(gap > 0.0) || !gap.is_finite() {
        return Err(Error::invalid("gap", format!("must be positive and finite, got {gap}")));
    }
    let sys = HamiltonianSystem::diagonal(&[0.0, gap], temperature)?;
    let rep = SymmetryRep::u1(vec![0, 1])?;
    let plus = DensityMatrix::plus();
    let split = split_two(&plus, &sys, &rep)?;
    let r = asymmetry(&plus, &rep)?;
    let fraction = split.covariant_f / split.total;

    let mut report = ExperimentReport::new(
        "qubit_plus_budget",
        &[
            "gap",
            "temperature",
            "asym_energy",
            "covariant_f",
            "total",
            "asymmetry",
            "covariant_fraction",
        ],
    );
    report.param("gap", gap).param("temperature", temperature);
    report.push_row(vec![
        gap,
        temperature,
        split.asym_energy,
        split.covariant_f,
        split.total,
        r,
        fraction,
    ]);
    report.check("asymmetry_is_ln2", (r - LN_2).abs() <= 1e-12, format!("R = {r:.15}"));
    report.check(
        "split_sums_to_total",
        (split.asym_energy + split.covariant_f - split.total).abs() <= 1e-9,
        format!(
            "gap {:.3e}",
            (split.asym_energy + split.covariant_f - split.total).abs()
        ),
    );
    Ok(report)
}
