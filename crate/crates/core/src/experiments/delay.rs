use super::report::ExperimentReport;
use crate::channels::make_delay;
use crate::error::{Error, Result};
use crate::qcore::{DensityMatrix, HamiltonianSystem};
use crate::splitting::{loss_bound_audit, overlap, Tolerances, ORTHOGONALITY_TOL};
use crate::symmetry::{GroupElement, SymmetryRep};

/// Slack allowed in the monotonicity and bound checks of the scan.
pub const SCAN_TOL: f64 = 1e-9;

/// `p = 0, 0.05, ..., 1`.
pub fn default_jitter_grid() -> Vec<f64> {
    (0..=20).map(|k| k as f64 / 20.0).collect()
}

/// Free-energy loss of a two-point delay `(1 - p) delta_0 + p delta_s` over
/// a grid of jitter probabilities, against the distinguishability bound.
pub fn delay_loss_scan(
    grid: &[f64],
    sys: &HamiltonianSystem,
    rep: &SymmetryRep,
    rho: &DensityMatrix,
    s: f64,
) -> Result<ExperimentReport> {
    if grid.is_empty() {
        return Err(Error::invalid("jitter grid", "must not be empty"));
    }
    if let Some(p) = grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::invalid("jitter grid", format!("probability {p} outside [0, 1]")));
    }
    let shifted = rho.conjugate_by(&rep.unitary_at(&GroupElement::Angle(s))?)?;
    let ov = overlap(rho, &shifted)?;
    if !(ov <= ORTHOGONALITY_TOL) {
        return Err(Error::invalid(
            "state",
            format!("not orthogonal to its shift by {s} (overlap {ov:.3e})"),
        ));
    }

    let mut report = ExperimentReport::new("delay_loss_scan", &["p", "c", "bound", "actual_loss"]);
    report
        .param("shift", s)
        .param("temperature", sys.temperature())
        .param("grid", grid.to_vec());
    for &p in grid {
        let c = make_delay(rep, &[0.0, s], &[1.0 - p, p])?;
        let audit = loss_bound_audit(rho, sys, rep, &c, s, Tolerances::default())?;
        let bound = audit.bound.expect("input orthogonality checked above");
        report.push_row(vec![p, audit.c, bound, audit.actual_loss]);
    }

    let worst_bound = report
        .rows
        .iter()
        .map(|r| r[2] - r[3])
        .fold(f64::NEG_INFINITY, f64::max);
    report.check(
        "bound <= loss",
        worst_bound <= SCAN_TOL,
        format!("max(bound - loss) = {worst_bound:.3e}"),
    );

    let mut lower: Vec<(f64, f64)> = report
        .rows
        .iter()
        .filter(|r| r[0] <= 0.5)
        .map(|r| (r[0], r[3]))
        .collect();
    lower.sort_by(|a, b| a.0.total_cmp(&b.0));
    let worst_drop = lower.windows(2).map(|w| w[0].1 - w[1].1).fold(0.0f64, f64::max);
    report.check(
        "loss non-decreasing on [0, 1/2]",
        worst_drop <= SCAN_TOL,
        format!("largest decrease {worst_drop:.3e}"),
    );
    Ok(report)
}
