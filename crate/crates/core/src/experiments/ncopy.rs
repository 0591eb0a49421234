use std::f64::consts::LN_2;

use super::report::ExperimentReport;
use crate::error::{Error, Result};
use crate::qcore::linalg::{self, c64, CMatrix};
use crate::qcore::{entropy_term, free_energy, shannon_entropy, DensityMatrix, HamiltonianSystem};

/// Largest number of qubits accepted.
pub const MAX_QUBITS: usize = 12;
/// Default ratio `T / gap`.
pub const DEFAULT_T_OVER_GAP: f64 = 100.0;

/// `n` qubits with `H = E sum_j sigma_z^(j)` at temperature `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NCopyConfig {
    pub n: usize,
    pub gap: f64,
    pub temperature: f64,
}

impl NCopyConfig {
    /// `gap = 1` and `T = 100`.
    pub fn new(n: usize) -> Self {
        Self {
            n,
            gap: 1.0,
            temperature: DEFAULT_T_OVER_GAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_QUBITS {
            return Err(Error::invalid(
                "n",
                format!("must be in 1..={MAX_QUBITS}, got {}", self.n),
            ));
        }
        if !(self.gap > 0.0) || !self.gap.is_finite() {
            return Err(Error::invalid(
                "gap",
                format!("must be positive and finite, got {}", self.gap),
            ));
        }
        if !(self.temperature > 0.0) || !self.temperature.is_finite() {
            return Err(Error::invalid(
                "temperature",
                format!("must be positive and finite, got {}", self.temperature),
            ));
        }
        Ok(())
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
}

/// `H(B_{n,1/2})` from the binomial coefficients.
pub fn binomial_entropy(n: usize) -> f64 {
    let scale = 0.5f64.powi(n as i32);
    let probs: Vec<f64> = (0..=n).map(|k| binomial(n, k) as f64 * scale).collect();
    shannon_entropy(&probs)
}

/// `|+>^{⊗n}` built by repeated Kronecker products.
fn plus_product(n: usize) -> CMatrix {
    let plus = CMatrix::from_element(2, 1, c64(std::f64::consts::FRAC_1_SQRT_2, 0.0));
    (1..n).fold(plus.clone(), |acc, _| linalg::kron(&acc, &plus))
}

/// Entropy and populations of the time-averaged `|+>^{⊗n}`, diagonalizing
/// each Hamming-weight block separately.
fn averaged_blocks(n: usize) -> Result<(f64, Vec<f64>)> {
    let psi = plus_product(n);
    let mut entropy = 0.0;
    let mut populations = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let idx: Vec<usize> = (0..psi.nrows()).filter(|i| i.count_ones() as usize == k).collect();
        let v = CMatrix::from_fn(idx.len(), 1, |r, _| psi[(idx[r], 0)]);
        let block = &v * v.adjoint();
        populations.push(linalg::trace(&block).re);
        entropy += linalg::eigvalsh(&block)?.into_iter().map(entropy_term).sum::<f64>();
    }
    Ok((entropy, populations))
}

/// Column layout of [`ncopy_binomial`] and [`ncopy_sweep`].
pub const NCOPY_COLUMNS: [&str; 10] = [
    "n",
    "s_avg",
    "binom_entropy",
    "bound_nln2_minus_log",
    "work_infinite_T",
    "log_bound",
    "asym_energy",
    "covariant_f",
    "total",
    "asym_fraction",
];

fn ncopy_row(cfg: &NCopyConfig, report: &mut ExperimentReport) -> Result<()> {
    cfg.validate()?;
    let n = cfg.n;
    let nf = n as f64;
    let (s_avg, populations) = averaged_blocks(n)?;
    let s_binom = binomial_entropy(n);
    let log_bound = (nf + 1.0).ln();
    let bound = nf * LN_2 - log_bound;
    let work = nf * LN_2 - s_avg;

    // sigma_z = diag(1, -1): Hamming weight k has energy E (n - 2k)
    let single = HamiltonianSystem::diagonal(&[cfg.gap, -cfg.gap], cfg.temperature)?;
    let total = nf * free_energy(&DensityMatrix::plus(), &single)?;
    let offset = nf * free_energy(&DensityMatrix::basis(2, 0)?, &single)? - nf * cfg.gap;
    let energy: f64 = populations
        .iter()
        .enumerate()
        .map(|(k, p)| p * cfg.gap * (nf - 2.0 * k as f64))
        .sum();
    let covariant_f = energy - cfg.temperature * s_avg + offset;
    let asym_energy = cfg.temperature * s_avg;

    report.push_row(vec![
        nf,
        s_avg,
        s_binom,
        bound,
        work,
        log_bound,
        asym_energy,
        covariant_f,
        total,
        asym_energy / total,
    ]);
    let tag = format!("n={n}");
    report.check(
        &format!("{tag}: block path matches binomial formula"),
        (s_avg - s_binom).abs() <= 1e-9,
        format!("|diff| = {:.3e}", (s_avg - s_binom).abs()),
    );
    report.check(
        &format!("{tag}: S(avg) <= ln(n+1)"),
        s_avg <= log_bound + 1e-12,
        format!("{s_avg:.12} vs {log_bound:.12}"),
    );
    report.check(
        &format!("{tag}: infinite-T work >= n ln 2 - ln(n+1)"),
        work >= bound - 1e-12,
        format!("{work:.12} vs {bound:.12}"),
    );
    report.check(
        &format!("{tag}: split sums to total"),
        (asym_energy + covariant_f - total).abs() <= 1e-9 * total.abs().max(1.0),
        format!("|diff| = {:.3e}", (asym_energy + covariant_f - total).abs()),
    );
    Ok(())
}

fn ncopy_report(cfg: &NCopyConfig) -> ExperimentReport {
    let mut report = ExperimentReport::new("ncopy_binomial", &NCOPY_COLUMNS);
    report.param("gap", cfg.gap).param("temperature", cfg.temperature);
    report
}

/// Time-averaged entropy of `|+>^{⊗n}` against the binomial entropy and the
/// logarithmic bounds, with the free-energy split at `cfg.temperature`.
pub fn ncopy_binomial(cfg: &NCopyConfig) -> Result<ExperimentReport> {
    let mut report = ncopy_report(cfg);
    report.param("n", cfg.n as u64);
    ncopy_row(cfg, &mut report)?;
    Ok(report)
}

/// [`ncopy_binomial`] for every `n` from 1 to `cfg.n`.
pub fn ncopy_sweep(cfg: &NCopyConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let mut report = ncopy_report(cfg);
    report.param("n_max", cfg.n as u64);
    for n in 1..=cfg.n {
        ncopy_row(&NCopyConfig { n, ..*cfg }, &mut report)?;
    }
    Ok(report)
}
