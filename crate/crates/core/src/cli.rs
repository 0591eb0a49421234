//! Command-line front end.
//!
//! Exit codes: 0 success, 2 invalid input, 3 certification failure,
//! 4 numerical failure or a failed experiment check.

use std::f64::consts::PI;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::channels::{covariance_residual, passivity_residual, twirl, QuantumChannel, CP_TOL, TP_TOL};
use crate::error::{Error, ErrorKind, Result};
use crate::experiments::{
    default_jitter_grid, delay_loss_scan, ncopy_binomial, ncopy_sweep, superadditivity_sweep, ExperimentReport,
    NCopyConfig, DEFAULT_T_OVER_GAP,
};
use crate::io::{self, ChannelSpec};
use crate::qcore::linalg;
use crate::qcore::{DensityMatrix, HamiltonianSystem};
use crate::splitting::{loss_bound_audit, monotonicity_audit, split_chain, split_two, MeasureChain, Tolerances};
use crate::symmetry::{GroupMeasure, SymmetryRep, CHAIN_TOL};

#[derive(Debug, Parser)]
#[command(
    name = "freesplit",
    version,
    about = "Free-energy splitting under time-translation symmetry"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Inputs {
    /// State file
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// System file (Hamiltonian and temperature)
    #[arg(long)]
    pub system: Option<PathBuf>,
    /// Representation file
    #[arg(long)]
    pub rep: Option<PathBuf>,
    /// Measure files, in chain order
    #[arg(long)]
    pub measure: Vec<PathBuf>,
    /// Witness measure files, one per chain link
    #[arg(long)]
    pub witness: Vec<PathBuf>,
    /// Channel file (Kraus operators or a generator spec)
    #[arg(long)]
    pub channel: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Output {
    /// Write results here instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format; tables default to csv, everything else to json
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct Tols {
    /// Covariance residual tolerance
    #[arg(long, default_value_t = crate::channels::COVARIANCE_TOL)]
    pub tol_cov: f64,
    /// Passivity residual tolerance
    #[arg(long, default_value_t = crate::channels::PASSIVITY_TOL)]
    pub tol_pass: f64,
}

impl Tols {
    fn get(&self) -> Result<Tolerances> {
        for (name, v) in [("--tol-cov", self.tol_cov), ("--tol-pass", self.tol_pass)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::invalid(name, format!("must be a non-negative number, got {v}")));
            }
        }
        Ok(Tolerances {
            covariance: self.tol_cov,
            passivity: self.tol_pass,
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Asymmetry and covariant parts of the free energy
    Split {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        output: Output,
    },
    /// Free-energy terms along a measure chain
    Chain {
        #[command(flatten)]
        inputs: Inputs,
        /// Shift of the default three-step chain
        #[arg(long, allow_negative_numbers = true)]
        shift: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Monotonicity audit of a channel, with a loss-bound audit when --shift is given
    Audit {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, allow_negative_numbers = true)]
        shift: Option<f64>,
        #[command(flatten)]
        tols: Tols,
        #[command(flatten)]
        output: Output,
    },
    /// Twirl a channel over a measure (Haar by default)
    Twirl {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        output: Output,
    },
    /// Time-averaged entropy of n copies of |+>
    Ncopy {
        #[arg(long)]
        n: usize,
        /// Energy scale E in H = E sum_j sigma_z
        #[arg(long, default_value_t = 1.0)]
        gap: f64,
        /// Temperature (default 100 times the gap)
        #[arg(long)]
        temperature: Option<f64>,
        /// Report every n' from 1 to n
        #[arg(long)]
        sweep: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Random superadditivity trials
    Superadd {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Local dimensions to draw from
        #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 3, 4])]
        dims: Vec<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Loss of free energy under a jittered delay
    DelayScan {
        #[command(flatten)]
        inputs: Inputs,
        /// Delay shift s (default pi)
        #[arg(long, allow_negative_numbers = true)]
        shift: Option<f64>,
        /// Jitter probabilities p to scan
        #[arg(long, value_delimiter = ',')]
        probs: Vec<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Parse inputs and report channel residuals
    Validate {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        tols: Tols,
        #[command(flatten)]
        output: Output,
    },
}

/// Result of a command before formatting.
enum Outcome {
    Object(Value),
    Table(ExperimentReport),
}

struct Success {
    outcome: Outcome,
    /// Reasons to exit with a failure code after writing the output.
    failures: Vec<String>,
    failure_code: i32,
}

impl Success {
    fn ok(outcome: Outcome) -> Self {
        Self {
            outcome,
            failures: Vec::new(),
            failure_code: 0,
        }
    }
}

fn required<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    p.as_deref()
        .ok_or_else(|| Error::invalid(flag, "is required for this command"))
}

struct Loaded {
    state: Option<DensityMatrix>,
    system: Option<HamiltonianSystem>,
    rep: Option<SymmetryRep>,
    measures: Vec<GroupMeasure>,
    witnesses: Vec<GroupMeasure>,
    channel: Option<QuantumChannel>,
}

/// Parses every referenced file before any computation starts.
fn load_inputs(inputs: &Inputs) -> Result<Loaded> {
    let state = inputs
        .state
        .as_deref()
        .map(|p| io::load(p, io::parse_state))
        .transpose()?;
    let system = inputs
        .system
        .as_deref()
        .map(|p| io::load(p, io::parse_system))
        .transpose()?;
    let rep = inputs.rep.as_deref().map(|p| io::load(p, io::parse_rep)).transpose()?;
    if !(inputs.measure.is_empty() && inputs.witness.is_empty()) && rep.is_none() {
        return Err(Error::invalid("--rep", "is required to read measures"));
    }
    let read_measures = |paths: &[PathBuf]| -> Result<Vec<GroupMeasure>> {
        paths
            .iter()
            .map(|p| io::load(p, |t| io::parse_measure(t, rep.as_ref().unwrap())))
            .collect()
    };
    let measures = read_measures(&inputs.measure)?;
    let witnesses = read_measures(&inputs.witness)?;
    let channel = match inputs.channel.as_deref() {
        None => None,
        Some(p) => {
            let spec: ChannelSpec = io::load(p, io::parse_channel_spec)?;
            Some(io::load(p, |_| spec.build(system.as_ref(), rep.as_ref()))?)
        }
    };
    if let (Some(s), Some(r)) = (&system, &rep) {
        if s.dim() != r.dim() {
            return Err(Error::invalid(
                "--rep",
                format!("dimension {} does not match the system ({})", r.dim(), s.dim()),
            ));
        }
    }
    if let (Some(rho), Some(s)) = (&state, &system) {
        if rho.dim() != s.dim() {
            return Err(Error::invalid(
                "--state",
                format!("dimension {} does not match the system ({})", rho.dim(), s.dim()),
            ));
        }
    }
    Ok(Loaded {
        state,
        system,
        rep,
        measures,
        witnesses,
        channel,
    })
}

fn need<'a, T>(x: &'a Option<T>, flag: &str) -> Result<&'a T> {
    x.as_ref()
        .ok_or_else(|| Error::invalid(flag, "is required for this command"))
}

fn build_chain(l: &Loaded, rep: &SymmetryRep, shift: Option<f64>) -> Result<MeasureChain> {
    if l.measures.is_empty() {
        if !l.witnesses.is_empty() {
            return Err(Error::invalid("--witness", "given without --measure"));
        }
        return if rep.is_u1() {
            MeasureChain::three_step(rep, shift.unwrap_or(PI))
        } else {
            MeasureChain::two_step(rep)
        };
    }
    let chain = MeasureChain::new(rep, l.measures.clone(), l.witnesses.clone(), "custom", CHAIN_TOL)?;
    if !chain.verified() {
        let worst = chain.residuals().iter().cloned().fold(0.0, f64::max);
        return Err(Error::invalid(
            "--witness",
            format!("chain links not reproduced by the witnesses (largest residual {worst:.3e})"),
        ));
    }
    Ok(chain)
}

fn to_value<T: serde::Serialize>(x: &T) -> Result<Value> {
    serde_json::to_value(x).map_err(|e| Error::Numerical(e.to_string()))
}

fn report_outcome(report: ExperimentReport) -> Success {
    let failures: Vec<String> = report
        .failed_checks()
        .map(|c| format!("check failed: {} ({})", c.name, c.detail))
        .collect();
    Success {
        outcome: Outcome::Table(report),
        failure_code: if failures.is_empty() { 0 } else { 4 },
        failures,
    }
}

fn execute(command: &Command) -> Result<Success> {
    match command {
        Command::Split { inputs, .. } => {
            let l = load_inputs(inputs)?;
            let s = split_two(
                need(&l.state, "--state")?,
                need(&l.system, "--system")?,
                need(&l.rep, "--rep")?,
            )?;
            Ok(Success::ok(Outcome::Object(to_value(&s)?)))
        }
        Command::Chain { inputs, shift, .. } => {
            let l = load_inputs(inputs)?;
            let rep = need(&l.rep, "--rep")?;
            let chain = build_chain(&l, rep, *shift)?;
            let split = split_chain(need(&l.state, "--state")?, need(&l.system, "--system")?, rep, &chain)?;
            let mut v = to_value(&split)?;
            v["link_residuals"] = to_value(&chain.residuals())?;
            Ok(Success::ok(Outcome::Object(v)))
        }
        Command::Audit {
            inputs, shift, tols, ..
        } => {
            let tol = tols.get()?;
            required(&inputs.channel, "--channel")?;
            let l = load_inputs(inputs)?;
            let (rho, sys, rep) = (
                need(&l.state, "--state")?,
                need(&l.system, "--system")?,
                need(&l.rep, "--rep")?,
            );
            let c = need(&l.channel, "--channel")?;
            let chain = build_chain(&l, rep, *shift)?;
            let report = monotonicity_audit(rho, sys, rep, c, &chain, tol)?;
            let mut failures: Vec<String> = report.violations.iter().map(|v| format!("monotonicity: {v}")).collect();
            let mut v = to_value(&report)?;
            if let Some(s) = shift {
                let lb = loss_bound_audit(rho, sys, rep, c, *s, tol)?;
                if let Some(b) = lb.bound {
                    if lb.actual_loss < b - 1e-9 {
                        failures.push(format!("loss {} below bound {}", lb.actual_loss, b));
                    }
                }
                v["loss_bound"] = to_value(&lb)?;
            }
            Ok(Success {
                outcome: Outcome::Object(v),
                failure_code: if failures.is_empty() { 0 } else { 4 },
                failures,
            })
        }
        Command::Twirl { inputs, .. } => {
            required(&inputs.channel, "--channel")?;
            let l = load_inputs(inputs)?;
            let rep = need(&l.rep, "--rep")?;
            let c = need(&l.channel, "--channel")?;
            let mu = match l.measures.as_slice() {
                [] => GroupMeasure::Haar,
                [m] => m.clone(),
                _ => return Err(Error::invalid("--measure", "twirl takes at most one measure")),
            };
            let before = covariance_residual(c, rep)?;
            let t = twirl(c, rep, &mu)?;
            let after = covariance_residual(&t, rep)?;
            let mut v = to_value(&io::channel_to_json(&t))?;
            v["covariance_residual_before"] = json!(before);
            v["covariance_residual_after"] = json!(after);
            v["measure"] = json!(if mu.is_haar() { "haar" } else { "atoms" });
            Ok(Success::ok(Outcome::Object(v)))
        }
        Command::Ncopy {
            n,
            gap,
            temperature,
            sweep,
            ..
        } => {
            let cfg = NCopyConfig {
                n: *n,
                gap: *gap,
                temperature: temperature.unwrap_or(DEFAULT_T_OVER_GAP * gap),
            };
            let report = if *sweep {
                ncopy_sweep(&cfg)?
            } else {
                ncopy_binomial(&cfg)?
            };
            Ok(report_outcome(report))
        }
        Command::Superadd { trials, seed, dims, .. } => {
            Ok(report_outcome(superadditivity_sweep(*trials, dims, *seed)?))
        }
        Command::DelayScan {
            inputs, shift, probs, ..
        } => {
            let l = load_inputs(inputs)?;
            let sys = match l.system {
                Some(s) => s,
                None => HamiltonianSystem::diagonal(&[0.0, 1.0], 1.0)?,
            };
            let rep = match l.rep {
                Some(r) => r,
                None => SymmetryRep::u1(vec![0, 1])?,
            };
            let rho = match l.state {
                Some(r) => r,
                None => DensityMatrix::uniform_superposition(rep.dim()),
            };
            let grid = if probs.is_empty() {
                default_jitter_grid()
            } else {
                probs.clone()
            };
            Ok(report_outcome(delay_loss_scan(
                &grid,
                &sys,
                &rep,
                &rho,
                shift.unwrap_or(PI),
            )?))
        }
        Command::Validate { inputs, tols, .. } => {
            let tol = tols.get()?;
            let l = load_inputs(inputs)?;
            let mut v = json!({});
            let mut loaded = Vec::new();
            for (flag, present) in [
                ("state", l.state.is_some()),
                ("system", l.system.is_some()),
                ("rep", l.rep.is_some()),
                ("channel", l.channel.is_some()),
            ] {
                if present {
                    loaded.push(flag);
                }
            }
            loaded.extend(std::iter::repeat_n("measure", l.measures.len()));
            loaded.extend(std::iter::repeat_n("witness", l.witnesses.len()));
            v["loaded"] = json!(loaded);
            if let Some(rep) = &l.rep {
                if let Some(sys) = &l.system {
                    v["rep_commutation_residual"] = json!(rep.commutation_residual(sys.hamiltonian())?);
                }
                if !l.measures.is_empty() {
                    let chain = MeasureChain::new(rep, l.measures.clone(), l.witnesses.clone(), "custom", CHAIN_TOL)?;
                    v["chain_residuals"] = to_value(&chain.residuals())?;
                    v["chain_verified"] = json!(chain.verified());
                }
            }
            let mut failures = Vec::new();
            if let Some(c) = &l.channel {
                let tp = linalg::max_abs(&(c.choi_input_marginal() - linalg::identity(c.dim_in())));
                v["tp_residual"] = json!(tp);
                v["choi_min_eigenvalue"] = json!(linalg::eigvalsh(c.choi())?[0]);
                v["tp_tol"] = json!(TP_TOL);
                v["cp_tol"] = json!(CP_TOL);
                if let Some(rep) = &l.rep {
                    let r = covariance_residual(c, rep)?;
                    v["covariance"] = json!(r);
                    if !(r <= tol.covariance) {
                        failures.push(format!("covariance residual {r:.3e} exceeds {:.1e}", tol.covariance));
                    }
                }
                if let Some(sys) = &l.system {
                    let r = passivity_residual(c, sys)?;
                    v["passivity"] = json!(r);
                    if !(r <= tol.passivity) {
                        failures.push(format!("passivity residual {r:.3e} exceeds {:.1e}", tol.passivity));
                    }
                }
                v["certified"] = json!(failures.is_empty() && l.rep.is_some() && l.system.is_some());
            }
            Ok(Success {
                outcome: Outcome::Object(v),
                failure_code: if failures.is_empty() { 0 } else { 3 },
                failures,
            })
        }
    }
}

fn output_of(command: &Command) -> &Output {
    match command {
        Command::Split { output, .. }
        | Command::Chain { output, .. }
        | Command::Audit { output, .. }
        | Command::Twirl { output, .. }
        | Command::Ncopy { output, .. }
        | Command::Superadd { output, .. }
        | Command::DelayScan { output, .. }
        | Command::Validate { output, .. } => output,
    }
}

fn render(outcome: &Outcome, format: Option<Format>) -> Result<String> {
    match (outcome, format) {
        (Outcome::Object(v), None | Some(Format::Json)) => io::to_json_string(v),
        (Outcome::Object(v), Some(Format::Csv)) => {
            let (keys, vals): (Vec<String>, Vec<String>) = io::flatten_json(v).into_iter().unzip();
            io::to_csv_string(&keys, &[vals])
        }
        (Outcome::Table(r), Some(Format::Json)) => io::to_json_string(r),
        (Outcome::Table(r), None | Some(Format::Csv)) => {
            let rows: Vec<Vec<String>> = r
                .rows
                .iter()
                .map(|row| row.iter().map(|&x| io::format_number(x)).collect())
                .collect();
            io::to_csv_string(&r.columns, &rows)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e.kind() {
        ErrorKind::Validation => 2,
        ErrorKind::Certification => 3,
        ErrorKind::Numerical => 4,
    }
}

/// Runs one command; diagnostics go to standard error.
pub fn run(config: &RunConfig) -> i32 {
    let output = output_of(&config.command);
    let result = execute(&config.command).and_then(|s| {
        let text = render(&s.outcome, output.format)?;
        match &output.out {
            Some(path) => io::write_atomic(path, &text)?,
            None => print!("{text}"),
        }
        Ok(s)
    });
    match result {
        Ok(s) => {
            for f in &s.failures {
                eprintln!("freesplit: {f}");
            }
            s.failure_code
        }
        Err(e) => {
            eprintln!("freesplit: error: {e}");
            exit_code(&e)
        }
    }
}

/// Parses arguments and runs; usage errors exit with 2.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            code
        }
    }
}
