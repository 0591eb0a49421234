//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

use std::f64::consts::{LN_2, PI};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use freesplit::channels::{
    covariance_residual_between, instrument_channel, random_covariant_instrument, random_passive_covariant,
    weight_measurement,
};
use freesplit::experiments::{
    default_jitter_grid, delay_loss_scan, ncopy_binomial, plus_pair_slack, superadditivity_sweep, NCopyConfig,
};
use freesplit::qcore::{
    free_energy, random_hermitian, random_state, rel_entropy, shannon_entropy, DensityMatrix, HamiltonianSystem,
};
use freesplit::splitting::{
    asymmetry, monotonicity_audit, shift_mixture_defect, split_chain, split_two, MeasureChain, Tolerances,
};
use freesplit::symmetry::{haar_average_operator, SymmetryRep};
use freesplit::Result;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        passed,
        detail: detail.into(),
    })
}

fn random_rep<R: Rng>(d: usize, rng: &mut R) -> Result<SymmetryRep> {
    SymmetryRep::u1((0..d).map(|_| rng.random_range(0..=3)).collect())
}

/// Hamiltonian commuting with `rep`: a random Hermitian averaged over the group.
fn random_system<R: Rng>(rep: &SymmetryRep, rng: &mut R) -> Result<HamiltonianSystem> {
    let h = haar_average_operator(rep, &random_hermitian(rep.dim(), rng))?;
    HamiltonianSystem::new(h, rng.random_range(0.2..3.0))
}

fn random_full_rank_or_not<R: Rng>(d: usize, rng: &mut R) -> Result<DensityMatrix> {
    let rank = rng.random_range(1..=d);
    random_state(d, rank, rng)
}

fn criterion_1() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for d in 2..=6 {
        for _ in 0..100 {
            let sys = HamiltonianSystem::new(random_hermitian(d, &mut rng), rng.random_range(0.2..3.0))?;
            let rho = random_full_rank_or_not(d, &mut rng)?;
            let f = free_energy(&rho, &sys)?;
            let dkl = rel_entropy(&rho, sys.gibbs())?;
            worst = worst.max((f - sys.temperature() * dkl.value).abs());
        }
    }
    outcome(
        worst <= 1e-9,
        format!("500 states, max |F - T D| = {worst:.3e} (tol 1e-9)"),
    )
}

fn criterion_2() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_sum = 0.0f64;
    let mut min_part = f64::INFINITY;
    for _ in 0..100 {
        let d = rng.random_range(2..=5);
        let rep = random_rep(d, &mut rng)?;
        let sys = random_system(&rep, &mut rng)?;
        let rho = random_full_rank_or_not(d, &mut rng)?;
        let s = split_two(&rho, &sys, &rep)?;
        worst_sum = worst_sum.max((s.asym_energy + s.covariant_f - s.total).abs());
        min_part = min_part.min(s.asym_energy.min(s.covariant_f));
    }
    let sys = HamiltonianSystem::diagonal(&[0.0, 1.0], 1.0)?;
    let q = split_two(&DensityMatrix::plus(), &sys, &SymmetryRep::u1(vec![0, 1])?)?;
    let qubit_ok = (q.asym_energy - LN_2).abs() <= 1e-5
        && (q.covariant_f - 0.120115).abs() <= 1e-5
        && (q.total - 0.813262).abs() <= 1e-5;
    outcome(
        worst_sum <= 1e-9 && min_part >= -1e-9 && qubit_ok,
        format!(
            "max |sum - F| = {worst_sum:.3e}, min part = {min_part:.3e}; qubit |+> = ({:.6}, {:.6}, {:.6})",
            q.asym_energy, q.covariant_f, q.total
        ),
    )
}

fn criterion_3() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_gap = 0.0f64;
    let mut min_term = f64::INFINITY;
    let mut worst_holevo = 0.0f64;
    let mut runs = 0;
    for weights in [vec![0, 1], vec![0, 1, 2, 3]] {
        let rep = SymmetryRep::u1(weights)?;
        let chains = [MeasureChain::two_step(&rep)?, MeasureChain::three_step(&rep, PI)?];
        for chain in &chains {
            for _ in 0..100 {
                let sys = random_system(&rep, &mut rng)?;
                let rho = random_full_rank_or_not(rep.dim(), &mut rng)?;
                let split = split_chain(&rho, &sys, &rep, chain)?;
                worst_gap = worst_gap.max(split.telescoping_gap());
                min_term = split.terms.iter().cloned().fold(min_term, f64::min);
                worst_holevo = worst_holevo.max(split.holevo_deviation);
                runs += 1;
            }
        }
    }
    outcome(
        worst_gap <= 1e-9 && min_term >= -1e-9,
        format!("{runs} splits, max |sum F_j - F| = {worst_gap:.3e}, min F_j = {min_term:.3e}, max Holevo deviation = {worst_holevo:.3e}"),
    )
}

fn criterion_4() -> Result<Outcome> {
    let mut violations = 0usize;
    let mut worst_delta = f64::NEG_INFINITY;
    let mut worst_res = 0.0f64;
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(10_000 + seed);
        let d = [2, 3, 4][seed as usize % 3];
        let rep = random_rep(d, &mut rng)?;
        let sys = random_system(&rep, &mut rng)?;
        let c = random_passive_covariant(&sys, &rep, seed)?;
        let rho = random_full_rank_or_not(d, &mut rng)?;
        let chain = MeasureChain::three_step(&rep, PI)?;
        let r = monotonicity_audit(&rho, &sys, &rep, &c, &chain, Tolerances::default())?;
        worst_res = worst_res.max(r.residuals.covariance).max(r.residuals.passivity);
        violations += r.violations.len();
        let deltas = r.deltas.iter().cloned().chain([
            r.asymmetry_after - r.asymmetry_before,
            r.covariant_f_after - r.covariant_f_before,
        ]);
        worst_delta = deltas.fold(worst_delta, f64::max);
    }
    outcome(
        violations == 0 && worst_res <= 1e-9,
        format!("200 channels, {violations} violations, largest increase {worst_delta:.3e} (tol 1e-8), max residual {worst_res:.3e}"),
    )
}

fn criterion_5() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut failed = Vec::new();
    for n in 1..=10 {
        let r = ncopy_binomial(&NCopyConfig::new(n))?;
        worst = worst.max((r.rows[0][1] - r.rows[0][2]).abs());
        failed.extend(r.failed_checks().map(|c| c.name.clone()));
    }
    outcome(
        failed.is_empty() && worst <= 1e-9,
        if failed.is_empty() {
            format!("n = 1..10, max |block path - formula| = {worst:.3e}, log and work bounds hold")
        } else {
            format!("failed: {}", failed.join("; "))
        },
    )
}

fn criterion_6() -> Result<Outcome> {
    let r = superadditivity_sweep(100, &[2, 3, 4], 6)?;
    let min_f = r
        .column_values("slack_f")
        .unwrap()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let plus = plus_pair_slack(1.0, 1.0)?;
    let expected = LN_2 / 2.0;
    let plus_ok = (plus.free_energy - expected).abs() <= 1e-9;
    outcome(
        min_f >= -1e-9 && plus_ok,
        format!(
            "100 pairs, min slack {min_f:.3e}; |+>|+> slack {:.12} vs T ln2/2 = {expected:.12}",
            plus.free_energy
        ),
    )
}

fn criterion_7() -> Result<Outcome> {
    let sys = HamiltonianSystem::diagonal(&[0.0, 1.0], 1.0)?;
    let rep = SymmetryRep::u1(vec![0, 1])?;
    let r = delay_loss_scan(&default_jitter_grid(), &sys, &rep, &DensityMatrix::plus(), PI)?;
    let t = sys.temperature();
    let loss_at = |p: f64| r.rows.iter().find(|row| row[0] == p).map(|row| row[3]).unwrap();
    let (half, quarter) = (loss_at(0.5), loss_at(0.25));
    let expected_half = t * LN_2;
    let expected_quarter = t * (LN_2 - shannon_entropy(&[0.25, 0.75]));
    let half_ok = (half - expected_half).abs() <= 1e-6;
    let quarter_ok = (quarter - expected_quarter).abs() <= 1e-6;
    let worst_bound = r
        .rows
        .iter()
        .map(|row| row[2] - row[3])
        .fold(f64::NEG_INFINITY, f64::max);
    let bound_ok = worst_bound <= 1e-9;
    outcome(
        half_ok && quarter_ok && bound_ok,
        format!(
            "loss(1/2) = {half:.9} vs {expected_half:.9} [{}]; loss(1/4) = {quarter:.9} vs {expected_quarter:.9} [{}] \
             (T H(1/4) = {:.9}); max(bound - loss) = {worst_bound:.3e} [{}]",
            if half_ok { "ok" } else { "mismatch" },
            if quarter_ok { "ok" } else { "mismatch" },
            t * shannon_entropy(&[0.25, 0.75]),
            if bound_ok { "ok" } else { "mismatch" },
        ),
    )
}

fn criterion_8() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let rep = SymmetryRep::u1(vec![0, 1, 2, 3])?;
    let rho = DensityMatrix::uniform_superposition(4);
    let all_shifts: Vec<f64> = (0..4).map(|k| k as f64 * PI / 2.0).collect();
    let mut worst = 0.0f64;
    let mut all_orthogonal = true;
    for _ in 0..50 {
        let gap = rng.random_range(0.2..2.0);
        let sys = HamiltonianSystem::diagonal(&[0.0, gap, 2.0 * gap, 3.0 * gap], rng.random_range(0.2..3.0))?;
        let m = rng.random_range(2..=4);
        let mut shifts = all_shifts.clone();
        for i in (1..shifts.len()).rev() {
            shifts.swap(i, rng.random_range(0..=i));
        }
        shifts.truncate(m);
        let raw: Vec<f64> = (0..m).map(|_| rng.random::<f64>() + 1e-3).collect();
        let total: f64 = raw.iter().sum();
        let probs: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let r = shift_mixture_defect(&rho, &sys, &rep, &shifts, &probs)?;
        all_orthogonal &= r.orthogonal;
        worst = worst.max((r.defect - r.entropy_term).abs());
    }
    outcome(
        all_orthogonal && worst <= 1e-8,
        format!("50 mixtures, all shift sets orthogonal: {all_orthogonal}, max |defect - T S(p)| = {worst:.3e}"),
    )
}

fn criterion_9() -> Result<Outcome> {
    let rep = SymmetryRep::u1(vec![0, 1])?;
    let plus = DensityMatrix::plus();
    let c = instrument_channel(&weight_measurement(&rep)?)?;
    let out = c.apply(&plus)?;
    let ext = rep.extend_trivially(2)?;
    let (r_in, r_out) = (asymmetry(&plus, &rep)?, asymmetry(&out, &ext)?);
    let projective_ok = r_out.abs() <= 1e-12 && (r_in - LN_2).abs() <= 1e-12;

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = f64::NEG_INFINITY;
    let mut worst_cov = 0.0f64;
    for _ in 0..50 {
        let d = rng.random_range(2..=3);
        let m = rng.random_range(1..=3);
        let rep = random_rep(d, &mut rng)?;
        let parts = random_covariant_instrument(&rep, m, &mut rng)?;
        let c = instrument_channel(&parts)?;
        let ext = rep.extend_trivially(m)?;
        worst_cov = worst_cov.max(covariance_residual_between(&c, &rep, &ext)?);
        let rho = random_full_rank_or_not(d, &mut rng)?;
        let out = c.apply(&rho)?;
        worst = worst.max(asymmetry(&out, &ext)? - asymmetry(&rho, &rep)?);
    }
    outcome(
        projective_ok && worst <= 1e-8,
        format!(
            "energy measurement on |+>: R {r_in:.6} -> {r_out:.3e}; 50 instruments, max R increase {worst:.3e}, max covariance residual {worst_cov:.3e}"
        ),
    )
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).expect("write fixture");
    p.to_str().unwrap().to_string()
}

fn criterion_10() -> Result<Outcome> {
    let exe = env!("CARGO_BIN_EXE_freesplit");
    let dir = tempfile::tempdir().expect("tempdir");
    let d = dir.path();
    let state = write(
        d,
        "state.json",
        r#"{"kind":"state","matrix":{"dim":3,"entries":[[0.5,0],[0.2,0.1],[0,0],[0.2,-0.1],[0.3,0],[0.05,0],[0,0],[0.05,0],[0.2,0]]}}"#,
    );
    let system = write(
        d,
        "system.json",
        r#"{"kind":"system","hamiltonian":{"dim":3,"entries":[[0,0],[0,0],[0,0],[0,0],[1,0],[0,0],[0,0],[0,0],[2.5,0]]},"temperature":0.7}"#,
    );
    let rep = write(d, "rep.json", r#"{"kind":"rep","type":"u1","weights":[0,1,2]}"#);
    let channel = write(d, "channel.json", r#"{"gen":"random","seed":42}"#);
    let runs: Vec<(&str, Vec<String>)> = vec![
        (
            "superadd",
            vec![
                "superadd".into(),
                "--trials".into(),
                "40".into(),
                "--seed".into(),
                "5".into(),
            ],
        ),
        (
            "ncopy",
            vec!["ncopy".into(), "--n".into(), "8".into(), "--sweep".into()],
        ),
        (
            "audit",
            [
                "audit",
                "--state",
                &state,
                "--system",
                &system,
                "--rep",
                &rep,
                "--channel",
                &channel,
                "--shift",
                "1.3",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        ),
        (
            "twirl",
            [
                "twirl",
                "--system",
                &system,
                "--rep",
                &rep,
                "--channel",
                &channel,
                "--format",
                "json",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        ),
        ("delay-scan", vec!["delay-scan".into()]),
    ];
    let mut mismatches = Vec::new();
    for (name, args) in &runs {
        let mut outputs = Vec::new();
        for k in 0..2 {
            let out = d.join(format!("{name}.{k}.out"));
            let status = Command::new(exe)
                .args(args)
                .arg("--out")
                .arg(&out)
                .status()
                .expect("run binary");
            if !status.success() {
                mismatches.push(format!("{name} exited with {status}"));
            }
            outputs.push(std::fs::read(&out).unwrap_or_default());
        }
        if outputs[0] != outputs[1] || outputs[0].is_empty() {
            mismatches.push(format!("{name} output differs"));
        }
        let stdout: Vec<Vec<u8>> = (0..2)
            .map(|_| Command::new(exe).args(args).output().expect("run binary").stdout)
            .collect();
        if stdout[0] != stdout[1] {
            mismatches.push(format!("{name} stdout differs"));
        }
    }
    outcome(
        mismatches.is_empty(),
        if mismatches.is_empty() {
            format!(
                "{} commands, byte-identical across repeated runs (files and stdout)",
                runs.len()
            )
        } else {
            mismatches.join("; ")
        },
    )
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn main() {
    let criteria: [Criterion; 10] = [
        ("free energy equals T times relative entropy", criterion_1),
        ("two-term split", criterion_2),
        ("chain telescoping and non-negativity", criterion_3),
        ("monotonicity under passive covariant channels", criterion_4),
        ("n-copy binomial asymptotics", criterion_5),
        ("superadditivity sweep", criterion_6),
        ("delay loss bound", criterion_7),
        ("shift-mixture equality", criterion_8),
        ("instrument monotonicity", criterion_9),
        ("CLI determinism", criterion_10),
    ];
    let mut failures = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (status, detail) = match f() {
            Ok(o) => (if o.passed { "PASS" } else { "FAIL" }, o.detail),
            Err(e) => ("FAIL", format!("error: {e}")),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!(
            "criterion {:>2} {status} [{name}] {detail} ({:.1}s)",
            k + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
