//! Command-line front end: `solve`, `generate` and `check`.
//!
//! Exit codes: 0 success, 1 a `check` row failed, 2 usage or input error,
//! 3 no trajectory converged.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::eigensolvers::{
    algorithm_one, algorithm_two, fourier_vectors, residual_order, subspace_iteration,
    InitialVectors, IterationConfig, SubspaceConfig,
};
use crate::error::{Error, Result};
use crate::mobius::CayleyOperator;
use crate::pencil::{read_l_diag, write_l_diag, Pencil};
use crate::report::{
    format_complex, parse_complex, read_spectrum, write_spectrum, Algorithm, SpectrumReport,
};
use crate::sparse::{read_matrix_market, write_matrix_market};
use crate::synth::{planted_pencil, PlantSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

/// Residual order a record must reach to pass `check`.
pub const CHECK_RESIDUAL_ORDER: i32 = -6;
/// Relative distance to the nearest true eigenvalue allowed by `check`.
pub const CHECK_EIGENVALUE_TOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "pencil-eig", version, about = "Right-half-plane eigenvalues of sparse pencils (J, L)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a solver on a Matrix Market J and an L diagonal file.
    Solve(SolveArgs),
    /// Write a synthetic pencil with a planted spectrum.
    Generate(GenerateArgs),
    /// Recompute residuals of a report and compare with a true spectrum.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
struct Inputs {
    #[arg(long)]
    j_matrix: PathBuf,
    #[arg(long)]
    l_diag: PathBuf,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long, value_enum, default_value = "one")]
    algorithm: Algorithm,
    /// Cayley parameter, e.g. "4.8334" or "4+0.5i"; required for one and two.
    #[arg(long, value_parser = complex_arg)]
    sigma: Option<Complex64>,
    #[arg(long, default_value_t = 0)]
    p: usize,
    #[arg(long, default_value_t = 4)]
    r: usize,
    #[arg(long, default_value_t = 6)]
    s: usize,
    #[arg(long, default_value_t = 4)]
    t: usize,
    #[arg(long, default_value_t = 1.0)]
    eps: f64,
    /// Defaults to 1e-4, or 1e-5 for subspace.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    /// Subspace shift a, e.g. "4i".
    #[arg(long, value_parser = complex_arg)]
    shift: Option<Complex64>,
    #[arg(long, default_value_t = 8)]
    block: usize,
    #[arg(long, default_value_t = 4)]
    ritz_period: usize,
    #[arg(long, default_value_t = 200)]
    max_cycles: usize,
    /// Random initial vectors from this seed instead of Fourier columns.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for independent trajectories (0: all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long)]
    states: usize,
    #[arg(long)]
    algebraic: usize,
    /// Comma-separated eigenvalues, e.g. "0.1814+4.8323i,0.0233".
    #[arg(long, default_value = "")]
    plant: String,
    #[arg(long, default_value_t = 0.05)]
    density: f64,
    #[arg(long)]
    coupling_density: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    fill_real_min: f64,
    #[arg(long, default_value_t = -0.05, allow_hyphen_values = true)]
    fill_real_max: f64,
    #[arg(long, default_value_t = 15.0)]
    fill_imag_max: f64,
    #[arg(long, default_value_t = 3)]
    large_negative: usize,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long)]
    report: PathBuf,
    #[arg(long)]
    spectrum: Option<PathBuf>,
}

fn complex_arg(s: &str) -> std::result::Result<Complex64, String> {
    parse_complex(s).map_err(|e| e.to_string())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let out = match cli.command {
        Command::Solve(a) => cmd_solve(&a),
        Command::Generate(a) => cmd_generate(&a).map(|_| EXIT_OK),
        Command::Check(a) => cmd_check(&a),
    };
    match out {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

pub fn load_pencil(j_matrix: &Path, l_diag: &Path) -> Result<Pencil> {
    let j = read_matrix_market(j_matrix)?;
    let l = read_l_diag(l_diag, j.order())?;
    Pencil::new(j, l)
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn cmd_solve(a: &SolveArgs) -> Result<i32> {
    let pencil = load_pencil(&a.inputs.j_matrix, &a.inputs.l_diag)?;
    let need_sigma = || {
        a.sigma
            .ok_or_else(|| Error::InvalidParameter("--sigma is required for this algorithm".into()))
    };
    let cfg = IterationConfig {
        r: a.r,
        s: a.s,
        p: a.p,
        t: a.t,
        eps: a.eps,
        tol: a.tol.unwrap_or(1e-4),
        max_iter: a.max_iter,
        init: match a.seed {
            Some(seed) => InitialVectors::Random { seed },
            None => InitialVectors::Fourier,
        },
        threads: a.threads,
        ..Default::default()
    };
    let report = match a.algorithm {
        Algorithm::One => {
            let sigma = need_sigma()?;
            SpectrumReport::new(a.algorithm, sigma, algorithm_one(&pencil, sigma, &cfg, None)?)
        }
        Algorithm::Two => {
            let sigma = need_sigma()?;
            SpectrumReport::new(a.algorithm, sigma, algorithm_two(&pencil, sigma, &cfg, None)?)
        }
        Algorithm::Subspace => {
            let shift = a
                .shift
                .ok_or_else(|| Error::InvalidParameter("--shift is required for subspace".into()))?;
            let scfg = SubspaceConfig {
                block: a.block,
                ritz_period: a.ritz_period,
                tol: a.tol.unwrap_or(1e-5),
                max_cycles: a.max_cycles,
            };
            SpectrumReport::new(a.algorithm, shift, subspace_iteration(&pencil, shift, &scfg)?)
        }
    };
    create_dir(&a.out_dir)?;
    report.write_json(a.out_dir.join("report.json"))?;
    report.write_csv(a.out_dir.join("report.csv"))?;

    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{:>28} {:>10} {:>6}", "converged value", "iter", "O(r)");
    for r in &report.records {
        let lam = r.lambda.finite().map(format_value).unwrap_or_else(|| "inf".into());
        let order = r.residual_order.map(|o| format!("1e{o}")).unwrap_or_default();
        let _ = writeln!(out, "{lam:>28} {:>10} {order:>6}", format!("{} ({})", r.iterations, r.lu_count));
    }
    for r in &report.failures {
        let why = r.message.clone().unwrap_or_default();
        let _ = writeln!(out, "shift {}: {:?} {why}", r.shift_index, r.status);
    }
    if report.records.is_empty() {
        eprintln!("no trajectory converged");
        return Ok(EXIT_NOT_CONVERGED);
    }
    Ok(EXIT_OK)
}

fn format_value(z: Complex64) -> String {
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{:.4}{sign}{:.4}i", z.re, z.im.abs())
}

fn cmd_generate(a: &GenerateArgs) -> Result<()> {
    let planted = a
        .plant
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(parse_complex)
        .collect::<Result<Vec<_>>>()?;
    let spec = PlantSpec {
        planted,
        n_states: a.states,
        m_algebraic: a.algebraic,
        density: a.density,
        coupling_density: a.coupling_density,
        seed: a.seed,
        fill_real: (a.fill_real_min, a.fill_real_max),
        fill_imag_max: a.fill_imag_max,
        large_negative: a.large_negative,
    };
    let (pencil, spectrum) = planted_pencil(&spec)?;
    create_dir(&a.out_dir)?;
    write_matrix_market(pencil.jacobian(), a.out_dir.join("J.mtx"))?;
    write_l_diag(pencil.l_diag(), a.out_dir.join("L.txt"))?;
    write_spectrum(&spectrum, a.out_dir.join("spectrum.json"))?;
    println!(
        "wrote J.mtx (order {}, {} nonzeros), L.txt and spectrum.json ({} values) to {}",
        pencil.order(),
        pencil.jacobian().nnz(),
        spectrum.len(),
        a.out_dir.display()
    );
    Ok(())
}

/// Outcome of re-checking one reported eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub lambda: Complex64,
    pub residual_order: i32,
    /// `|λ − λ_true| / (1 + |λ_true|)` for the nearest true eigenvalue.
    pub nearest_error: Option<f64>,
    pub pass: bool,
}

/// Re-derives an eigenvector by inverse iteration next to each reported `λ`
/// and evaluates the residual order of `(C_σ^{-1} − μI)` at `μ = c_σ(λ)^{-1}`.
///
/// `σ` comes from the report for the Cayley solvers and is `max(|λ|, 1)` for
/// subspace reports.
pub fn check_report(
    pencil: &Pencil,
    report: &SpectrumReport,
    spectrum: Option<&[Complex64]>,
) -> Result<Vec<CheckRow>> {
    let start = pencil.embed_state(&fourier_vectors(pencil.n_states(), 1)?[0]);
    let mut rows = Vec::new();
    for rec in &report.records {
        let Some(lam) = rec.lambda.finite() else {
            continue;
        };
        let sigma = match report.algorithm {
            Algorithm::Subspace => Complex64::new(lam.norm().max(1.0), 0.0),
            _ => report.sigma,
        };
        let op = CayleyOperator::new(pencil, sigma)?;
        let x = eigenvector_near(pencil, lam, &start)?;
        let mu = (lam - sigma) / (lam + sigma.conj());
        let order = residual_order(&op, mu, &x)?;
        let nearest_error = spectrum.map(|s| {
            s.iter()
                .map(|t| (lam - t).norm() / (1.0 + t.norm()))
                .fold(f64::INFINITY, f64::min)
        });
        let pass = order <= CHECK_RESIDUAL_ORDER && nearest_error.is_none_or(|e| e <= CHECK_EIGENVALUE_TOL);
        rows.push(CheckRow {
            lambda: lam,
            residual_order: order,
            nearest_error,
            pass,
        });
    }
    Ok(rows)
}

/// A few steps of `x ← (J − sL)^{-1} L x` with `s` just off `λ`.
fn eigenvector_near(pencil: &Pencil, lam: Complex64, start: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut offset = 1e-9 * (1.0 + lam.norm());
    let f = loop {
        let s = lam + Complex64::new(offset, offset);
        match pencil.factorize_shifted(s) {
            Ok(f) => break f,
            Err(Error::SingularShift { .. }) if offset < 1e-6 * (1.0 + lam.norm()) => offset *= 10.0,
            Err(e) => return Err(e),
        }
    };
    let mut x = start.to_vec();
    for _ in 0..4 {
        let mut y = f.solve(&pencil.apply_l(&x)?)?;
        pencil.project_state_space(&mut y);
        let n = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidParameter("inverse iteration broke down".into()));
        }
        x = y.iter().map(|z| z / n).collect();
    }
    Ok(x)
}

fn cmd_check(a: &CheckArgs) -> Result<i32> {
    let pencil = load_pencil(&a.inputs.j_matrix, &a.inputs.l_diag)?;
    let report = SpectrumReport::read_json(&a.report)?;
    let spectrum = a.spectrum.as_ref().map(read_spectrum).transpose()?;
    let rows = check_report(&pencil, &report, spectrum.as_deref())?;
    let mut all = true;
    for r in &rows {
        all &= r.pass;
        let err = r.nearest_error.map(|e| format!(" nearest {e:.1e}")).unwrap_or_default();
        println!(
            "{} {} O(r)=1e{}{err}",
            if r.pass { "PASS" } else { "FAIL" },
            format_complex(r.lambda),
            r.residual_order
        );
    }
    if rows.is_empty() {
        println!("no converged records to check");
    }
    Ok(if all { EXIT_OK } else { EXIT_CHECK_FAILED })
}
