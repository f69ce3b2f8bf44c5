//! The `polylift` command line.
//!
//! Exit codes: 0 on success, 1 for usage errors and unreadable or malformed
//! input, 2 when the library rejects the input (the error name is printed),
//! 3 when a verification report misses its threshold.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use polylift_core::cuntz::CuntzRep;
use polylift_core::filterbank::{self, BankOptions, Boundary};
use polylift_core::gridfun::{self, GridMatrix};
use polylift_core::liftfactor::{self, LiftingChain};
use polylift_core::polymat::PolyMatrix;

use crate::format::{self, BandsFile, ChainFile, FormatError, GridChainFile, GridFile, MatrixFile};
use crate::generate;

#[derive(Debug, Parser)]
#[command(name = "polylift", version, about = "Lifting-step factorization of polyphase matrices")]
pub struct Cli {
    /// Coefficient and reconstruction tolerance.
    #[arg(long, global = true, default_value_t = liftfactor::DEFAULT_TOL, value_parser = positive)]
    pub tol: f64,
    /// Seed for generated inputs and random checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Number of circle samples used for grid artifacts and checks.
    #[arg(long, global = true, default_value_t = gridfun::DEFAULT_GRID as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub grid_m: u64,
    #[command(subcommand)]
    pub command: Command,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(_) => Err("must be a positive number".into()),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    /// Random SL_N polynomial matrix (product of lifting steps).
    Matrix,
    /// Random signal.
    Signal,
    /// Random SL_N polynomial matrix sampled on the grid.
    Grid,
    /// Pointwise unitary 2×2 grid matrix.
    UnitaryGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CuntzMode {
    Monomial,
    Haar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryArg {
    Periodic,
    Zero,
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Periodic => Boundary::Periodic,
            BoundaryArg::Zero => Boundary::Zero,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a reproducible random input.
    Gen {
        #[arg(long, value_enum, default_value_t = GenKind::Matrix)]
        kind: GenKind,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Number of lifting steps multiplied together.
        #[arg(long, default_value_t = 4)]
        steps: usize,
        #[arg(long, default_value_t = 4)]
        max_degree: usize,
        /// Signal length.
        #[arg(long, default_value_t = 256)]
        len: usize,
        /// Complex instead of real signal samples.
        #[arg(long)]
        complex: bool,
        #[arg(long)]
        output: PathBuf,
    },
    /// Factor an SL_N polynomial matrix into lifting steps.
    Factor {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Least-squares lifting factorization of a sampled matrix function.
    FactorGrid {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_steps: usize,
    },
    /// Check a chain (polynomial or grid) against the matrix it came from.
    Verify {
        #[arg(long)]
        chain: PathBuf,
        #[arg(long)]
        input: PathBuf,
    },
    /// Check the Cuntz relations on random coefficient vectors.
    VerifyCuntz {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, value_enum, default_value_t = CuntzMode::Monomial)]
        mode: CuntzMode,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 128)]
        len: usize,
    },
    /// Analysis: split a signal into bands with the inverse of the chain.
    Apply {
        #[arg(long)]
        chain: PathBuf,
        #[arg(long)]
        signal: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = BoundaryArg::Periodic)]
        boundary: BoundaryArg,
    },
    /// Synthesis: rebuild the signal from bands written by `apply`.
    Reconstruct {
        #[arg(long)]
        chain: PathBuf,
        #[arg(long)]
        bands: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Original signal; when given, the reconstruction error is checked.
        #[arg(long)]
        reference: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{name}: {0}", name = .0.name())]
    Library(polylift_core::Error),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("cannot write report: {0}")]
    Report(#[from] io::Error),
}

impl From<polylift_core::Error> for CliError {
    fn from(e: polylift_core::Error) -> Self {
        CliError::Library(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Format(_) | CliError::Report(_) => 1,
            CliError::Library(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

/// Parses `args` (program name first), runs, prints reports to stdout and
/// diagnostics to stderr, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let stdout = io::stdout();
    match run(&cli, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let m = cli.grid_m as usize;
    match &cli.command {
        Command::Gen {
            kind,
            n,
            steps,
            max_degree,
            len,
            complex,
            output,
        } => gen(cli, *kind, *n, *steps, *max_degree, *len, *complex, output, out),
        Command::Factor { input, output } => factor(cli.tol, input, output, out),
        Command::FactorGrid {
            input,
            output,
            max_steps,
        } => factor_grid(cli.tol, *max_steps, input, output, out),
        Command::Verify { chain, input } => verify(cli.tol, m, chain, input, out),
        Command::VerifyCuntz { n, mode, trials, len } => verify_cuntz(cli.seed, *n, *mode, *trials, *len, out),
        Command::Apply {
            chain,
            signal,
            out: path,
            boundary,
        } => apply(chain, signal, path, (*boundary).into(), out),
        Command::Reconstruct {
            chain,
            bands,
            out: path,
            reference,
        } => reconstruct(cli.tol, chain, bands, path, reference.as_deref(), out),
    }
}

#[allow(clippy::too_many_arguments)]
fn gen(
    cli: &Cli,
    kind: GenKind,
    n: usize,
    steps: usize,
    max_degree: usize,
    len: usize,
    complex: bool,
    output: &Path,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let m = cli.grid_m as usize;
    if n < 2 && kind != GenKind::Signal {
        return Err(CliError::Usage("--n must be at least 2".into()));
    }
    match kind {
        GenKind::Matrix => {
            let (a, _) = generate::sl_matrix(n, steps, max_degree, cli.seed)?;
            format::write_json(output, &MatrixFile::from(&a))?;
            writeln!(out, "matrix n={n} steps={steps} max_degree={max_degree} seed={}", cli.seed)?;
        }
        GenKind::Signal => {
            let s = generate::signal(len, complex, cli.seed);
            format::write_signal(output, &s)?;
            writeln!(out, "signal len={len} seed={}", cli.seed)?;
        }
        GenKind::Grid => {
            let g = generate::sl_grid(n, steps, max_degree, m, cli.seed)?;
            format::write_json(output, &GridFile::from(&g))?;
            writeln!(out, "grid n={n} m={m} steps={steps} seed={}", cli.seed)?;
        }
        GenKind::UnitaryGrid => {
            let g = generate::unitary_grid(m, cli.seed);
            format::write_json(output, &GridFile::from(&g))?;
            writeln!(out, "unitary grid n=2 m={m} seed={}", cli.seed)?;
        }
    }
    Ok(())
}

fn factor_any(a: &PolyMatrix, tol: f64) -> polylift_core::Result<LiftingChain> {
    if a.n() == 2 {
        liftfactor::factor_2x2(a, tol)
    } else {
        liftfactor::factor_nxn(a, tol)
    }
}

fn factor(tol: f64, input: &Path, output: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let a = format::read_matrix(input)?;
    let chain = factor_any(&a, tol)?;
    let report = liftfactor::verify_chain(&chain, &a, tol)?;
    format::write_json(output, &ChainFile::new(&chain, Some(&report)))?;
    writeln!(
        out,
        "steps={} lifting_steps={} max_coeff_err={:.3e}",
        chain.steps.len(),
        chain.lifting_len(),
        report.max_coeff_err
    )?;
    if !report.passed {
        return Err(CliError::Verification(format!(
            "max_coeff_err {:.3e} > tol {tol:.1e}",
            report.max_coeff_err
        )));
    }
    Ok(())
}

fn factor_grid(tol: f64, max_steps: usize, input: &Path, output: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let g = format::read_grid(input)?;
    let f = gridfun::iterate_factorization(&g, max_steps, tol)?;
    let file = GridChainFile::from(&f);
    format::write_json(output, &file)?;
    writeln!(out, "steps={} converged={}", f.steps.len(), f.report.converged)?;
    writeln!(out, "step_magnitudes={}", list(&file.report.step_magnitudes))?;
    writeln!(out, "objective={}", list(&f.report.objective))?;
    writeln!(
        out,
        "max_off_diagonal={:.3e} max_row_inner={:.3e}",
        f.report.max_off_diagonal, f.report.max_row_inner
    )?;
    Ok(())
}

fn list(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn verify(tol: f64, m: usize, chain: &Path, input: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let poly = format::read_json::<ChainFile>(chain);
    match poly {
        Ok(file) => verify_poly(tol, m, &file, input, out),
        Err(poly_err) => match format::read_json::<GridChainFile>(chain) {
            Ok(file) => verify_grid(tol, &file, input, out),
            Err(_) => Err(poly_err.into()),
        },
    }
}

fn verify_poly(tol: f64, m: usize, file: &ChainFile, input: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let chain = file.chain()?;
    let a = format::read_matrix(input)?;
    let report = liftfactor::verify_chain(&chain, &a, tol)?;
    let profile: Vec<String> = report.degree_profile.iter().map(|d| d.to_string()).collect();
    let descends = liftfactor::profile_strictly_descends(&chain, &report.degree_profile);
    let residual = GridMatrix::from_poly_matrix(&chain.residual, m);
    writeln!(out, "max_coeff_err={:.3e}", report.max_coeff_err)?;
    writeln!(out, "degree_profile=[{}] descends={descends}", profile.join(", "))?;
    writeln!(out, "max_det_defect={:.3e}", report.max_det_defect)?;
    writeln!(
        out,
        "residual_max_row_inner={:.3e} residual_max_off_diagonal={:.3e}",
        residual.max_row_inner(),
        residual.max_off_diagonal()
    )?;
    writeln!(out, "passed={}", report.passed)?;
    if !report.passed {
        return Err(CliError::Verification(format!(
            "max_coeff_err {:.3e} > tol {tol:.1e}",
            report.max_coeff_err
        )));
    }
    Ok(())
}

fn verify_grid(tol: f64, file: &GridChainFile, input: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let g = format::read_grid(input)?;
    if g.n() != file.n || g.m() != file.m {
        return Err(CliError::Usage("grid chain and input grid differ in shape".into()));
    }
    let product = file.product()?;
    let scale = g.entries().iter().map(|f| f.max_abs()).fold(1.0, f64::max);
    let err = product.max_diff(&g);
    let residual = GridMatrix::try_from(&file.residual)?;
    writeln!(out, "max_sample_err={err:.3e}")?;
    writeln!(out, "step_magnitudes={}", list(&file.report.step_magnitudes))?;
    writeln!(
        out,
        "residual_max_row_inner={:.3e} residual_max_off_diagonal={:.3e}",
        residual.max_row_inner(),
        residual.max_off_diagonal()
    )?;
    let passed = err <= tol * scale;
    writeln!(out, "passed={passed}")?;
    if !passed {
        return Err(CliError::Verification(format!("max_sample_err {err:.3e} > tol·scale")));
    }
    Ok(())
}

fn verify_cuntz(seed: u64, n: usize, mode: CuntzMode, trials: usize, len: usize, out: &mut dyn Write) -> Result<(), CliError> {
    let (rep, bound) = match mode {
        CuntzMode::Monomial => (CuntzRep::monomial(n)?, 0.0),
        CuntzMode::Haar if n == 2 => (CuntzRep::haar(), 1e-12),
        CuntzMode::Haar => return Err(CliError::Usage("the Haar pair has n = 2".into())),
    };
    let r = rep.verify_relations(trials, len, &mut generate::rng(seed));
    writeln!(
        out,
        "n={n} max_iso_err={:.3e} max_complete_err={:.3e}",
        r.max_iso_err, r.max_complete_err
    )?;
    let passed = r.max_iso_err <= bound && r.max_complete_err <= bound;
    writeln!(out, "passed={passed}")?;
    if !passed {
        return Err(CliError::Verification(format!("relation error above {bound:.0e}")));
    }
    Ok(())
}

fn apply(chain: &Path, signal: &Path, path: &Path, boundary: Boundary, out: &mut dyn Write) -> Result<(), CliError> {
    let (chain, _) = format::read_chain(chain)?;
    let x = format::read_signal(signal)?;
    let opts = BankOptions {
        boundary,
        ..Default::default()
    };
    let bands = filterbank::analyze(&chain, &x, opts)?;
    format::write_json(path, &BandsFile::new(&bands, boundary))?;
    writeln!(out, "bands={} band_len={} length={}", bands.n(), bands.bands[0].len(), bands.length)?;
    Ok(())
}

fn reconstruct(
    tol: f64,
    chain: &Path,
    bands: &Path,
    path: &Path,
    reference: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let (chain, _) = format::read_chain(chain)?;
    let file: BandsFile = format::read_json(bands)?;
    let opts = BankOptions {
        boundary: file.boundary.into(),
        ..Default::default()
    };
    let y = filterbank::synthesize(&chain, &file.band_set()?, opts)?;
    format::write_signal(path, &y)?;
    writeln!(out, "length={}", y.len())?;
    if let Some(reference) = reference {
        let x = format::read_signal(reference)?;
        let err = y.max_diff(&x);
        writeln!(out, "max_reconstruction_err={err:.3e}")?;
        if err > tol {
            return Err(CliError::Verification(format!("reconstruction error {err:.3e} > tol {tol:.1e}")));
        }
    }
    Ok(())
}
