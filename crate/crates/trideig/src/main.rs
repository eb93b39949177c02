//! Command-line driver: generate test matrices, solve them, verify solution
//! quality, run the benchmark table, and dump secular-function plot data.
//!
//! Exit codes: `0` success (and verify PASS), `1` verify FAIL, `2` usage or
//! matrix-file parse error, `3` solver failure, `4` filesystem I/O failure.
//! Diagnostics go to stderr; stdout carries data only.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use trideig::bench::{self, Solver, DEFAULT_BASE_CUTOFF};
use trideig::gen;
use trideig::io::{self, FileError, MatrixFile};
use trideig_core::measures::{orthogonality_measure, residual_measure};
use trideig_core::qr::qr_eigensolve;
use trideig_core::rank_two::{
    classify_intervals, deflate_rank_two, form_rank_two, secular_eval, secular_roots,
    RankTwoProblem,
};
use trideig_core::tridiag::{householder_tridiagonalize, split_three, Mat};
use trideig_core::{Error as SolverError, SpectralDecomposition, SymTridiag};

/// PASS threshold for both verify measures: the solvers deliver well under
/// one; order unity with headroom separates "working" from "broken".
const VERIFY_BOUND: f64 = 5.0;

/// Largest matrix order `plotdata` will reduce to a secular problem.
const PLOTDATA_MAX_ORDER: usize = 500;

#[derive(Parser)]
#[command(name = "trideig", version, about = "Symmetric tridiagonal eigensolvers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a test matrix file.
    Gen {
        /// Matrix family.
        #[arg(value_enum)]
        kind: GenKind,
        /// Grid side for `laplacian` (matrix order is its square); matrix
        /// order for the tridiagonal families.
        size: usize,
        /// Output path.
        out: PathBuf,
        /// Seed for `random-tridiag`.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the eigenvalues of a matrix file, ascending, one per line.
    Solve {
        input: PathBuf,
        #[command(flatten)]
        solver: SolverOpts,
        /// Also write the eigenvector matrix (columns follow the printed
        /// eigenvalue order) to this path.
        #[arg(long)]
        emit_vectors: Option<PathBuf>,
    },
    /// Solve, then report residual and orthogonality quality measures.
    Verify {
        input: PathBuf,
        #[command(flatten)]
        solver: SolverOpts,
    },
    /// Accuracy and flop benchmark over Laplacian-derived matrices.
    Bench {
        /// Matrix orders (perfect squares), comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = vec![9_usize, 25, 100])]
        sizes: Vec<usize>,
        /// Solvers to run, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = Solver::ALL)]
        solvers: Vec<Solver>,
        /// Seed for the measurement start vectors.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
        format: OutputFormat,
    },
    /// Sample the top-level secular function per root interval (CSV).
    Plotdata {
        input: PathBuf,
        /// Sample points per interval, pole neighborhoods excluded.
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
}

#[derive(ValueEnum, Clone, Copy)]
enum GenKind {
    /// Dense 2-D Dirichlet Laplacian.
    Laplacian,
    /// Tridiagonal with entries uniform in [-1, 1].
    RandomTridiag,
    /// Weakly coupled identical blocks; tightly clustered spectrum.
    Glued,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum SolverKind {
    Qr,
    Cdc,
    Rtdc,
}

#[derive(Args)]
struct SolverOpts {
    /// Eigensolver to run.
    #[arg(long, value_enum, default_value_t = SolverKind::Rtdc)]
    solver: SolverKind,
    /// Use the direct-formula eigenvectors instead of the stable chained
    /// rank-one merges (rtdc only).
    #[arg(long)]
    naive_vectors: bool,
    /// Recursion cutoff below which blocks go straight to QR.
    #[arg(long, default_value_t = DEFAULT_BASE_CUTOFF)]
    base_cutoff: usize,
}

impl SolverOpts {
    fn to_solver(&self) -> Result<Solver, CliError> {
        match (self.solver, self.naive_vectors) {
            (SolverKind::Qr, false) => Ok(Solver::Qr),
            (SolverKind::Cdc, false) => Ok(Solver::Cdc),
            (SolverKind::Rtdc, false) => Ok(Solver::Rtdc),
            (SolverKind::Rtdc, true) => Ok(Solver::RtdcNaive),
            _ => Err(CliError::Usage(
                "--naive-vectors only applies to --solver rtdc".to_string(),
            )),
        }
    }
}

#[derive(ValueEnum, Clone, Copy)]
enum OutputFormat {
    Table,
    Csv,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    File(FileError),
    Solver(SolverError),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::File(FileError::Parse { .. }) => 2,
            CliError::File(FileError::Io { .. }) => 4,
            CliError::Solver(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::File(e) => write!(f, "{e}"),
            CliError::Solver(e) => write!(f, "{e}"),
        }
    }
}

impl From<FileError> for CliError {
    fn from(e: FileError) -> Self {
        CliError::File(e)
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        CliError::Solver(e)
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.cmd {
        Cmd::Gen {
            kind,
            size,
            out,
            seed,
        } => cmd_gen(kind, size, &out, seed),
        Cmd::Solve {
            input,
            solver,
            emit_vectors,
        } => cmd_solve(&input, &solver, emit_vectors.as_deref()),
        Cmd::Verify { input, solver } => cmd_verify(&input, &solver),
        Cmd::Bench {
            sizes,
            solvers,
            seed,
            format,
        } => cmd_bench(&sizes, &solvers, seed, format),
        Cmd::Plotdata { input, samples } => cmd_plotdata(&input, samples),
    }
}

fn cmd_gen(kind: GenKind, size: usize, out: &Path, seed: u64) -> Result<ExitCode, CliError> {
    if size == 0 {
        return Err(CliError::Usage("size must be at least 1".to_string()));
    }
    let matrix = match kind {
        GenKind::Laplacian => MatrixFile::Dense(gen::laplacian(size)),
        GenKind::RandomTridiag => MatrixFile::Tridiag(gen::random_tridiag(size, seed)),
        GenKind::Glued => MatrixFile::Tridiag(gen::glued(size)),
    };
    io::write_matrix(out, &matrix)?;
    Ok(ExitCode::SUCCESS)
}

/// Load a matrix file as a tridiagonal problem. Dense inputs are reduced by
/// Householder reflections; the returned basis maps tridiagonal-coordinate
/// vectors back to the original ones.
fn load_tridiag(path: &Path) -> Result<(SymTridiag, Option<Mat>), CliError> {
    match io::read_matrix(path)? {
        MatrixFile::Tridiag(t) => Ok((t, None)),
        MatrixFile::Dense(a) => {
            let (t, basis) = householder_tridiagonalize(&a);
            Ok((t, Some(basis)))
        }
    }
}

fn run_solver(
    solver: Solver,
    t: &SymTridiag,
    base_cutoff: usize,
    want_vectors: bool,
) -> Result<SpectralDecomposition, CliError> {
    let dec = match solver {
        Solver::Qr => qr_eigensolve(t, want_vectors),
        _ => solver.solve(t, base_cutoff),
    };
    Ok(dec?)
}

fn cmd_solve(
    input: &Path,
    opts: &SolverOpts,
    emit_vectors: Option<&Path>,
) -> Result<ExitCode, CliError> {
    let solver = opts.to_solver()?;
    let (t, basis) = load_tridiag(input)?;
    let dec = run_solver(solver, &t, opts.base_cutoff, emit_vectors.is_some())?;
    let mut out = String::new();
    for v in dec.eigenvalues() {
        out.push_str(&format!("{v:.16e}\n"));
    }
    print!("{out}");
    if let Some(path) = emit_vectors {
        let q = dec
            .vectors()
            .expect("vectors were requested from the solver");
        let full = match &basis {
            Some(b) => b.mul(q),
            None => q.clone(),
        };
        fs::write(path, io::render_mat(&full)).map_err(|e| {
            CliError::File(FileError::Io {
                path: path.display().to_string(),
                source: e,
            })
        })?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(input: &Path, opts: &SolverOpts) -> Result<ExitCode, CliError> {
    let solver = opts.to_solver()?;
    let (t, _basis) = load_tridiag(input)?;
    let dec = run_solver(solver, &t, opts.base_cutoff, true)?;
    let a = t.to_dense();
    let r = residual_measure(&a, &dec);
    let o = orthogonality_measure(&dec);
    println!("residual      {r:.3}");
    println!("orthogonality {o:.3}");
    if r <= VERIFY_BOUND && o <= VERIFY_BOUND {
        println!("PASS");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("FAIL");
        Ok(ExitCode::from(1))
    }
}

fn cmd_bench(
    sizes: &[usize],
    solvers: &[Solver],
    seed: u64,
    format: OutputFormat,
) -> Result<ExitCode, CliError> {
    let rows = bench::run_benchmark(sizes, solvers, seed);
    for r in &rows {
        if let Some(msg) = &r.error {
            eprintln!("warning: n={} {}: {msg}", r.n, r.solver);
        }
    }
    let rendered = match format {
        OutputFormat::Table => bench::format_table(&rows),
        OutputFormat::Csv => bench::format_csv(&rows),
    };
    print!("{rendered}");
    Ok(ExitCode::SUCCESS)
}

/// Build the top-level rank-two merge problem of a tridiagonal matrix, or
/// `None` when there is nothing to merge (order below 2, or the matrix
/// decouples at the cut positions).
fn top_level_merge(t: &SymTridiag) -> Result<Option<RankTwoProblem>, CliError> {
    let n = t.n();
    if n < 2 {
        return Ok(None);
    }
    if n == 2 {
        let beta = t.offdiag()[0];
        if beta == 0.0 {
            return Ok(None);
        }
        let (a0, a1) = (t.diag()[0] - beta, t.diag()[1] - beta);
        let d = if a0 <= a1 {
            vec![a0, a1]
        } else {
            vec![a1, a0]
        };
        // A single rank-one cut written as two equal half-strength terms:
        // with v1 = v2 every cross term vanishes and the rank-two secular
        // function reduces exactly to the rank-one one.
        let p = RankTwoProblem::new(d, vec![1.0, 1.0], vec![1.0, 1.0], 0.5 * beta, 0.5 * beta)?;
        return Ok(Some(p));
    }
    let k1 = n.div_ceil(3);
    let k2 = (n - k1).div_ceil(2);
    let split = match split_three(t, k1, k2) {
        Ok(s) => s,
        Err(SolverError::DecoupledMatrix { .. }) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let dec1 = qr_eigensolve(&split.t1, true)?;
    let dec2 = qr_eigensolve(&split.t2, true)?;
    let dec3 = qr_eigensolve(&split.t3, true)?;
    let (p, _blocks) = form_rank_two(&split, dec1, dec2, dec3)?;
    Ok(Some(p))
}

const PLOT_HEADER: &str = "interval_index,lambda,f,fprime";

fn cmd_plotdata(input: &Path, samples: usize) -> Result<ExitCode, CliError> {
    let (t, _basis) = load_tridiag(input)?;
    if t.n() > PLOTDATA_MAX_ORDER {
        return Err(CliError::Usage(format!(
            "plotdata supports orders up to {PLOTDATA_MAX_ORDER}, got {}",
            t.n()
        )));
    }
    let mut out = String::new();
    out.push_str(PLOT_HEADER);
    out.push('\n');
    let Some(p) = top_level_merge(&t)? else {
        print!("{out}");
        return Ok(ExitCode::SUCCESS);
    };
    let deflation = deflate_rank_two(&p, p.deflation_tolerance());
    let red = &deflation.reduced;
    if red.n() == 0 {
        print!("{out}");
        return Ok(ExitCode::SUCCESS);
    }
    let cls = classify_intervals(red)?;
    let mut roots = secular_roots(red)?;
    // Boundary values are eigenvalues sitting exactly on poles, not zeros
    // of the secular function; drop them from the root rows.
    for &bi in &red.boundary {
        let bv = red.d[bi];
        if let Ok(pos) = roots.binary_search_by(|r| r.total_cmp(&bv)) {
            roots.remove(pos);
        }
    }
    let poles = &cls.unique_d;
    let m = poles.len();
    let extension = 0.1 * (poles[m - 1] - poles[0]).max(1.0);
    for j in 0..=m {
        let lo = if j == 0 {
            poles[0] - extension
        } else {
            poles[j - 1]
        };
        let hi = if j == m {
            poles[m - 1] + extension
        } else {
            poles[j]
        };
        let mut pts: Vec<(f64, bool)> = (0..samples)
            .map(|i| {
                let frac = (i as f64 + 0.5) / samples as f64;
                (lo + (hi - lo) * frac, false)
            })
            .collect();
        for &r in &roots {
            let idx = poles.partition_point(|&d| d < r);
            if idx == j {
                pts.push((r, true));
            }
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (lambda, is_root) in pts {
            match secular_eval(red, lambda) {
                Ok(e) => {
                    let _ = std::fmt::write(
                        &mut out,
                        format_args!(
                            "{j},{lambda:.16e},{:.16e},{:.16e}\n",
                            e.value, e.derivative
                        ),
                    );
                }
                // Samples inside a pole's exclusion margin are dropped;
                // a root that converged onto a pole still gets its row.
                Err(_) if is_root => {
                    let _ = std::fmt::write(
                        &mut out,
                        format_args!("{j},{lambda:.16e},{:.16e},{:.16e}\n", f64::NAN, f64::NAN),
                    );
                }
                Err(_) => {}
            }
        }
    }
    print!("{out}");
    Ok(ExitCode::SUCCESS)
}
