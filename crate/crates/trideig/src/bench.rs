//! Benchmark harness: accuracy measures and flop counts per solver and size.
//!
//! Each benchmark row builds the 2-D Laplacian of the requested order,
//! reduces it to tridiagonal form, runs one solver on the tridiagonal
//! matrix, and computes the scaled residual and orthogonality measures
//! *against that tridiagonal matrix* — the reduction is shared by every
//! solver, so measuring past it would only blur the comparison. Floating
//! point operations are counted around the solve alone; the measures run
//! with counting off.
//!
//! Wall time is reported for orientation but is nondeterministic; every
//! other column is a pure function of (size, solver, seed).

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trideig_core::flops;
use trideig_core::measures::{orthogonality_measure_with_start, residual_measure_with_start};
use trideig_core::qr::qr_eigensolve;
use trideig_core::rank_one::cdc_solve;
use trideig_core::rank_two::rtdc_solve;
use trideig_core::tridiag::householder_tridiagonalize;
use trideig_core::{Result, SpectralDecomposition, SymTridiag};

use crate::gen;

/// Divide-and-conquer recursion cutoff used throughout the harness and CLI.
pub const DEFAULT_BASE_CUTOFF: usize = 25;

/// The solvers the harness knows how to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    /// Implicit-shift QR with accumulated vectors.
    Qr,
    /// Rank-one divide and conquer (two-way split).
    Cdc,
    /// Rank-two divide and conquer (three-way split), stable vectors.
    Rtdc,
    /// Rank-two divide and conquer with the direct-formula vectors.
    RtdcNaive,
}

impl Solver {
    /// Every solver, in canonical report order.
    pub const ALL: [Solver; 4] = [Solver::Qr, Solver::Cdc, Solver::Rtdc, Solver::RtdcNaive];

    /// Canonical command-line name.
    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            Solver::Qr => "qr",
            Solver::Cdc => "cdc",
            Solver::Rtdc => "rtdc",
            Solver::RtdcNaive => "rtdc-naive",
        }
    }

    /// Run this solver, always producing eigenvectors.
    pub fn solve(self, t: &SymTridiag, base_cutoff: usize) -> Result<SpectralDecomposition> {
        match self {
            Solver::Qr => qr_eigensolve(t, true),
            Solver::Cdc => cdc_solve(t, base_cutoff),
            Solver::Rtdc => rtdc_solve(t, base_cutoff, true),
            Solver::RtdcNaive => rtdc_solve(t, base_cutoff, false),
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Solver {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "qr" => Ok(Solver::Qr),
            "cdc" => Ok(Solver::Cdc),
            "rtdc" => Ok(Solver::Rtdc),
            "rtdc-naive" => Ok(Solver::RtdcNaive),
            other => Err(format!(
                "unknown solver {other:?} (expected qr, cdc, rtdc, or rtdc-naive)"
            )),
        }
    }
}

/// One benchmark row: accuracy measures and work counts for one solver on
/// one matrix order. When `error` is set the numeric fields are `NaN`/zero.
#[derive(Debug, Clone)]
pub struct AccuracyReport {
    /// Matrix order (a perfect square; the Laplacian lives on a square grid).
    pub n: usize,
    pub solver: Solver,
    /// Scaled residual measure ‖AQ̂ − Q̂Λ̂‖₂ / (nε‖A‖₂).
    pub residual: f64,
    /// Scaled orthogonality defect ‖I − Q̂ᵀQ̂‖₂ / (nε).
    pub orthogonality: f64,
    /// Flops attributed to eigenvalue computation (everything except the
    /// top-level eigenvector phase).
    pub flops_eigenvalues: u64,
    /// All counted flops of the solve.
    pub flops_total: u64,
    /// Wall-clock time of the solve in milliseconds. Reported only; never
    /// part of any accuracy or determinism statement.
    pub wall_ms: f64,
    /// Solver failure, verbatim; the run continues with the next row.
    pub error: Option<String>,
}

/// Deterministic power-iteration start vector for the measures, varied per
/// matrix order so no size is accidentally measured with a degenerate start.
fn measure_start(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(n as u64);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn error_row(n: usize, solver: Solver, msg: String) -> AccuracyReport {
    AccuracyReport {
        n,
        solver,
        residual: f64::NAN,
        orthogonality: f64::NAN,
        flops_eigenvalues: 0,
        flops_total: 0,
        wall_ms: f64::NAN,
        error: Some(msg),
    }
}

/// Run every solver on every size, in input order. Sizes must be perfect
/// squares ≥ 1; other sizes produce one error row per solver and the run
/// continues.
#[must_use]
pub fn run_benchmark(sizes: &[usize], solvers: &[Solver], seed: u64) -> Vec<AccuracyReport> {
    let mut rows = Vec::with_capacity(sizes.len() * solvers.len());
    for &n in sizes {
        let grid = (n as f64).sqrt().round() as usize;
        if n == 0 || grid * grid != n {
            for &solver in solvers {
                rows.push(error_row(
                    n,
                    solver,
                    format!("matrix order {n} is not a perfect square (Laplacian grid is m x m)"),
                ));
            }
            continue;
        }
        let dense = gen::laplacian(grid);
        let (t, _basis) = householder_tridiagonalize(&dense);
        let a = t.to_dense();
        let start = measure_start(n, seed);
        for &solver in solvers {
            flops::reset();
            flops::set_enabled(true);
            let clock = Instant::now();
            let solved = solver.solve(&t, DEFAULT_BASE_CUTOFF);
            let wall_ms = clock.elapsed().as_secs_f64() * 1e3;
            let counter = flops::snapshot();
            flops::set_enabled(false);
            rows.push(match solved {
                Ok(dec) => AccuracyReport {
                    n,
                    solver,
                    residual: residual_measure_with_start(&a, &dec, &start),
                    orthogonality: orthogonality_measure_with_start(&dec, &start),
                    flops_eigenvalues: counter.eigenvalue_total(),
                    flops_total: counter.total(),
                    wall_ms,
                    error: None,
                },
                Err(e) => error_row(n, solver, e.to_string()),
            });
        }
    }
    rows
}

/// Pinned CSV schema.
pub const CSV_HEADER: &str = "n,solver,residual,orthogonality,flops_eigenvalues,flops_total,wall_ms";

/// Render rows as CSV. Error rows keep the schema with `nan` measures; the
/// message itself belongs on stderr, not in the data stream.
#[must_use]
pub fn format_csv(rows: &[AccuracyReport]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{:.6e},{:.6e},{},{},{:.3}",
            r.n, r.solver, r.residual, r.orthogonality, r.flops_eigenvalues, r.flops_total, r.wall_ms
        );
    }
    out
}

/// Render rows as an aligned text table.
#[must_use]
pub fn format_table(rows: &[AccuracyReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>6}  {:<10}  {:>12}  {:>12}  {:>16}  {:>16}  {:>10}",
        "n", "solver", "residual", "orth", "flops_eig", "flops_total", "wall_ms"
    );
    for r in rows {
        if let Some(msg) = &r.error {
            let _ = writeln!(out, "{:>6}  {:<10}  error: {msg}", r.n, r.solver.name());
        } else {
            let _ = writeln!(
                out,
                "{:>6}  {:<10}  {:>12.3}  {:>12.3}  {:>16}  {:>16}  {:>10.2}",
                r.n,
                r.solver.name(),
                r.residual,
                r.orthogonality,
                r.flops_eigenvalues,
                r.flops_total,
                r.wall_ms
            );
        }
    }
    out
}
