//! Error type shared by the solver modules.

/// Convenient alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors reported by the eigensolvers and their building blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument violated a documented precondition (bad index, dimension
    /// mismatch, empty input where a nonempty one is required, ...).
    InvalidArgument(&'static str),
    /// A requested cut position carries a zero off-diagonal entry, so the
    /// matrix decouples into independent blocks there instead of forming a
    /// low-rank modification. The index is the off-diagonal position.
    DecoupledMatrix { offdiag_index: usize },
    /// Implicit QR failed to isolate an eigenvalue within the sweep budget.
    NoConvergence { sweeps: usize },
    /// The secular function was evaluated at (or indistinguishably close to)
    /// one of its poles.
    PoleAt { index: usize },
    /// Computed secular roots do not interlace the diagonal entries as the
    /// deflated problem guarantees; indicates an upstream root-finder failure.
    InterlacingViolated { index: usize },
    /// Interval classification could not account for every root of the
    /// reduced problem, even after probe refinement.
    Classification { expected: usize, predicted: usize },
    /// A root could not be extracted from the interval it was predicted in.
    RootExtraction { interval: usize },
    /// The 2x2 coefficient system for an eigenvector was numerically zero on
    /// both rows at a simple root.
    DegenerateSystem { root_index: usize },
}

impl core::fmt::Display for Error {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Error::InvalidArgument(what) => write!(f, "invalid argument: {what}"),
            Error::DecoupledMatrix { offdiag_index } => write!(
                f,
                "zero off-diagonal at position {offdiag_index}: matrix decouples into independent blocks"
            ),
            Error::NoConvergence { sweeps } => {
                write!(f, "implicit QR did not converge within {sweeps} sweeps")
            }
            Error::PoleAt { index } => {
                write!(f, "secular function evaluated at pole d[{index}]")
            }
            Error::InterlacingViolated { index } => {
                write!(f, "secular roots fail to interlace diagonal entries near index {index}")
            }
            Error::Classification { expected, predicted } => write!(
                f,
                "interval classification predicts {predicted} roots but the reduced problem has {expected}"
            ),
            Error::RootExtraction { interval } => {
                write!(f, "failed to extract a root from interval {interval}")
            }
            Error::DegenerateSystem { root_index } => write!(
                f,
                "degenerate eigenvector system at root {root_index}: both rows numerically zero"
            ),
        }
    }
}
