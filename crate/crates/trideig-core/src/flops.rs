//! Floating-point operation counting, broken down by solver phase.
//!
//! Counting is a global, runtime-switchable facility: it is off by default
//! (every tally is a cheap early-out), and the benchmark harness turns it on
//! around instrumented runs. Solver kernels report their work in bulk — one
//! [`tally`] call per loop or per routine, not per scalar operation — so the
//! counts are deterministic and the overhead is negligible.
//!
//! Work is attributed to the phase that was active when it happened, with an
//! *outermost-scope-wins* rule: when a divide-and-conquer driver solves a
//! child problem under [`Phase::Decompose`], everything the child does
//! internally (its own sweeps, secular solves, vector accumulation) rolls up
//! into the parent's decompose phase. This makes "eigenvalue-phase flops" —
//! everything except the final eigenvector construction at the top level —
//! directly comparable across solvers.
//!
//! The counters are atomics so the facility is safe to use from tests running
//! in one process; attribution assumes one solve at a time (the phase scope is
//! global, not per-thread).

use core::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};

/// Solver phases used to attribute floating-point work.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// Solving sub-problems: QR sweeps at the base case, recursive child
    /// solves (including everything they do internally).
    Decompose,
    /// Deflation scans and rotations on the merged problem.
    Deflate,
    /// Secular-equation evaluation, interval classification, root extraction.
    Secular,
    /// Eigenvector construction and orthogonal back-transformation at the
    /// outermost merge level.
    Vectors,
}

const PHASES: usize = 4;
const KINDS: usize = 4; // adds, muls, divs, sqrts
const NO_PHASE: usize = usize::MAX;

static ENABLED: AtomicBool = AtomicBool::new(false);
static DEPTH: AtomicUsize = AtomicUsize::new(0);
static CURRENT: AtomicUsize = AtomicUsize::new(NO_PHASE);

static COUNTS: [[AtomicU64; KINDS]; PHASES] = {
    #[allow(clippy::declare_interior_mutable_const)]
    const Z: AtomicU64 = AtomicU64::new(0);
    #[allow(clippy::declare_interior_mutable_const)]
    const ROW: [AtomicU64; KINDS] = [Z; KINDS];
    [ROW; PHASES]
};

/// Turn counting on or off. Counts accumulate only while enabled.
pub fn set_enabled(on: bool) {
    ENABLED.store(on, Ordering::Relaxed);
}

/// Whether counting is currently enabled.
#[must_use]
pub fn is_enabled() -> bool {
    ENABLED.load(Ordering::Relaxed)
}

/// Reset all counters to zero.
pub fn reset() {
    for phase in &COUNTS {
        for kind in phase {
            kind.store(0, Ordering::Relaxed);
        }
    }
}

/// Add `adds`/`muls`/`divs`/`sqrts` operations to the active phase.
///
/// No-op while counting is disabled. Work reported outside any phase scope is
/// attributed to [`Phase::Decompose`].
#[inline]
pub fn tally(adds: u64, muls: u64, divs: u64, sqrts: u64) {
    if !ENABLED.load(Ordering::Relaxed) {
        return;
    }
    let phase = match CURRENT.load(Ordering::Relaxed) {
        NO_PHASE => Phase::Decompose as usize,
        p => p,
    };
    let row = &COUNTS[phase];
    if adds > 0 {
        row[0].fetch_add(adds, Ordering::Relaxed);
    }
    if muls > 0 {
        row[1].fetch_add(muls, Ordering::Relaxed);
    }
    if divs > 0 {
        row[2].fetch_add(divs, Ordering::Relaxed);
    }
    if sqrts > 0 {
        row[3].fetch_add(sqrts, Ordering::Relaxed);
    }
}

/// Scope guard that attributes tallied work to a phase.
///
/// Nested scopes do not re-attribute: the outermost scope wins, so a child
/// solve opened under [`Phase::Decompose`] keeps that attribution throughout.
pub struct PhaseScope {
    outermost: bool,
}

/// Enter a phase scope. Hold the returned guard for the duration of the work.
#[must_use]
pub fn phase(p: Phase) -> PhaseScope {
    let depth = DEPTH.fetch_add(1, Ordering::Relaxed);
    let outermost = depth == 0;
    if outermost {
        CURRENT.store(p as usize, Ordering::Relaxed);
    }
    PhaseScope { outermost }
}

impl Drop for PhaseScope {
    fn drop(&mut self) {
        DEPTH.fetch_sub(1, Ordering::Relaxed);
        if self.outermost {
            CURRENT.store(NO_PHASE, Ordering::Relaxed);
        }
    }
}

/// Per-kind operation counts for one phase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub adds: u64,
    pub muls: u64,
    pub divs: u64,
    pub sqrts: u64,
}

impl OpCounts {
    /// Total operations of all kinds.
    #[must_use]
    pub fn total(&self) -> u64 {
        self.adds + self.muls + self.divs + self.sqrts
    }
}

/// Snapshot of all counters, indexable by [`Phase`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FlopCounter {
    counts: [OpCounts; PHASES],
}

impl FlopCounter {
    /// Counts for one phase.
    #[must_use]
    pub fn phase(&self, p: Phase) -> OpCounts {
        self.counts[p as usize]
    }

    /// Total operations across all phases.
    #[must_use]
    pub fn total(&self) -> u64 {
        self.counts.iter().map(OpCounts::total).sum()
    }

    /// Operations spent obtaining eigenvalues: every phase except the final
    /// eigenvector construction.
    #[must_use]
    pub fn eigenvalue_total(&self) -> u64 {
        self.total() - self.phase(Phase::Vectors).total()
    }

    /// Element-wise difference against an earlier snapshot.
    #[must_use]
    pub fn since(&self, earlier: &FlopCounter) -> FlopCounter {
        let mut out = *self;
        for (row, prev) in out.counts.iter_mut().zip(earlier.counts.iter()) {
            row.adds -= prev.adds;
            row.muls -= prev.muls;
            row.divs -= prev.divs;
            row.sqrts -= prev.sqrts;
        }
        out
    }
}

/// Read the current counter totals.
#[must_use]
pub fn snapshot() -> FlopCounter {
    let mut out = FlopCounter::default();
    for (p, row) in COUNTS.iter().enumerate() {
        out.counts[p] = OpCounts {
            adds: row[0].load(Ordering::Relaxed),
            muls: row[1].load(Ordering::Relaxed),
            divs: row[2].load(Ordering::Relaxed),
            sqrts: row[3].load(Ordering::Relaxed),
        };
    }
    out
}
