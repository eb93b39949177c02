//! Four-case deflation for the rank-two merge problem.
//!
//! The problem is permuted so `d` ascends, then scanned repeatedly until
//! stable:
//!
//! 1. components with `|v| ≤ tol` are truncated to exact zeros, and rows
//!    with *both* components zero are resolved immediately — their basis
//!    vectors are eigenvectors;
//! 2. clusters of (near-)equal diagonal entries are collapsed by plane
//!    rotations forming a two-column QR factorization of the cluster's
//!    `(v1, v2)` block, which concentrates all modification mass in at most
//!    two carrier rows; the remaining cluster rows resolve. When the block
//!    has numerical rank one, one extra rotation aligns the carriers with
//!    the block's singular directions so the second carrier's residual is
//!    genuinely of size σ₂ ≤ tol·σ₁ and can be discarded, leaving a single
//!    carrier.
//!
//! Afterwards, three scalar discriminants test whether a *surviving* unique
//! diagonal entry is itself an eigenvalue: `f₁₁` when the row's first
//! component is zero, `f₁₂` when its second is, and `f₂` for a carrier that
//! survived a rank-one cluster. A fired discriminant yields a closed-form
//! eigenvector, but the row cannot be removed — it still couples the
//! remaining rows, so dropping it would change the rest of the spectrum.
//! Such rows are reported as [`BoundaryPair`]s and flagged in the reduced
//! problem; interval classification charges one eigenvalue to each.

use alloc::vec;
use alloc::vec::Vec;

use crate::flops;
use crate::fmath;
use crate::rank_one::GivensRot;

use super::{discriminant_is_zero, RankTwoProblem};

/// Which deflation rule resolved an eigenpair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeflationCase {
    /// Both modification components vanish: the basis vector is untouched
    /// by the modification.
    NullBoth,
    /// First component zero, second alive; the diagonal entry passed the
    /// `f₁₁` discriminant test.
    NullV1,
    /// Second component zero, first alive; `f₁₂` discriminant.
    NullV2,
    /// Duplicate-diagonal cluster member cleared by the two-column QR when
    /// the cluster's coefficient block has rank two.
    RepeatedRank2,
    /// Duplicate cluster member cleared by rotations when the coefficient
    /// block has rank one.
    RepeatedRank1Orthogonal,
    /// Rank-one cluster carrier whose diagonal entry passed the `f₂`
    /// discriminant test.
    RepeatedRank1Discriminant,
    /// Plain row (both components alive, no cluster history) whose secular
    /// residue — the same `f₂` form — vanishes. Possible only when the two
    /// modification scales have opposite signs, where the cross-term sum
    /// can cancel the `β₁v1² + β₂v2²` part exactly.
    PlainResidueZero,
    /// Not resolved by deflation; the row stays in the reduced problem.
    /// (Carried by no resolved eigenpair — listed for completeness.)
    NotDeflated,
}

/// A diagonal entry confirmed as an eigenvalue by a discriminant, together
/// with its closed-form eigenvector.
///
/// The entry's row *stays* in the reduced problem (its modification
/// components still couple the other rows), so this is not a `resolved`
/// entry: the eigenpair is recorded here, the row index is flagged in
/// `reduced.boundary`, and the secular function has no root at the value —
/// its pole cancels against the discriminant zero.
#[derive(Debug, Clone)]
pub struct BoundaryPair {
    /// The confirmed eigenvalue (a reduced diagonal entry).
    pub value: f64,
    /// Unit eigenvector in pre-deflation coordinates.
    pub vector: Vec<f64>,
    /// Which discriminant fired.
    pub case: DeflationCase,
    /// Index of the entry inside `reduced.d`.
    pub reduced_index: usize,
}

/// Outcome of deflating a [`RankTwoProblem`].
#[derive(Debug, Clone)]
pub struct RankTwoDeflation {
    /// Sorting permutation: `perm[k]` is the original index of the `k`-th
    /// smallest diagonal entry.
    pub perm: Vec<usize>,
    /// Plane rotations applied in sorted coordinates, in application order.
    /// Each acts on both modification vectors at once.
    pub givens: Vec<GivensRot>,
    /// Sorted-coordinate indices that survived into the reduced problem.
    pub keep: Vec<usize>,
    /// Immediately resolved eigenpairs (value, unit eigenvector in
    /// pre-deflation coordinates, rule that fired), ascending by value.
    pub resolved: Vec<(f64, Vec<f64>, DeflationCase)>,
    /// Diagonal entries confirmed as eigenvalues that nevertheless stay in
    /// the reduced problem, ascending by value.
    pub boundary: Vec<BoundaryPair>,
    /// The surviving problem: `d` ascending with at most two equal values
    /// per cluster, no row with both components zero, `boundary` indices
    /// referring to rows of `reduced.d`.
    pub reduced: RankTwoProblem,
}

impl RankTwoDeflation {
    /// Map a vector from deflated (sorted + rotated) coordinates back to
    /// the problem's original coordinates.
    #[must_use]
    pub fn back_transform(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        for g in self.givens.iter().rev() {
            let xa = y[g.a];
            let xb = y[g.b];
            y[g.a] = g.c * xa + g.s * xb;
            y[g.b] = -g.s * xa + g.c * xb;
        }
        flops::tally(
            2 * self.givens.len() as u64,
            4 * self.givens.len() as u64,
            0,
            0,
        );
        let mut out = vec![0.0; y.len()];
        for (k, &orig) in self.perm.iter().enumerate() {
            out[orig] = y[k];
        }
        out
    }
}

/// Working state of one deflation run, in sorted coordinates.
struct Scratch {
    tol: f64,
    beta1: f64,
    beta2: f64,
    ds: Vec<f64>,
    v1s: Vec<f64>,
    v2s: Vec<f64>,
    alive: Vec<bool>,
    givens: Vec<GivensRot>,
    /// `(sorted index, eigenvalue, case)` in resolution order; vectors are
    /// built at the end, once all rotations are known.
    resolved_raw: Vec<(usize, f64, DeflationCase)>,
    /// Rows that survived a rank-one cluster collapse; their diagonal value
    /// is eligible for the `f₂` discriminant.
    rank1_carrier: Vec<bool>,
}

impl Scratch {
    fn n(&self) -> usize {
        self.ds.len()
    }

    fn resolve(&mut self, k: usize, case: DeflationCase) {
        debug_assert!(self.alive[k]);
        self.alive[k] = false;
        self.rank1_carrier[k] = false;
        self.resolved_raw.push((k, self.ds[k], case));
    }

    /// Plane rotation on rows `(a, b)` zeroing `v1s[a]` into `v1s[b]`,
    /// applied to both vectors.
    fn rotate_v1(&mut self, a: usize, b: usize) {
        let r = fmath::hypot(self.v1s[a], self.v1s[b]);
        let c = self.v1s[b] / r;
        let s = self.v1s[a] / r;
        self.v1s[a] = 0.0;
        self.v1s[b] = r;
        let (xa, xb) = (self.v2s[a], self.v2s[b]);
        self.v2s[a] = c * xa - s * xb;
        self.v2s[b] = s * xa + c * xb;
        self.givens.push(GivensRot { a, b, c, s });
        flops::tally(3, 8, 2, 1);
    }

    /// Mirror of [`Self::rotate_v1`] driven by the second vector.
    fn rotate_v2(&mut self, a: usize, b: usize) {
        let r = fmath::hypot(self.v2s[a], self.v2s[b]);
        let c = self.v2s[b] / r;
        let s = self.v2s[a] / r;
        self.v2s[a] = 0.0;
        self.v2s[b] = r;
        let (xa, xb) = (self.v1s[a], self.v1s[b]);
        self.v1s[a] = c * xa - s * xb;
        self.v1s[b] = s * xa + c * xb;
        self.givens.push(GivensRot { a, b, c, s });
        flops::tally(3, 8, 2, 1);
    }

    /// Apply an explicit rotation `(c, s)` to rows `(a, b)` of both vectors
    /// (used for the singular-direction alignment, where the angle comes
    /// from a 2×2 eigenproblem rather than from zeroing one entry).
    fn rotate_rows(&mut self, a: usize, b: usize, c: f64, s: f64) {
        let (x1a, x1b) = (self.v1s[a], self.v1s[b]);
        self.v1s[a] = c * x1a - s * x1b;
        self.v1s[b] = s * x1a + c * x1b;
        let (x2a, x2b) = (self.v2s[a], self.v2s[b]);
        self.v2s[a] = c * x2a - s * x2b;
        self.v2s[b] = s * x2a + c * x2b;
        self.givens.push(GivensRot { a, b, c, s });
        flops::tally(4, 8, 0, 0);
    }

    /// Truncate below-tolerance components to exact zeros and resolve rows
    /// where both components vanish. Returns whether anything changed.
    fn truncate_pass(&mut self) -> bool {
        let mut changed = false;
        for k in 0..self.n() {
            if !self.alive[k] {
                continue;
            }
            if self.v1s[k] != 0.0 && fmath::abs(self.v1s[k]) <= self.tol {
                self.v1s[k] = 0.0;
                changed = true;
            }
            if self.v2s[k] != 0.0 && fmath::abs(self.v2s[k]) <= self.tol {
                self.v2s[k] = 0.0;
                changed = true;
            }
            if self.v1s[k] == 0.0 && self.v2s[k] == 0.0 {
                self.resolve(k, DeflationCase::NullBoth);
                changed = true;
            }
        }
        changed
    }

    /// Collapse one duplicate-diagonal cluster given by the sorted index
    /// range `lo..=hi`. Returns whether anything changed.
    fn collapse_cluster(&mut self, lo: usize, hi: usize) -> bool {
        let active: Vec<usize> = (lo..=hi).filter(|&k| self.alive[k]).collect();
        if active.len() < 2 {
            return false;
        }
        let mut changed = false;
        let a0 = active[0];
        let a1 = active[1];

        // Two-column QR: clear the first column below the head carrier,
        // then the second column below the second carrier.
        for &at in &active[1..] {
            if self.v1s[at] != 0.0 {
                self.rotate_v1(at, a0);
                changed = true;
            }
        }
        for &at in &active[2..] {
            if self.v2s[at] != 0.0 {
                self.rotate_v2(at, a1);
                changed = true;
            }
        }

        // Numerical rank of the cluster's coefficient block from the
        // triangular 2×2 the QR left behind: rows (r1, w0) and (0, w1).
        let (r1, w0, w1) = (self.v1s[a0], self.v2s[a0], self.v2s[a1]);
        let (sig1, sig2) = upper_2x2_singular_values(r1, w0, w1);

        if sig2 > self.tol * sig1 {
            // Rank two: the tail rows are clear; both carriers survive as an
            // exactly equal pair so downstream pole bookkeeping sees one
            // double pole.
            for &at in &active[2..] {
                debug_assert!(self.v1s[at] == 0.0 && self.v2s[at] == 0.0);
                self.resolve(at, DeflationCase::RepeatedRank2);
                changed = true;
            }
            let mean = 0.5 * (self.ds[a0] + self.ds[a1]);
            if self.ds[a0] != mean || self.ds[a1] != mean {
                self.ds[a0] = mean;
                self.ds[a1] = mean;
                changed = true;
            }
            self.rank1_carrier[a0] = false;
            self.rank1_carrier[a1] = false;
        } else {
            // Rank one: align the carriers with the block's left singular
            // directions, after which the second carrier holds only the
            // σ₂-sized residual and can be discarded.
            let (c, s) = dominant_left_rotation(r1, w0, w1);
            if s != 0.0 {
                self.rotate_rows(a1, a0, c, s);
            }
            self.v1s[a1] = 0.0;
            self.v2s[a1] = 0.0;
            self.resolve(a1, DeflationCase::RepeatedRank1Orthogonal);
            for &at in &active[2..] {
                self.resolve(at, DeflationCase::RepeatedRank1Orthogonal);
            }
            self.rank1_carrier[a0] = true;
            changed = true;
        }
        changed
    }

    /// One pass of cluster chaining over the full sorted diagonal (gaps
    /// `≤ tol` chain; dead rows inside a run are skipped by the collapse).
    fn cluster_pass(&mut self) -> bool {
        let n = self.n();
        let mut changed = false;
        let mut i = 0;
        while i < n {
            let mut j = i;
            while j + 1 < n && self.ds[j + 1] - self.ds[j] <= self.tol {
                j += 1;
            }
            if j > i {
                changed |= self.collapse_cluster(i, j);
            }
            i = j + 1;
        }
        changed
    }

    /// Whether `k`'s diagonal value is unique among live rows (i.e. `k` is
    /// not half of a surviving duplicate pair — pairs hold *exactly* equal
    /// values after the cluster collapse).
    fn is_unique(&self, k: usize) -> bool {
        (0..self.n()).all(|q| q == k || !self.alive[q] || self.ds[q] != self.ds[k])
    }

    /// `f₁₁(d_k) = 1 − β₁ Σ_{q≠k} v1_q²/(d_k − d_q)` and the magnitude of
    /// its accumulated terms.
    fn f11_at(&self, k: usize) -> (f64, f64) {
        let mut f = 1.0;
        let mut mag = 1.0;
        let mut terms = 0u64;
        for q in 0..self.n() {
            if q == k || self.v1s[q] == 0.0 {
                continue;
            }
            let t = self.beta1 * self.v1s[q] * self.v1s[q] / (self.ds[k] - self.ds[q]);
            f -= t;
            mag += fmath::abs(t);
            terms += 1;
        }
        flops::tally(3 * terms, 2 * terms, terms, 0);
        (f, mag)
    }

    /// `f₁₂(d_k)`: mirror of `f₁₁` with the second vector and `β₂`.
    fn f12_at(&self, k: usize) -> (f64, f64) {
        let mut f = 1.0;
        let mut mag = 1.0;
        let mut terms = 0u64;
        for q in 0..self.n() {
            if q == k || self.v2s[q] == 0.0 {
                continue;
            }
            let t = self.beta2 * self.v2s[q] * self.v2s[q] / (self.ds[k] - self.ds[q]);
            f -= t;
            mag += fmath::abs(t);
            terms += 1;
        }
        flops::tally(3 * terms, 2 * terms, terms, 0);
        (f, mag)
    }

    /// `f₂(d_k) = β₁v1_k² + β₂v2_k² − β₁β₂ Σ_{q≠k} (v1_k v2_q − v2_k v1_q)²
    /// / (d_k − d_q)` and its term magnitude.
    fn f2_at(&self, k: usize) -> (f64, f64) {
        let t1 = self.beta1 * self.v1s[k] * self.v1s[k];
        let t2 = self.beta2 * self.v2s[k] * self.v2s[k];
        let mut f = t1 + t2;
        let mut mag = fmath::abs(t1) + fmath::abs(t2);
        let b12 = self.beta1 * self.beta2;
        let mut terms = 0u64;
        for q in 0..self.n() {
            if q == k {
                continue;
            }
            let cross = self.v1s[k] * self.v2s[q] - self.v2s[k] * self.v1s[q];
            if cross == 0.0 {
                continue;
            }
            let t = b12 * cross * cross / (self.ds[k] - self.ds[q]);
            f -= t;
            mag += fmath::abs(t);
            terms += 1;
        }
        flops::tally(4 * terms + 3, 5 * terms + 4, terms, 0);
        (f, mag)
    }

    /// Eigenvector (in sorted/rotated coordinates, unnormalized) for a
    /// boundary value found by `f₁₁`: the row's first component is zero, so
    /// the vector is determined by `v₂ᵀx = 0` plus the per-row balance.
    fn f11_vector(&self, k: usize) -> Vec<f64> {
        let n = self.n();
        let mut x = vec![0.0; n];
        let mut dot2 = 0.0;
        for q in 0..n {
            if q == k || self.v1s[q] == 0.0 {
                continue;
            }
            x[q] = self.v1s[q] / (self.ds[k] - self.ds[q]);
            dot2 += self.v2s[q] * x[q];
        }
        x[k] = -dot2 / self.v2s[k];
        flops::tally(n as u64, n as u64, n as u64, 0);
        x
    }

    /// Mirror of [`Self::f11_vector`] for `f₁₂` (second component zero).
    fn f12_vector(&self, k: usize) -> Vec<f64> {
        let n = self.n();
        let mut x = vec![0.0; n];
        let mut dot1 = 0.0;
        for q in 0..n {
            if q == k || self.v2s[q] == 0.0 {
                continue;
            }
            x[q] = self.v2s[q] / (self.ds[k] - self.ds[q]);
            dot1 += self.v1s[q] * x[q];
        }
        x[k] = -dot1 / self.v1s[k];
        flops::tally(n as u64, n as u64, n as u64, 0);
        x
    }

    /// Eigenvector for a boundary value found by `f₂` (both components of
    /// row `k` alive).
    fn f2_vector(&self, k: usize) -> Vec<f64> {
        let n = self.n();
        let a = self.v1s[k];
        let b = self.v2s[k];
        let mut x = vec![0.0; n];
        let mut corr = 0.0;
        for q in 0..n {
            if q == k {
                continue;
            }
            let cross = a * self.v2s[q] - b * self.v1s[q];
            if cross == 0.0 {
                continue;
            }
            let ratio = cross / (self.ds[k] - self.ds[q]);
            x[q] = self.beta2 / a * ratio;
            corr += self.v1s[q] * ratio;
        }
        x[k] = -self.beta2 * b / (self.beta1 * a * a) - self.beta2 / (a * a) * corr;
        flops::tally(2 * n as u64 + 2, 4 * n as u64 + 4, n as u64 + 2, 0);
        x
    }
}

/// Singular values (descending) of the upper-triangular 2×2 block
/// `[[r1, w0], [0, w1]]`, computed in the cancellation-free product form.
fn upper_2x2_singular_values(r1: f64, w0: f64, w1: f64) -> (f64, f64) {
    let diff = fmath::abs(r1) - fmath::abs(w1);
    let q = diff * diff + w0 * w0;
    let sum = fmath::abs(r1) + fmath::abs(w1);
    let pq = sum * sum + w0 * w0;
    // Sum of squares and the two factors of (S² − 4·det²).
    let s = 0.5 * (q + pq);
    let sig1 = fmath::sqrt(0.5 * (s + fmath::sqrt(q * pq)));
    let sig2 = if sig1 > 0.0 {
        fmath::abs(r1 * w1) / sig1
    } else {
        0.0
    };
    flops::tally(6, 8, 1, 2);
    (sig1, sig2)
}

/// Rotation `(c, s)` aligning the rows of `[[r1, w0], [0, w1]]` with its
/// left singular directions: applied as rows `(a1, a0)` in the
/// [`GivensRot`] convention, the `a0` row becomes the dominant direction
/// and the `a1` row shrinks to the second singular value.
fn dominant_left_rotation(r1: f64, w0: f64, w1: f64) -> (f64, f64) {
    // Dominant eigenvector (u1, u2) of M·Mᵀ = [[p, q], [q, r]].
    let p = r1 * r1 + w0 * w0;
    let q = w0 * w1;
    let r = w1 * w1;
    if q == 0.0 {
        // Already aligned, or needs a plain swap when the second row wins.
        return if p >= r { (1.0, 0.0) } else { (0.0, 1.0) };
    }
    let mid = 0.5 * (p + r);
    let half = 0.5 * (p - r);
    let lam = mid + fmath::hypot(half, q);
    // Pick the better-conditioned of the two eigenvector expressions.
    let (u1, u2) = if fmath::abs(lam - r) >= fmath::abs(lam - p) {
        (lam - r, q)
    } else {
        (q, lam - p)
    };
    let norm = fmath::hypot(u1, u2);
    flops::tally(8, 7, 2, 2);
    (u1 / norm, u2 / norm)
}

/// Deflate `p`: sort, truncate, resolve null rows, collapse duplicate
/// clusters, and test the three discriminants on the survivors.
///
/// Total function: any input produces a reduced problem satisfying the
/// [`RankTwoDeflation`] invariants. `tol` should be positive (a zero
/// tolerance degenerates to exact-zero tests).
#[must_use]
pub fn deflate_rank_two(p: &RankTwoProblem, tol: f64) -> RankTwoDeflation {
    let n = p.n();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.sort_by(|&a, &b| p.d[a].total_cmp(&p.d[b]));
    let mut st = Scratch {
        tol,
        beta1: p.beta1,
        beta2: p.beta2,
        ds: perm.iter().map(|&i| p.d[i]).collect(),
        v1s: perm.iter().map(|&i| p.v1[i]).collect(),
        v2s: perm.iter().map(|&i| p.v2[i]).collect(),
        alive: vec![true; n],
        givens: Vec::new(),
        resolved_raw: Vec::new(),
        rank1_carrier: vec![false; n],
    };

    // Iterate until stable: every productive pass either zeroes a component,
    // kills a row, or performs a pair's one-time mean adjustment.
    let mut rounds = 0;
    loop {
        rounds += 1;
        debug_assert!(rounds <= 3 * n + 8, "deflation failed to stabilize");
        let mut changed = st.truncate_pass();
        changed |= st.cluster_pass();
        if !changed {
            break;
        }
    }

    // Discriminant scan on unique-valued survivors. Which test applies is
    // decided by the row's current state: a null first component selects
    // f₁₁, a null second selects f₁₂, and a row with both components alive
    // selects f₂ — which is exactly (the negative of) the secular residue
    // at the row's diagonal value, so a zero certifies that value as an
    // eigenvalue whose pole cancels. For same-sign modification scales the
    // f₂ terms cannot cancel on a plain row, but with mixed signs they can
    // and regularly do (degenerate spectra produce whole families of such
    // rows), so every survivor is a candidate.
    let mut boundary_raw: Vec<(usize, f64, DeflationCase, Vec<f64>)> = Vec::new();
    for k in 0..n {
        if !st.alive[k] || !st.is_unique(k) {
            continue;
        }
        let has_v1 = st.v1s[k] != 0.0;
        let has_v2 = st.v2s[k] != 0.0;
        let fired = if !has_v1 {
            let (f, mag) = st.f11_at(k);
            discriminant_is_zero(f, mag, n, tol).then(|| (DeflationCase::NullV1, st.f11_vector(k)))
        } else if !has_v2 {
            let (f, mag) = st.f12_at(k);
            discriminant_is_zero(f, mag, n, tol).then(|| (DeflationCase::NullV2, st.f12_vector(k)))
        } else {
            let (f, mag) = st.f2_at(k);
            let case = if st.rank1_carrier[k] {
                DeflationCase::RepeatedRank1Discriminant
            } else {
                DeflationCase::PlainResidueZero
            };
            discriminant_is_zero(f, mag, n, tol).then(|| (case, st.f2_vector(k)))
        };
        if let Some((case, x)) = fired {
            boundary_raw.push((k, st.ds[k], case, x));
        }
    }

    let keep: Vec<usize> = (0..n).filter(|&k| st.alive[k]).collect();
    let rd: Vec<f64> = keep.iter().map(|&k| st.ds[k]).collect();
    let rv1: Vec<f64> = keep.iter().map(|&k| st.v1s[k]).collect();
    let rv2: Vec<f64> = keep.iter().map(|&k| st.v2s[k]).collect();
    debug_assert!(
        rd.windows(2).all(|w| w[0] <= w[1]),
        "reduced diagonal must ascend"
    );
    debug_assert!(
        rd.windows(3).all(|w| w[0] < w[2]),
        "no diagonal value may survive thrice"
    );
    debug_assert!(
        rv1.iter().zip(&rv2).all(|(&a, &b)| a != 0.0 || b != 0.0),
        "no reduced row may have both components zero"
    );

    st.resolved_raw
        .sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    boundary_raw.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));

    let mut defl = RankTwoDeflation {
        perm,
        givens: core::mem::take(&mut st.givens),
        keep,
        resolved: Vec::new(),
        boundary: Vec::new(),
        reduced: RankTwoProblem {
            d: rd,
            v1: rv1,
            v2: rv2,
            beta1: p.beta1,
            beta2: p.beta2,
            head: None,
            boundary: Vec::new(),
        },
    };

    let mut basis = vec![0.0; n];
    for &(k, value, case) in &st.resolved_raw {
        basis[k] = 1.0;
        defl.resolved
            .push((value, defl.back_transform(&basis), case));
        basis[k] = 0.0;
    }
    for (k, value, case, x) in boundary_raw {
        let norm = fmath::sqrt(x.iter().map(|&t| t * t).sum::<f64>());
        let unit: Vec<f64> = x.iter().map(|&t| t / norm).collect();
        let reduced_index = defl
            .keep
            .binary_search(&k)
            .expect("boundary rows survive into the reduced problem");
        defl.reduced.boundary.push(reduced_index);
        defl.boundary.push(BoundaryPair {
            value,
            vector: defl.back_transform(&unit),
            case,
            reduced_index,
        });
    }
    defl
}
