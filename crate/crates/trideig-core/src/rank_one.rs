//! Rank-one divide-and-conquer eigensolver.
//!
//! The merge step solves the symmetric eigenproblem for `D + βvvᵀ` with `D`
//! diagonal: deflation first peels off eigenpairs that can be read off
//! directly (zero components of `v`, repeated entries of `D` collapsed by
//! plane rotations), the secular equation
//!
//! ```text
//! f(λ) = 1 − β Σ v_q² / (λ − d_q)
//! ```
//!
//! then yields the remaining eigenvalues — exactly one in each open interval
//! between consecutive surviving `d`'s, plus one beyond the end the sign of
//! `β` points at. Eigenvectors are *not* formed from the computed roots and
//! the original `v` (that loses orthogonality when eigenvalues cluster);
//! instead each `|v̂_i|` is recomputed from the product identity
//!
//! ```text
//! v̂_i² = ∏_j (λ̂_j − d_i) / (β · ∏_{j≠i} (d_j − d_i))
//! ```
//!
//! which makes the computed roots λ̂ *exact* eigenvalues of the nearby
//! problem `D + βv̂v̂ᵀ`, so the vector columns `(λ̂_jI − D)⁻¹v̂` are
//! orthogonal to working precision no matter how tight the spectrum is.
//!
//! [`solve_rank_one`] runs that whole merge for one diagonal-plus-rank-one
//! problem; [`cdc_solve`] is the recursive driver for tridiagonal matrices.
//! The merge engine is also reused by the rank-two solver's stable
//! eigenvector path, which chains two rank-one merges.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::flops::{self, Phase};
use crate::fmath;
use crate::qr::{enforce_sign_convention, qr_eigensolve, SpectralDecomposition};
use crate::roots::solve_bracketed;
use crate::tridiag::{block_diag_mul, split_two, Mat, SymTridiag};

/// The merge object `D + βvvᵀ`: diagonal entries `d`, modification vector
/// `v`, nonzero scale `beta`.
#[derive(Debug, Clone)]
pub struct RankOneProblem {
    /// Diagonal of `D`.
    pub d: Vec<f64>,
    /// Modification vector.
    pub v: Vec<f64>,
    /// Scale of the modification.
    pub beta: f64,
}

impl RankOneProblem {
    /// Validate lengths and a nonzero `beta`.
    pub fn new(d: Vec<f64>, v: Vec<f64>, beta: f64) -> Result<Self> {
        if d.len() != v.len() {
            return Err(Error::InvalidArgument(
                "diagonal and vector lengths must agree",
            ));
        }
        if beta == 0.0 {
            return Err(Error::InvalidArgument("beta must be nonzero"));
        }
        Ok(RankOneProblem { d, v, beta })
    }

    /// Problem order.
    #[must_use]
    pub fn n(&self) -> usize {
        self.d.len()
    }

    /// Deflation tolerance scaled to the merged matrix:
    /// `8·ε·max(‖d‖∞, |β|·‖v‖²)`.
    #[must_use]
    pub fn deflation_tolerance(&self) -> f64 {
        let dmax = self.d.iter().fold(0.0_f64, |m, &x| m.max(fmath::abs(x)));
        let vnorm2: f64 = self.v.iter().map(|&x| x * x).sum();
        8.0 * f64::EPSILON * dmax.max(fmath::abs(self.beta) * vnorm2)
    }

    /// Dense symmetric form (used by tests and oracles).
    #[must_use]
    pub fn to_dense(&self) -> crate::tridiag::DenseSym {
        let n = self.n();
        crate::tridiag::DenseSym::from_fn(n, |i, j| {
            let base = if i == j { self.d[i] } else { 0.0 };
            base + self.beta * self.v[i] * self.v[j]
        })
    }
}

/// One plane rotation on coordinates `(a, b)` of the sorted problem, chosen
/// to move all modification-vector mass from `a` to `b`.
#[derive(Debug, Clone, Copy)]
pub struct GivensRot {
    pub a: usize,
    pub b: usize,
    pub c: f64,
    pub s: f64,
}

/// Outcome of deflating a [`RankOneProblem`].
///
/// The problem is first permuted so `d` ascends, then rotations collapse
/// (near-)equal diagonal entries, then every index with `|v_i| ≤ tol` is
/// resolved as an immediate eigenpair. What survives is `reduced`, with
/// strictly increasing `d` and all `|v_i| > tol`.
#[derive(Debug, Clone)]
pub struct RankOneDeflation {
    /// Sorting permutation: `perm[k]` is the original index of the `k`-th
    /// smallest diagonal entry.
    pub perm: Vec<usize>,
    /// Rotations applied in sorted coordinates, in application order.
    pub givens: Vec<GivensRot>,
    /// Sorted-coordinate indices that survived into the reduced problem.
    pub keep: Vec<usize>,
    /// Immediately resolved eigenpairs, eigenvectors in the original
    /// (pre-permutation) coordinates.
    pub resolved: Vec<(f64, Vec<f64>)>,
    /// The surviving problem.
    pub reduced: RankOneProblem,
}

impl RankOneDeflation {
    /// Map a vector from deflated (sorted + rotated) coordinates back to the
    /// problem's original coordinates.
    #[must_use]
    pub fn back_transform(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        // Inverse rotations in reverse application order.
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

/// Deflate `p`: sort, collapse (near-)equal diagonal entries with rotations,
/// resolve every index whose modification component is below `tol`.
///
/// Total function: any input produces a (possibly empty) reduced problem
/// whose diagonal is strictly increasing with all `|v_i| > tol`.
#[must_use]
pub fn cdc_deflate(p: &RankOneProblem, tol: f64) -> RankOneDeflation {
    let n = p.n();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.sort_by(|&a, &b| p.d[a].total_cmp(&p.d[b]));
    let ds: Vec<f64> = perm.iter().map(|&i| p.d[i]).collect();
    let mut vs: Vec<f64> = perm.iter().map(|&i| p.v[i]).collect();

    // Pass 1: chain clusters of consecutive diagonal entries with gaps ≤ tol
    // and rotate each cluster's modification mass into its last member with
    // |v| above tolerance.
    let mut givens: Vec<GivensRot> = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && ds[j + 1] - ds[j] <= tol {
            j += 1;
        }
        if j > i {
            let active: Vec<usize> = (i..=j).filter(|&k| fmath::abs(vs[k]) > tol).collect();
            for t in 0..active.len().saturating_sub(1) {
                let a = active[t];
                let b = active[t + 1];
                let r = fmath::hypot(vs[a], vs[b]);
                let g = GivensRot {
                    a,
                    b,
                    c: vs[b] / r,
                    s: vs[a] / r,
                };
                vs[a] = 0.0;
                vs[b] = r;
                givens.push(g);
            }
        }
        i = j + 1;
    }
    flops::tally(
        givens.len() as u64,
        2 * givens.len() as u64,
        2 * givens.len() as u64,
        givens.len() as u64,
    );

    // Pass 2: resolve all indices with |v| ≤ tol; keep the rest.
    let mut keep = Vec::new();
    let mut resolved = Vec::new();
    let mut basis = vec![0.0; n];
    let mut defl = RankOneDeflation {
        perm,
        givens,
        keep: Vec::new(),
        resolved: Vec::new(),
        reduced: RankOneProblem {
            d: Vec::new(),
            v: Vec::new(),
            beta: p.beta,
        },
    };
    for k in 0..n {
        if fmath::abs(vs[k]) <= tol {
            vs[k] = 0.0;
            basis[k] = 1.0;
            resolved.push((ds[k], defl.back_transform(&basis)));
            basis[k] = 0.0;
        } else {
            keep.push(k);
        }
    }
    let rd: Vec<f64> = keep.iter().map(|&k| ds[k]).collect();
    let rv: Vec<f64> = keep.iter().map(|&k| vs[k]).collect();
    debug_assert!(
        rd.windows(2).all(|w| w[0] < w[1]),
        "reduced diagonal must strictly increase"
    );
    defl.keep = keep;
    defl.resolved = resolved;
    defl.reduced = RankOneProblem {
        d: rd,
        v: rv,
        beta: p.beta,
    };
    defl
}

/// A secular root in pole-anchored form: `λ = d[anchor] + tau`, where
/// `anchor` is the index of the nearest pole of the root's interval.
///
/// Keeping the pair instead of the collapsed sum is what makes the stable
/// eigenvector reconstruction work: the distance from the root to its
/// nearest pole is held to full *relative* precision in `tau`, while in
/// `fl(d + tau)` it would be rounded to an absolute `ε·|λ|`, which can be a
/// large relative error when the root hugs a pole.
#[derive(Debug, Clone, Copy)]
pub(crate) struct AnchoredRoot {
    pub anchor: usize,
    pub tau: f64,
}

impl AnchoredRoot {
    /// Collapsed value `d[anchor] + tau`.
    pub(crate) fn value(&self, d: &[f64]) -> f64 {
        d[self.anchor] + self.tau
    }

    /// `λ − d_i`, evaluated through the anchor: `(d[anchor] − d_i) + tau`.
    /// Exact `tau` for the anchor pole itself; one rounding otherwise.
    pub(crate) fn dist(&self, d: &[f64], i: usize) -> f64 {
        (d[self.anchor] - d[i]) + self.tau
    }
}

/// Evaluate the secular function and its derivative at `d[anchor] + tau`
/// using precomputed pole offsets `deltas[i] = d_i − d[anchor]`:
///
/// ```text
/// f = 1 − β Σ v_i²/(τ − δ_i),   f′ = β Σ v_i²/(τ − δ_i)²
/// ```
///
/// Every denominator is the exact working quantity for its pole (for the
/// anchor itself, exactly `τ`), so evaluation error stays proportional to
/// the local term sizes rather than to `ε·|λ|`.
fn shifted_secular(p: &RankOneProblem, deltas: &[f64], tau: f64) -> (f64, f64) {
    let mut f = 1.0;
    let mut fp = 0.0;
    for (&delta, &v) in deltas.iter().zip(p.v.iter()) {
        let t = v / (tau - delta);
        f -= p.beta * v * t;
        fp += t * t;
    }
    fp *= p.beta;
    let m = p.n() as u64;
    flops::tally(3 * m, 3 * m + 1, m, 0);
    (f, fp)
}

/// `deltas[i] = d_i − d[anchor]` (exactly zero at the anchor).
fn pole_offsets(d: &[f64], anchor: usize) -> Vec<f64> {
    d.iter().map(|&x| x - d[anchor]).collect()
}

/// Widen an exterior offset until the secular function is positive at
/// `d[anchor] + dir·w` (guaranteed eventually: `f → 1` away from the
/// spectrum).
fn widen_exterior(p: &RankOneProblem, deltas: &[f64], step0: f64, dir: f64) -> f64 {
    let mut w = step0.max(f64::MIN_POSITIVE);
    for _ in 0..128 {
        if shifted_secular(p, deltas, dir * w).0 > 0.0 {
            return w;
        }
        w *= 2.0;
    }
    w
}

/// Solve the root in the interior interval `(d_q, d_{q+1})` of a deflated
/// problem, anchored at the nearer endpoint.
fn solve_interior(p: &RankOneProblem, q: usize) -> AnchoredRoot {
    // Probe the midpoint in coordinates shifted to the left pole; the sign
    // of f there picks the half-interval (f runs −∞ → +∞ across the
    // interval for β > 0, +∞ → −∞ for β < 0).
    let deltas_left = pole_offsets(&p.d, q);
    let half = 0.5 * (p.d[q + 1] - p.d[q]);
    let fm = shifted_secular(p, &deltas_left, half).0;
    if fm == 0.0 {
        return AnchoredRoot {
            anchor: q,
            tau: half,
        };
    }
    let root_in_left_half = (fm > 0.0) == (p.beta > 0.0);
    if root_in_left_half {
        let pole_sign = if p.beta > 0.0 { -1.0 } else { 1.0 };
        let tau = solve_bracketed(
            |t| shifted_secular(p, &deltas_left, t),
            0.0,
            half,
            pole_sign,
            -pole_sign,
        );
        AnchoredRoot { anchor: q, tau }
    } else {
        let deltas_right = pole_offsets(&p.d, q + 1);
        let pole_sign = if p.beta > 0.0 { 1.0 } else { -1.0 };
        let tau = solve_bracketed(
            |t| shifted_secular(p, &deltas_right, t),
            -half,
            0.0,
            -pole_sign,
            pole_sign,
        );
        AnchoredRoot { anchor: q + 1, tau }
    }
}

/// Solve the exterior root of a deflated problem: right of `d_{m−1}` for
/// `β > 0`, left of `d_0` for `β < 0`; anchored at the edge pole.
fn solve_exterior(p: &RankOneProblem) -> AnchoredRoot {
    let m = p.n();
    let vnorm2: f64 = p.v.iter().map(|&x| x * x).sum();
    let spread = fmath::abs(p.beta) * vnorm2;
    if p.beta > 0.0 {
        let deltas = pole_offsets(&p.d, m - 1);
        let w = widen_exterior(p, &deltas, spread, 1.0);
        let tau = solve_bracketed(|t| shifted_secular(p, &deltas, t), 0.0, w, -1.0, 1.0);
        AnchoredRoot { anchor: m - 1, tau }
    } else {
        let deltas = pole_offsets(&p.d, 0);
        let w = widen_exterior(p, &deltas, spread, -1.0);
        let tau = solve_bracketed(|t| shifted_secular(p, &deltas, t), -w, 0.0, 1.0, -1.0);
        AnchoredRoot { anchor: 0, tau }
    }
}

/// All secular roots of a deflated problem in anchored form, ascending.
pub(crate) fn secular_roots_anchored(p: &RankOneProblem) -> Vec<AnchoredRoot> {
    let m = p.n();
    let mut roots = Vec::with_capacity(m);
    if m == 0 {
        return roots;
    }
    if p.beta < 0.0 {
        roots.push(solve_exterior(p));
    }
    for q in 0..m - 1 {
        roots.push(solve_interior(p, q));
    }
    if p.beta > 0.0 {
        roots.push(solve_exterior(p));
    }
    roots
}

/// Roots of the secular equation of an already-deflated problem: one in each
/// open interval between consecutive diagonal entries, plus one exterior
/// root on the right when `β > 0` (on the left when `β < 0`). Ascending.
#[must_use]
pub fn cdc_secular_roots(p: &RankOneProblem) -> Vec<f64> {
    secular_roots_anchored(p)
        .iter()
        .map(|r| r.value(&p.d))
        .collect()
}

/// Check the strict interlacing pattern of secular roots against the
/// diagonal, per the sign of `β`.
fn check_interlacing(p: &RankOneProblem, roots: &[f64]) -> Result<()> {
    let m = p.n();
    for j in 0..m {
        // For β > 0 root j lives in (d_j, d_{j+1}); for β < 0 in (d_{j−1}, d_j).
        let (lo, hi) = if p.beta > 0.0 {
            (
                Some(p.d[j]),
                if j + 1 < m { Some(p.d[j + 1]) } else { None },
            )
        } else {
            (if j > 0 { Some(p.d[j - 1]) } else { None }, Some(p.d[j]))
        };
        if let Some(lo) = lo {
            if roots[j] < lo {
                return Err(Error::InterlacingViolated { index: j });
            }
        }
        if let Some(hi) = hi {
            if roots[j] > hi {
                return Err(Error::InterlacingViolated { index: j });
            }
        }
    }
    Ok(())
}

/// Re-derive anchored form for externally supplied (collapsed) roots: pick
/// the nearer interval endpoint as anchor and polish `tau` with safeguarded
/// Newton steps in shifted coordinates. Restores the gap-relative accuracy
/// that collapsing to a plain `f64` discarded.
fn refine_anchored(p: &RankOneProblem, roots: &[f64]) -> Result<Vec<AnchoredRoot>> {
    let m = p.n();
    let mut out = Vec::with_capacity(m);
    for (j, &lam) in roots.iter().enumerate() {
        // Interval endpoints for root j under the β-sign pattern.
        let (left, right) = if p.beta > 0.0 {
            (Some(j), if j + 1 < m { Some(j + 1) } else { None })
        } else {
            (if j > 0 { Some(j - 1) } else { None }, Some(j))
        };
        let anchor = match (left, right) {
            (Some(l), Some(r)) => {
                if lam - p.d[l] <= p.d[r] - lam {
                    l
                } else {
                    r
                }
            }
            (Some(l), None) => l,
            (None, Some(r)) => r,
            (None, None) => unreachable!("interval must have a finite endpoint"),
        };
        let deltas = pole_offsets(&p.d, anchor);
        // Bracket for tau from the interval geometry (open at the poles).
        let (tlo, thi) = match (left, right) {
            (Some(l), Some(r)) => {
                if anchor == l {
                    (0.0, p.d[r] - p.d[l])
                } else {
                    (p.d[l] - p.d[r], 0.0)
                }
            }
            (Some(_), None) => (0.0, f64::INFINITY),
            (None, Some(_)) => (f64::NEG_INFINITY, 0.0),
            (None, None) => unreachable!(),
        };
        let mut tau = lam - p.d[anchor];
        if !(tau > tlo && tau < thi) {
            return Err(Error::InterlacingViolated { index: j });
        }
        for _ in 0..40 {
            let (g, gp) = shifted_secular(p, &deltas, tau);
            if g == 0.0 || gp == 0.0 {
                break;
            }
            let step = g / gp;
            let mut next = tau - step;
            // Keep strictly inside the open interval.
            if next <= tlo {
                next = 0.5 * (tau + tlo.max(-f64::MAX));
            }
            if next >= thi {
                next = 0.5 * (tau + thi.min(f64::MAX));
            }
            let done = fmath::abs(next - tau) <= 2.0 * f64::EPSILON * fmath::abs(tau);
            tau = next;
            if done {
                break;
            }
        }
        out.push(AnchoredRoot { anchor, tau });
    }
    Ok(out)
}

/// Eigenvector construction from anchored roots; see [`cdc_stable_vectors`].
pub(crate) fn stable_vectors_anchored(p: &RankOneProblem, roots: &[AnchoredRoot]) -> Result<Mat> {
    let m = p.n();
    assert_eq!(
        roots.len(),
        m,
        "need exactly one root per surviving diagonal entry"
    );
    // Strict interlacing in anchored form: every distance λ_j − d_i must be
    // nonzero with the sign its interval dictates.
    for (j, r) in roots.iter().enumerate() {
        let expect_pos = if p.beta > 0.0 {
            r.anchor == j
        } else {
            r.anchor + 1 == j
        };
        let ok = if expect_pos { r.tau > 0.0 } else { r.tau < 0.0 };
        let anchor_ok = if p.beta > 0.0 {
            r.anchor == j || r.anchor == j + 1
        } else {
            r.anchor == j || r.anchor + 1 == j
        };
        if !(ok && anchor_ok) {
            return Err(Error::InterlacingViolated { index: j });
        }
    }

    // v̂_i² = ∏_j (λ̂_j − d_i) / (β ∏_{j≠i} (d_j − d_i)), computed as a
    // product of paired ratios to keep intermediates of moderate size; every
    // root-to-pole distance goes through the anchored representation.
    let mut vhat = vec![0.0; m];
    for i in 0..m {
        let mut acc = roots[i].dist(&p.d, i) / p.beta;
        for j in 0..m {
            if j != i {
                acc *= roots[j].dist(&p.d, i) / (p.d[j] - p.d[i]);
            }
        }
        vhat[i] = fmath::copysign(fmath::sqrt(fmath::abs(acc)), p.v[i]);
    }
    flops::tally(3 * (m * m) as u64, (m * m) as u64, (m * m) as u64, m as u64);

    let mut out = Mat::zeros(m, m);
    for j in 0..m {
        let mut norm2 = 0.0;
        for i in 0..m {
            let x = vhat[i] / roots[j].dist(&p.d, i);
            out.set(i, j, x);
            norm2 += x * x;
        }
        let inv = 1.0 / fmath::sqrt(norm2);
        for i in 0..m {
            let x = out.at(i, j) * inv;
            out.set(i, j, x);
        }
    }
    flops::tally(
        3 * (m * m) as u64,
        2 * (m * m) as u64,
        (m * m) as u64 + m as u64,
        m as u64,
    );
    Ok(out)
}

/// Orthogonality-preserving eigenvector computation for a deflated problem
/// and its secular roots.
///
/// Recomputes each `|v̂_i|` from the product identity over the computed
/// roots (sign taken from the input vector), then returns the normalized
/// columns `(λ̂_jI − D)⁻¹ v̂`. Column `j` pairs with `roots[j]`. The roots
/// are internally re-anchored to their nearest pole and polished in shifted
/// coordinates, so root-to-pole distances enter the products at full
/// relative precision.
///
/// # Errors
/// [`Error::InterlacingViolated`] when the roots do not strictly interlace
/// the diagonal; that indicates an upstream root-finder failure.
pub fn cdc_stable_vectors(p: &RankOneProblem, roots: &[f64]) -> Result<Mat> {
    let m = p.n();
    assert_eq!(
        roots.len(),
        m,
        "need exactly one root per surviving diagonal entry"
    );
    check_interlacing(p, roots)?;
    let anchored = refine_anchored(p, roots)?;
    stable_vectors_anchored(p, &anchored)
}

/// Full spectral decomposition of a diagonal-plus-rank-one problem:
/// deflate, solve the secular equation, rebuild stable eigenvectors, and
/// merge resolved and secular eigenpairs in ascending order (ties resolved
/// deflation-first for determinism). Vectors are in `p`'s coordinates.
///
/// # Errors
/// Propagates eigenvector-construction failures.
pub fn solve_rank_one(p: &RankOneProblem) -> Result<SpectralDecomposition> {
    let n = p.n();
    if n == 0 {
        return SpectralDecomposition::new(Vec::new(), Some(Mat::zeros(0, 0)));
    }
    let tol = p.deflation_tolerance();
    let defl = {
        let _g = flops::phase(Phase::Deflate);
        cdc_deflate(p, tol)
    };
    let anchored = {
        let _g = flops::phase(Phase::Secular);
        secular_roots_anchored(&defl.reduced)
    };
    let roots: Vec<f64> = anchored.iter().map(|r| r.value(&defl.reduced.d)).collect();
    let _g = flops::phase(Phase::Vectors);
    let secular_cols = stable_vectors_anchored(&defl.reduced, &anchored)?;

    // Merge resolved and secular eigenpairs in ascending order.
    let mut vals = Vec::with_capacity(n);
    let mut vectors = Mat::zeros(n, n);
    let mut ri = 0; // next resolved pair
    let mut si = 0; // next secular root
    let mut full = vec![0.0; n];
    for col in 0..n {
        let take_resolved = match (defl.resolved.get(ri), roots.get(si)) {
            (Some((rv, _)), Some(sv)) => rv <= sv,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => unreachable!("ran out of eigenpairs"),
        };
        if take_resolved {
            let (val, vec_orig) = &defl.resolved[ri];
            vals.push(*val);
            vectors.set_col(col, vec_orig);
            ri += 1;
        } else {
            vals.push(roots[si]);
            for x in full.iter_mut() {
                *x = 0.0;
            }
            for (r, &k) in defl.keep.iter().enumerate() {
                full[k] = secular_cols.at(r, si);
            }
            let orig = defl.back_transform(&full);
            vectors.set_col(col, &orig);
            si += 1;
        }
    }
    SpectralDecomposition::new(vals, Some(vectors))
}

/// Split `t` in half, solve both halves with `child`, and glue the results
/// through one rank-one merge.
///
/// Shared by [`cdc_solve`] and the three-way driver's small-matrix
/// fallback, which differ only in how the halves are solved.
pub(crate) fn solve_two_way_with(
    t: &SymTridiag,
    child: &dyn Fn(&SymTridiag) -> Result<SpectralDecomposition>,
) -> Result<SpectralDecomposition> {
    let n = t.n();
    let split = split_two(t, n.div_ceil(2))?;
    let (dec1, dec2) = {
        let _g = flops::phase(Phase::Decompose);
        (child(&split.t1)?, child(&split.t2)?)
    };

    // Merge object: D = child eigenvalues, v = Qᵀw picks the last row of Q₁
    // and the first row of Q₂.
    let k = split.k;
    let mut d = Vec::with_capacity(n);
    d.extend_from_slice(dec1.eigenvalues());
    d.extend_from_slice(dec2.eigenvalues());
    let q1 = dec1.vectors_unchecked();
    let q2 = dec2.vectors_unchecked();
    let mut v = Vec::with_capacity(n);
    v.extend_from_slice(q1.row(k - 1));
    v.extend_from_slice(q2.row(0));
    let merged = RankOneProblem {
        d,
        v,
        beta: split.beta,
    };

    let mdec = solve_rank_one(&merged)?;
    let _g = flops::phase(Phase::Vectors);
    let mut q = block_diag_mul(&[q1, q2], mdec.vectors_unchecked());
    enforce_sign_convention(&mut q);
    SpectralDecomposition::new(mdec.eigenvalues().to_vec(), Some(q))
}

/// Divide-and-conquer eigensolver for symmetric tridiagonal matrices via
/// two-way splitting and rank-one merging.
///
/// Matrices of order at most `base_cutoff` go straight to
/// [`qr_eigensolve`]; zero off-diagonal entries decouple the matrix into
/// independent blocks which are solved separately.
///
/// # Errors
/// Propagates solver failures from children and the merge.
pub fn cdc_solve(t: &SymTridiag, base_cutoff: usize) -> Result<SpectralDecomposition> {
    if base_cutoff < 1 {
        return Err(Error::InvalidArgument("base cutoff must be at least 1"));
    }
    let n = t.n();
    if n <= base_cutoff || n == 1 {
        return qr_eigensolve(t, true);
    }
    if t.offdiag().iter().any(|&e| e == 0.0) {
        return crate::qr::solve_decoupled(t, |block| cdc_solve(block, base_cutoff));
    }
    solve_two_way_with(t, &|block| cdc_solve(block, base_cutoff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{orthogonality_measure, residual_measure};
    use crate::qr::dense_eigensolve;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn oracle_eigenvalues(p: &RankOneProblem) -> Vec<f64> {
        dense_eigensolve(&p.to_dense())
            .unwrap()
            .eigenvalues()
            .to_vec()
    }

    fn assert_spectra_match(got: &[f64], want: &[f64], tol: f64, what: &str) {
        assert_eq!(got.len(), want.len(), "{what}: cardinality mismatch");
        for (g, w) in got.iter().zip(want.iter()) {
            assert!((g - w).abs() <= tol, "{what}: {g} vs {w} (tol {tol})");
        }
    }

    #[test]
    fn deflate_zero_vector_resolves_everything() {
        let p = RankOneProblem::new(vec![3.0, 1.0, 2.0], vec![0.0, 0.0, 0.0], 1.0).unwrap();
        let defl = cdc_deflate(&p, p.deflation_tolerance());
        assert_eq!(defl.reduced.n(), 0);
        assert_eq!(defl.resolved.len(), 3);
        // Sorted ascending, eigenvectors are permuted basis vectors.
        assert_eq!(defl.resolved[0].0, 1.0);
        assert_eq!(defl.resolved[0].1, vec![0.0, 1.0, 0.0]);
        assert_eq!(defl.resolved[2].0, 3.0);
        assert_eq!(defl.resolved[2].1, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn deflate_equal_diagonal_pair() {
        // d = [1, 1], v = [3, 4]: one rotation concentrates the mass; the
        // rotated basis vector is an exact eigenvector for eigenvalue 1.
        let p = RankOneProblem::new(vec![1.0, 1.0], vec![3.0, 4.0], 1.0).unwrap();
        let defl = cdc_deflate(&p, p.deflation_tolerance());
        assert_eq!(defl.givens.len(), 1);
        assert_eq!(defl.resolved.len(), 1);
        assert_eq!(defl.reduced.n(), 1);
        assert!(
            (defl.reduced.v[0].abs() - 5.0).abs() < 1e-15,
            "v mass {}",
            defl.reduced.v[0]
        );
        let (val, vec) = &defl.resolved[0];
        assert_eq!(*val, 1.0);
        // Residual against the undeflated matrix: A x = 1·x.
        let a = p.to_dense();
        let ax = a.as_mat().mul_vec(vec);
        for i in 0..2 {
            assert!((ax[i] - vec[i]).abs() < 1e-14, "residual in component {i}");
        }
        // Full solve: eigenvalues {1, 27 − 1 = 26}? trace = 10 + 17 = 27.
        let dec = solve_rank_one(&p).unwrap();
        assert_spectra_match(dec.eigenvalues(), &[1.0, 26.0], 1e-13, "2x2 equal-d");
    }

    #[test]
    fn deflate_random_with_planted_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 12;
        let mut d: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        d[7] = d[3]; // equal pair
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        v[5] = 0.0; // zero component
        let p = RankOneProblem::new(d, v, -0.8).unwrap();
        let defl = cdc_deflate(&p, p.deflation_tolerance());
        assert!(
            defl.resolved.len() >= 2,
            "zero component and equal pair must deflate"
        );

        // Joint spectrum (resolved ∪ reduced) must equal the full oracle.
        let mut joint: Vec<f64> = defl.resolved.iter().map(|(v, _)| *v).collect();
        joint.extend(oracle_eigenvalues(&defl.reduced));
        joint.sort_by(f64::total_cmp);
        let want = oracle_eigenvalues(&p);
        assert_spectra_match(
            &joint,
            &want,
            1e-12 * p.to_dense().inf_norm(),
            "joint spectrum",
        );
    }

    #[test]
    fn secular_root_order_one() {
        let p = RankOneProblem::new(vec![0.0], vec![1.0], 2.0).unwrap();
        let roots = cdc_secular_roots(&p);
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - 2.0).abs() < 1e-14, "root {}", roots[0]);
    }

    #[test]
    fn secular_roots_two_by_two_quadratic() {
        let s = 0.5_f64.sqrt();
        let p = RankOneProblem::new(vec![0.0, 1.0], vec![s, s], 1.0).unwrap();
        let roots = cdc_secular_roots(&p);
        let want = [1.0 - 0.5_f64.sqrt(), 1.0 + 0.5_f64.sqrt()];
        assert_spectra_match(&roots, &want, 1e-14, "quadratic roots");
    }

    #[test]
    fn secular_roots_match_oracle_both_signs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for beta in [1.3, -0.7] {
            let m = 10;
            let mut d: Vec<f64> = (0..m).map(|_| rng.gen_range(-3.0..3.0)).collect();
            d.sort_by(f64::total_cmp);
            for i in 1..m {
                // Enforce honest gaps so the problem counts as deflated.
                if d[i] - d[i - 1] < 1e-3 {
                    d[i] = d[i - 1] + 1e-3;
                }
            }
            let v: Vec<f64> = (0..m)
                .map(|_| {
                    let x: f64 = rng.gen_range(0.2..1.0);
                    if rng.gen_bool(0.5) {
                        x
                    } else {
                        -x
                    }
                })
                .collect();
            let p = RankOneProblem::new(d, v, beta).unwrap();
            let roots = cdc_secular_roots(&p);
            let want = oracle_eigenvalues(&p);
            assert_spectra_match(
                &roots,
                &want,
                1e-12 * p.to_dense().inf_norm(),
                "secular roots vs oracle",
            );
        }
    }

    #[test]
    fn stable_vectors_order_one() {
        let p = RankOneProblem::new(vec![0.0], vec![1.0], 2.0).unwrap();
        let vm = cdc_stable_vectors(&p, &[2.0]).unwrap();
        assert_eq!(vm.at(0, 0), 1.0);
    }

    #[test]
    fn stable_vectors_match_oracle_columns() {
        let s = 0.5_f64.sqrt();
        let p = RankOneProblem::new(vec![0.0, 1.0], vec![s, s], 1.0).unwrap();
        let roots = cdc_secular_roots(&p);
        let vm = cdc_stable_vectors(&p, &roots).unwrap();
        let oracle = dense_eigensolve(&p.to_dense()).unwrap();
        let ov = oracle.vectors_unchecked();
        for j in 0..2 {
            // Match up to sign.
            let dot: f64 = (0..2).map(|i| vm.at(i, j) * ov.at(i, j)).sum();
            let sign = if dot >= 0.0 { 1.0 } else { -1.0 };
            for i in 0..2 {
                assert!(
                    (vm.at(i, j) - sign * ov.at(i, j)).abs() < 1e-10,
                    "column {j} entry {i}: {} vs {}",
                    vm.at(i, j),
                    sign * ov.at(i, j)
                );
            }
        }
    }

    #[test]
    fn stable_vectors_survive_clustered_diagonal() {
        // Pairs of diagonal entries 1e−12 apart: the classic case where
        // computing vectors from the original v loses orthogonality.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let m = 40;
        let mut d = Vec::with_capacity(m);
        for k in 0..m / 2 {
            d.push(k as f64);
            d.push(k as f64 + 1e-12);
        }
        let v: Vec<f64> = (0..m)
            .map(|_| {
                let x: f64 = rng.gen_range(0.5..1.5);
                if rng.gen_bool(0.5) {
                    x
                } else {
                    -x
                }
            })
            .collect();
        let p = RankOneProblem::new(d, v, 1.0).unwrap();
        let roots = cdc_secular_roots(&p);
        let vm = cdc_stable_vectors(&p, &roots).unwrap();
        let dec = SpectralDecomposition::new(roots, Some(vm)).unwrap();
        let o = orthogonality_measure(&dec);
        assert!(o <= 5.0, "orthogonality measure {o} on clustered spectrum");
        let r = residual_measure(&p.to_dense(), &dec);
        assert!(r <= 5.0, "residual measure {r} on clustered spectrum");
    }

    #[test]
    fn interlacing_violation_is_reported() {
        let p = RankOneProblem::new(vec![0.0, 1.0], vec![0.6, 0.6], 1.0).unwrap();
        // Both "roots" in the same interval: violates the β > 0 pattern.
        let err = cdc_stable_vectors(&p, &[0.4, 0.5]).unwrap_err();
        assert!(matches!(err, Error::InterlacingViolated { .. }));
    }

    #[test]
    fn solve_base_case_equals_qr() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let diag: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let off: Vec<f64> = (0..7).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let t = SymTridiag::new(diag, off).unwrap();
        let via_cdc = cdc_solve(&t, 25).unwrap();
        let via_qr = qr_eigensolve(&t, true).unwrap();
        assert_eq!(
            via_cdc.eigenvalues(),
            via_qr.eigenvalues(),
            "base case must be QR verbatim"
        );
        assert_eq!(via_cdc.vectors_unchecked(), via_qr.vectors_unchecked());
    }

    #[test]
    fn solve_laplacian_m3_matches_analytic() {
        let (t, _) = crate::tridiag::householder_tridiagonalize(&crate::tridiag::laplacian_2d(3));
        let dec = cdc_solve(&t, 4).unwrap();
        let want = crate::tridiag::laplacian_2d_eigenvalues(3);
        for (g, w) in dec.eigenvalues().iter().zip(want.iter()) {
            assert!((g - w).abs() <= 1e-12 * w.abs(), "{g} vs analytic {w}");
        }
        let a = t.to_dense();
        assert!(residual_measure(&a, &dec) <= 5.0);
        assert!(orthogonality_measure(&dec) <= 5.0);
    }

    #[test]
    fn solve_random_n100_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100;
        let diag: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let off: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let t = SymTridiag::new(diag, off).unwrap();
        let dec = cdc_solve(&t, 25).unwrap();
        let oracle = dense_eigensolve(&t.to_dense()).unwrap();
        let tol = n as f64 * f64::EPSILON * t.to_dense().inf_norm();
        assert_spectra_match(
            dec.eigenvalues(),
            oracle.eigenvalues(),
            tol,
            "n=100 spectrum",
        );
        assert!(residual_measure(&t.to_dense(), &dec) <= 5.0);
        assert!(orthogonality_measure(&dec) <= 5.0);
    }

    #[test]
    fn solve_handles_decoupled_matrix() {
        let t = SymTridiag::new(vec![2.0, 0.0, -1.0, 3.0], vec![1.0, 0.0, 0.5]).unwrap();
        let dec = cdc_solve(&t, 1).unwrap();
        let oracle = dense_eigensolve(&t.to_dense()).unwrap();
        assert_spectra_match(
            dec.eigenvalues(),
            oracle.eigenvalues(),
            1e-13,
            "decoupled spectrum",
        );
        assert!(orthogonality_measure(&dec) <= 5.0);
        assert!(residual_measure(&t.to_dense(), &dec) <= 5.0);
    }

    #[test]
    fn spectrum_equals_oracle_randomized() {
        for seed in 0..12u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let n = rng.gen_range(2..30);
            let diag: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let off: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let t = SymTridiag::new(diag, off).unwrap();
            let dec = cdc_solve(&t, 5).unwrap();
            let oracle = dense_eigensolve(&t.to_dense()).unwrap();
            let tol = n as f64 * f64::EPSILON * t.to_dense().inf_norm();
            assert_spectra_match(
                dec.eigenvalues(),
                oracle.eigenvalues(),
                tol,
                "randomized spectrum",
            );
        }
    }
}
