//! Rank-two divide-and-conquer eigensolver.
//!
//! A symmetric tridiagonal matrix is cut at *two* off-diagonal positions
//! into three blocks plus two rank-one corrections. After the blocks are
//! solved, the merge problem is
//!
//! ```text
//! M = D + β₁v₁v₁ᵀ + β₂v₂v₂ᵀ
//! ```
//!
//! with `D` diagonal (the children's eigenvalues) and `v₁`, `v₂` built from
//! two rows each of the children's eigenvector matrices ([`form_rank_two`]).
//!
//! The merge pipeline generalizes the rank-one one, and every stage gets
//! harder:
//!
//! * **Deflation** ([`deflate_rank_two`]) has four cases instead of two:
//!   rows where both components vanish, duplicate-diagonal clusters collapsed
//!   through a two-column QR factorization (leaving up to *two* carrier rows
//!   per cluster), and three scalar discriminants that detect when a
//!   surviving diagonal entry is itself an eigenvalue. A fired discriminant
//!   produces a [`BoundaryPair`]: the eigenpair is recorded, but its row must
//!   stay in the reduced problem because it still couples to the others.
//! * **The secular equation** ([`secular_eval`]) is no longer monotone
//!   between poles — each open interval between adjacent surviving diagonal
//!   values contains zero, one, or two roots. [`classify_intervals`] counts
//!   them from one-sided limit signs at each pole (the residues `g±` of
//!   [`g_signs`]) plus a stationary-point sign test in the ambiguous
//!   even-parity intervals, and [`secular_roots`] extracts them with the
//!   stationary points as interval splitters.
//! * **Eigenvectors** come either from the direct two-parameter formula
//!   ([`rank_two_vectors`]), which can lose orthogonality on clustered
//!   spectra, or from re-solving the merge as two chained rank-one
//!   modifications ([`rank_two_vectors_stable`]), which keeps the
//!   orthogonality guarantees of the rank-one engine.
//!
//! [`rtdc_solve`] is the recursive driver over all of this.

mod deflate;
mod secular;
mod vectors;

pub use deflate::{deflate_rank_two, BoundaryPair, DeflationCase, RankTwoDeflation};
// TEMP-DEBUG: remove before ship.
#[doc(hidden)]
pub use secular::{
    pole_side_signs, pole_structure, raw_secular, scan_interval, splus_probe, WeakPole,
};
pub use secular::{
    classify_intervals, g_signs, secular_eval, secular_roots, IntervalClassification,
    IntervalLabel, SecularEvaluation,
};
pub use vectors::{rank_two_vectors, rank_two_vectors_stable};

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::flops::{self, Phase};
use crate::fmath;
use crate::qr::{enforce_sign_convention, qr_eigensolve, SpectralDecomposition};
use crate::rank_one::solve_two_way_with;
use crate::tridiag::{block_diag_mul, split_three, Mat, SymTridiag, ThreeWaySplit};

/// The merge object of the three-way split: `D + β₁v₁v₁ᵀ + β₂v₂v₂ᵀ` with
/// `D` diagonal.
#[derive(Debug, Clone)]
pub struct RankTwoProblem {
    /// Diagonal of `D`.
    pub d: Vec<f64>,
    /// First modification vector.
    pub v1: Vec<f64>,
    /// Second modification vector.
    pub v2: Vec<f64>,
    /// Scale of the first modification; nonzero.
    pub beta1: f64,
    /// Scale of the second modification; nonzero.
    pub beta2: f64,
    /// When built by [`form_rank_two`], the number of leading coordinates
    /// spanned by the first two blocks — `v1` vanishes from this index on,
    /// which is what lets [`rank_two_vectors_stable`] run its first chained
    /// rank-one solve on a smaller head block. `None` means "unknown" and is
    /// treated as `n`.
    pub head: Option<usize>,
    /// Indices into `d` whose values have been confirmed as eigenvalues of
    /// the full problem by a deflation discriminant (see [`BoundaryPair`]).
    /// Set by [`deflate_rank_two`] on the reduced problem it returns; empty
    /// for freshly formed problems. Interval classification charges one root
    /// to each such value, because at these points the secular function's
    /// pole cancels and no secular root exists.
    pub boundary: Vec<usize>,
}

impl RankTwoProblem {
    /// Validate lengths and nonzero scales.
    pub fn new(d: Vec<f64>, v1: Vec<f64>, v2: Vec<f64>, beta1: f64, beta2: f64) -> Result<Self> {
        if d.len() != v1.len() || d.len() != v2.len() {
            return Err(Error::InvalidArgument(
                "diagonal and vector lengths must agree",
            ));
        }
        if beta1 == 0.0 || beta2 == 0.0 {
            return Err(Error::InvalidArgument("beta1 and beta2 must be nonzero"));
        }
        Ok(RankTwoProblem {
            d,
            v1,
            v2,
            beta1,
            beta2,
            head: None,
            boundary: Vec::new(),
        })
    }

    /// Problem order.
    #[must_use]
    pub fn n(&self) -> usize {
        self.d.len()
    }

    /// Deflation tolerance scaled to the merged matrix:
    /// `8·ε·max(‖d‖∞, |β₁|·‖v₁‖², |β₂|·‖v₂‖²)`.
    #[must_use]
    pub fn deflation_tolerance(&self) -> f64 {
        let dmax = self.d.iter().fold(0.0_f64, |m, &x| m.max(fmath::abs(x)));
        let n1: f64 = self.v1.iter().map(|&x| x * x).sum();
        let n2: f64 = self.v2.iter().map(|&x| x * x).sum();
        8.0 * f64::EPSILON
            * dmax
                .max(fmath::abs(self.beta1) * n1)
                .max(fmath::abs(self.beta2) * n2)
    }

    /// Dense symmetric form (used by tests and oracles).
    #[must_use]
    pub fn to_dense(&self) -> crate::tridiag::DenseSym {
        let n = self.n();
        crate::tridiag::DenseSym::from_fn(n, |i, j| {
            let base = if i == j { self.d[i] } else { 0.0 };
            base + self.beta1 * self.v1[i] * self.v1[j] + self.beta2 * self.v2[i] * self.v2[j]
        })
    }
}

/// Relative near-zero test for a discriminant or secular value: treat `f`
/// as zero when it is below `n·tol` times the accumulated magnitude of the
/// terms that produced it.
pub(crate) fn discriminant_is_zero(f: f64, magnitude: f64, n: usize, tol: f64) -> bool {
    fmath::abs(f) <= (n.max(1) as f64) * tol * magnitude
}

/// Build the merge problem from a three-way split and the spectral
/// decompositions of its blocks.
///
/// The modification vectors pick two rows of each inner eigenvector matrix:
/// `v₁ = (last row of Q₁; first row of Q₂; 0)` and
/// `v₂ = (0; last row of Q₂; first row of Q₃)`, each of squared norm 2.
/// Consumes the decompositions and returns their eigenvector matrices for
/// the final back-transformation.
///
/// # Errors
/// Dimension mismatches between the split and the decompositions, or
/// decompositions computed without eigenvectors.
pub fn form_rank_two(
    split: &ThreeWaySplit,
    dec1: SpectralDecomposition,
    dec2: SpectralDecomposition,
    dec3: SpectralDecomposition,
) -> Result<(RankTwoProblem, [Mat; 3])> {
    let (k1, k2) = (split.k1, split.k2);
    let k3 = split.t3.n();
    if dec1.n() != k1 || dec2.n() != k2 || dec3.n() != k3 {
        return Err(Error::InvalidArgument(
            "decomposition orders do not match the split blocks",
        ));
    }
    let n = k1 + k2 + k3;
    let mut d = Vec::with_capacity(n);
    d.extend_from_slice(dec1.eigenvalues());
    d.extend_from_slice(dec2.eigenvalues());
    d.extend_from_slice(dec3.eigenvalues());

    let missing = Error::InvalidArgument("block decompositions must carry eigenvectors");
    let (_, q1) = dec1.into_parts();
    let (_, q2) = dec2.into_parts();
    let (_, q3) = dec3.into_parts();
    let q1 = q1.ok_or(missing.clone())?;
    let q2 = q2.ok_or(missing.clone())?;
    let q3 = q3.ok_or(missing)?;

    let mut v1 = Vec::with_capacity(n);
    v1.extend_from_slice(q1.row(k1 - 1));
    v1.extend_from_slice(q2.row(0));
    v1.resize(n, 0.0);
    let mut v2 = vec![0.0; k1];
    v2.extend_from_slice(q2.row(k2 - 1));
    v2.extend_from_slice(q3.row(0));

    let p = RankTwoProblem {
        d,
        v1,
        v2,
        beta1: split.beta1,
        beta2: split.beta2,
        head: Some(k1 + k2),
        boundary: Vec::new(),
    };
    Ok((p, [q1, q2, q3]))
}

/// Solve one rank-two merge problem completely: deflate, classify, extract
/// secular roots, build eigenvectors (Method 2 when `stable`), and assemble
/// the decomposition in ascending eigenvalue order.
///
/// Ties between deflated, boundary, and secular eigenvalues are broken
/// resolved-first, then by index, for determinism.
pub(crate) fn rank_two_merge(p: &RankTwoProblem, stable: bool) -> Result<SpectralDecomposition> {
    let n = p.n();
    if n == 0 {
        return SpectralDecomposition::new(Vec::new(), Some(Mat::zeros(0, 0)));
    }
    let defl = {
        let _g = flops::phase(Phase::Deflate);
        deflate_rank_two(p, p.deflation_tolerance())
    };
    let structural = {
        let _g = flops::phase(Phase::Secular);
        let cls = classify_intervals(&defl.reduced)?;
        secular::secular_roots_structural(&defl.reduced, &cls)?
    };

    // Merge the three eigenvalue sources ascending. Tag 0 = resolved by
    // deflation, 1 = boundary pair, 2 = secular root.
    let mut entries: Vec<(f64, u8, usize)> = Vec::with_capacity(n);
    entries.extend(defl.resolved.iter().enumerate().map(|(i, r)| (r.0, 0, i)));
    entries.extend(
        defl.boundary
            .iter()
            .enumerate()
            .map(|(i, b)| (b.value, 1, i)),
    );
    entries.extend(structural.iter().enumerate().map(|(i, &r)| (r, 2, i)));
    debug_assert_eq!(entries.len(), n, "merge must account for every eigenvalue");
    entries.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let vals: Vec<f64> = entries.iter().map(|e| e.0).collect();

    if stable {
        let u = {
            let _g = flops::phase(Phase::Vectors);
            rank_two_vectors_stable(p, &vals)?
        };
        return SpectralDecomposition::new(vals, Some(u));
    }

    let _g = flops::phase(Phase::Vectors);
    let secular_cols = rank_two_vectors(&defl.reduced, &structural)?;
    let mut q = Mat::zeros(n, n);
    let mut full = vec![0.0; n];
    for (col, &(_, tag, idx)) in entries.iter().enumerate() {
        match tag {
            0 => q.set_col(col, &defl.resolved[idx].1),
            1 => q.set_col(col, &defl.boundary[idx].vector),
            _ => {
                for x in &mut full {
                    *x = 0.0;
                }
                for (r, &k) in defl.keep.iter().enumerate() {
                    full[k] = secular_cols.at(r, idx);
                }
                let orig = defl.back_transform(&full);
                q.set_col(col, &orig);
            }
        }
    }
    SpectralDecomposition::new(vals, Some(q))
}

/// Divide-and-conquer eigensolver for symmetric tridiagonal matrices via
/// three-way splitting and rank-two merging.
///
/// Matrices of order at most `base_cutoff` go to [`qr_eigensolve`]; orders
/// up to `3·base_cutoff` use a single two-way rank-one merge (three-way
/// splitting needs all blocks above the cutoff to pay off); zero
/// off-diagonal entries decouple the matrix into independent blocks.
/// `stable` selects Method-2 eigenvectors (two chained rank-one merges) over
/// the direct two-parameter formula.
///
/// # Errors
/// Propagates solver failures from children and the merge.
pub fn rtdc_solve(
    t: &SymTridiag,
    base_cutoff: usize,
    stable: bool,
) -> Result<SpectralDecomposition> {
    if base_cutoff < 1 {
        return Err(Error::InvalidArgument("base cutoff must be at least 1"));
    }
    let n = t.n();
    if n <= base_cutoff || n < 3 {
        return qr_eigensolve(t, true);
    }
    if t.offdiag().iter().any(|&e| e == 0.0) {
        return crate::qr::solve_decoupled(t, |block| rtdc_solve(block, base_cutoff, stable));
    }
    if n <= 3 * base_cutoff {
        return solve_two_way_with(t, &|block| rtdc_solve(block, base_cutoff, stable));
    }

    let k1 = n.div_ceil(3);
    let k2 = (n - k1).div_ceil(2);
    let split = split_three(t, k1, k2)?;
    let (dec1, dec2, dec3) = {
        let _g = flops::phase(Phase::Decompose);
        (
            rtdc_solve(&split.t1, base_cutoff, stable)?,
            rtdc_solve(&split.t2, base_cutoff, stable)?,
            rtdc_solve(&split.t3, base_cutoff, stable)?,
        )
    };
    let (p, qs) = form_rank_two(&split, dec1, dec2, dec3)?;
    let merged = rank_two_merge(&p, stable)?;

    let _g = flops::phase(Phase::Vectors);
    let mut q = block_diag_mul(&[&qs[0], &qs[1], &qs[2]], merged.vectors_unchecked());
    enforce_sign_convention(&mut q);
    SpectralDecomposition::new(merged.eigenvalues().to_vec(), Some(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qr::dense_eigensolve;
    use crate::tridiag::{householder_tridiagonalize, laplacian_2d, laplacian_2d_eigenvalues};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_tridiag(rng: &mut ChaCha8Rng, n: usize) -> SymTridiag {
        let diag: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let off: Vec<f64> = (0..n - 1)
            .map(|_| {
                let t: f64 = rng.gen_range(0.1..1.0);
                if rng.gen_bool(0.5) {
                    t
                } else {
                    -t
                }
            })
            .collect();
        SymTridiag::new(diag, off).unwrap()
    }

    fn tridiag_residual(t: &SymTridiag, dec: &SpectralDecomposition) -> f64 {
        let n = t.n();
        let q = dec.vectors_unchecked();
        let mut worst = 0.0_f64;
        for c in 0..n {
            let lam = dec.eigenvalues()[c];
            for i in 0..n {
                let mut s = t.diag()[i] * q.at(i, c);
                if i > 0 {
                    s += t.offdiag()[i - 1] * q.at(i - 1, c);
                }
                if i + 1 < n {
                    s += t.offdiag()[i] * q.at(i + 1, c);
                }
                worst = worst.max((s - lam * q.at(i, c)).abs());
            }
        }
        worst
    }

    fn gram_defect(q: &Mat) -> f64 {
        let mut worst = 0.0_f64;
        for a in 0..q.cols() {
            for b in 0..q.cols() {
                let dot: f64 = (0..q.rows()).map(|i| q.at(i, a) * q.at(i, b)).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - want).abs());
            }
        }
        worst
    }

    #[test]
    fn formed_problem_matches_rotated_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xf0f0);
        let t = random_tridiag(&mut rng, 9);
        let split = split_three(&t, 3, 3).unwrap();
        let dec1 = qr_eigensolve(&split.t1, true).unwrap();
        let dec2 = qr_eigensolve(&split.t2, true).unwrap();
        let dec3 = qr_eigensolve(&split.t3, true).unwrap();
        let (p, qs) = form_rank_two(&split, dec1, dec2, dec3).unwrap();

        assert_eq!(p.head, Some(6));
        let n1: f64 = p.v1.iter().map(|&x| x * x).sum();
        let n2: f64 = p.v2.iter().map(|&x| x * x).sum();
        assert!((n1 - 2.0).abs() <= 1e-13, "‖v₁‖² = {n1}");
        assert!((n2 - 2.0).abs() <= 1e-13, "‖v₂‖² = {n2}");
        // v₁ dies outside the first two blocks, v₂ outside the last two.
        assert!(p.v1[6..].iter().all(|&x| x == 0.0));
        assert!(p.v2[..3].iter().all(|&x| x == 0.0));

        // Qᵀ·T·Q must equal the merge problem, with Q = blockdiag(Q₁,Q₂,Q₃).
        let q = block_diag_mul(&[&qs[0], &qs[1], &qs[2]], &Mat::identity(9));
        let dense_t = t.to_dense();
        let m = p.to_dense();
        let mut worst = 0.0_f64;
        for i in 0..9 {
            for j in 0..9 {
                let mut s = 0.0;
                for a in 0..9 {
                    for b in 0..9 {
                        s += q.at(a, i) * dense_t.at(a, b) * q.at(b, j);
                    }
                }
                worst = worst.max((s - m.at(i, j)).abs());
            }
        }
        assert!(
            worst <= 1e-13 * dense_t.inf_norm(),
            "rotation defect {worst}"
        );
    }

    #[test]
    fn merge_solves_formed_problems_both_ways() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xab42);
        for trial in 0..20 {
            let n = rng.gen_range(9..18);
            let t = random_tridiag(&mut rng, n);
            let k1 = n.div_ceil(3);
            let k2 = (n - k1).div_ceil(2);
            let split = split_three(&t, k1, k2).unwrap();
            let dec1 = qr_eigensolve(&split.t1, true).unwrap();
            let dec2 = qr_eigensolve(&split.t2, true).unwrap();
            let dec3 = qr_eigensolve(&split.t3, true).unwrap();
            let (p, _) = form_rank_two(&split, dec1, dec2, dec3).unwrap();

            let dense = p.to_dense();
            let want = dense_eigensolve(&dense).unwrap().eigenvalues().to_vec();
            let scale = dense.inf_norm().max(1.0);
            for stable in [false, true] {
                let dec = rank_two_merge(&p, stable).unwrap();
                assert_eq!(dec.n(), n);
                for (g, w) in dec.eigenvalues().iter().zip(&want) {
                    assert!(
                        (g - w).abs() <= 1e-9 * scale,
                        "trial {trial} stable={stable}: {g} vs {w}"
                    );
                }
                let q = dec.vectors_unchecked();
                assert!(
                    gram_defect(q) <= 1e-11 * n as f64,
                    "trial {trial} stable={stable}: orthogonality {}",
                    gram_defect(q)
                );
            }
        }
    }

    #[test]
    fn merge_carries_boundary_pairs_through() {
        // diag(1, 2) in modification form: one eigenvalue comes from a
        // deflation discriminant, one from the secular equation.
        let p =
            RankTwoProblem::new(vec![0.0, 1.0], vec![1.0, 0.0], vec![0.0, 1.0], 1.0, 1.0).unwrap();
        for stable in [false, true] {
            let dec = rank_two_merge(&p, stable).unwrap();
            assert!((dec.eigenvalues()[0] - 1.0).abs() <= 1e-14);
            assert!((dec.eigenvalues()[1] - 2.0).abs() <= 1e-14);
            assert!(gram_defect(dec.vectors_unchecked()) <= 1e-13);
        }
    }

    #[test]
    fn laplacian_spectrum_is_reproduced_analytically() {
        let m = 5;
        let (t, _) = householder_tridiagonalize(&laplacian_2d(m));
        let want = laplacian_2d_eigenvalues(m);
        for stable in [false, true] {
            let dec = rtdc_solve(&t, 3, stable).unwrap();
            for (g, w) in dec.eigenvalues().iter().zip(&want) {
                assert!(
                    (g - w).abs() <= 1e-11 * w.abs().max(1.0),
                    "stable={stable}: eigenvalue {g} vs analytic {w}"
                );
            }
            assert!(tridiag_residual(&t, &dec) <= 1e-11 * t.inf_norm());
            assert!(gram_defect(dec.vectors_unchecked()) <= 1e-12 * t.n() as f64);
        }
    }

    #[test]
    fn random_matrices_agree_with_qr_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xd1f2);
        for trial in 0..25 {
            let n = rng.gen_range(3..40);
            let t = random_tridiag(&mut rng, n);
            let want = qr_eigensolve(&t, false).unwrap();
            let scale = t.inf_norm().max(1.0);
            for stable in [false, true] {
                let dec = rtdc_solve(&t, 4, stable).unwrap();
                for (g, w) in dec.eigenvalues().iter().zip(want.eigenvalues()) {
                    assert!(
                        (g - w).abs() <= 1e-11 * scale,
                        "trial {trial} n={n} stable={stable}: {g} vs {w}"
                    );
                }
                let res = tridiag_residual(&t, &dec) / scale;
                let gd = gram_defect(dec.vectors_unchecked());
                // The naive vectors lose digits to cancellation in
                // `fl(λ − d_i)` whenever a root hugs a pole; the stable
                // path has no such weakness. Bound each by what its
                // arithmetic honestly delivers.
                let (res_cap, gram_cap) = if stable {
                    (1e-11, 1e-11 * n as f64)
                } else {
                    (1e-7, 1e-6)
                };
                assert!(
                    res <= res_cap,
                    "trial {trial} n={n} stable={stable}: residual {res:.3e}"
                );
                assert!(
                    gd <= gram_cap,
                    "trial {trial} n={n} stable={stable}: gram defect {gd:.3e}"
                );
            }
        }
    }

    #[test]
    fn zero_offdiagonal_decouples() {
        let mut diag = vec![0.0; 10];
        for (i, x) in diag.iter_mut().enumerate() {
            *x = i as f64 * 0.5 - 2.0;
        }
        let mut off = vec![0.4; 9];
        off[4] = 0.0;
        let t = SymTridiag::new(diag, off).unwrap();
        let dec = rtdc_solve(&t, 2, true).unwrap();
        assert!(tridiag_residual(&t, &dec) <= 1e-12 * t.inf_norm());
        let want = qr_eigensolve(&t, false).unwrap();
        for (g, w) in dec.eigenvalues().iter().zip(want.eigenvalues()) {
            assert!((g - w).abs() <= 1e-12 * t.inf_norm());
        }
    }

    #[test]
    fn cutoff_zero_is_rejected() {
        let t = SymTridiag::new(vec![1.0, 2.0], vec![0.5]).unwrap();
        assert!(matches!(
            rtdc_solve(&t, 0, true),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn glued_blocks_keep_stable_vectors_orthogonal() {
        // Three identical blocks coupled by vanishing off-diagonal entries:
        // the merged spectra are triply near-degenerate, the classic
        // orthogonality torture test for modification-based eigensolvers.
        let b = 10usize;
        let n = 3 * b;
        let mut diag = Vec::with_capacity(n);
        let mut off = Vec::with_capacity(n - 1);
        for blk in 0..3 {
            for i in 0..b {
                diag.push(2.0 + 0.1 * i as f64);
                if i + 1 < b {
                    off.push(1.0);
                }
            }
            if blk < 2 {
                off.push(1e-11);
            }
        }
        let t = SymTridiag::new(diag, off).unwrap();
        let dec = rtdc_solve(&t, 4, true).unwrap();
        assert!(tridiag_residual(&t, &dec) <= 1e-11 * t.inf_norm());
        assert!(
            gram_defect(dec.vectors_unchecked()) <= 1e-11 * n as f64,
            "stable orthogonality defect {}",
            gram_defect(dec.vectors_unchecked())
        );
    }
}
