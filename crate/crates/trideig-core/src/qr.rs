//! Implicit-shift QR eigensolver for symmetric tridiagonal matrices, and the
//! dense symmetric eigensolver (Householder reduction + QR + back-transform)
//! that every other solver in this crate is tested against.
//!
//! The QR solver is the base case of both divide-and-conquer drivers and the
//! independent reference implementation: it shares no code with the merge
//! machinery it validates.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::flops::{self, Phase};
use crate::fmath;
use crate::tridiag::{householder_tridiagonalize, DenseSym, Mat, SymTridiag};

/// Eigenvalues (ascending) and, optionally, an orthonormal eigenvector
/// matrix whose column `j` pairs with eigenvalue `j`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    vectors: Option<Mat>,
}

impl SpectralDecomposition {
    /// Wrap a decomposition, validating that the eigenvalues are ascending
    /// and the vector matrix (when present) is square of matching order.
    pub fn new(eigenvalues: Vec<f64>, vectors: Option<Mat>) -> Result<Self> {
        if eigenvalues.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidArgument(
                "eigenvalues must be sorted ascending",
            ));
        }
        if let Some(v) = &vectors {
            if v.rows() != eigenvalues.len() || v.cols() != eigenvalues.len() {
                return Err(Error::InvalidArgument("eigenvector matrix must be n x n"));
            }
        }
        Ok(SpectralDecomposition {
            eigenvalues,
            vectors,
        })
    }

    /// Matrix order.
    #[must_use]
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalues, ascending.
    #[must_use]
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvector matrix, if vectors were computed.
    #[must_use]
    pub fn vectors(&self) -> Option<&Mat> {
        self.vectors.as_ref()
    }

    /// Eigenvector matrix.
    ///
    /// # Panics
    /// Panics when the decomposition was computed without vectors.
    #[must_use]
    pub fn vectors_unchecked(&self) -> &Mat {
        self.vectors
            .as_ref()
            .expect("decomposition carries no eigenvectors")
    }

    /// Consume the decomposition, returning eigenvalues and vectors.
    #[must_use]
    pub fn into_parts(self) -> (Vec<f64>, Option<Mat>) {
        (self.eigenvalues, self.vectors)
    }
}

/// Flip eigenvector columns so each column's first nonzero component is
/// positive. A pure sign convention: it keeps decompositions comparable
/// across solvers and runs.
pub(crate) fn enforce_sign_convention(v: &mut Mat) {
    for j in 0..v.cols() {
        let mut flip = false;
        for i in 0..v.rows() {
            let x = v.at(i, j);
            if x != 0.0 {
                flip = x < 0.0;
                break;
            }
        }
        if flip {
            for i in 0..v.rows() {
                let x = v.at(i, j);
                v.set(i, j, -x);
            }
        }
    }
}

/// Sort eigenvalues ascending and permute the vector columns with them.
pub(crate) fn sort_pairs(d: &mut Vec<f64>, vectors: &mut Option<Mat>) {
    let n = d.len();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let sorted: Vec<f64> = perm.iter().map(|&i| d[i]).collect();
    *d = sorted;
    if let Some(v) = vectors {
        let mut out = Mat::zeros(v.rows(), n);
        for (jnew, &jold) in perm.iter().enumerate() {
            for i in 0..v.rows() {
                out.set(i, jnew, v.at(i, jold));
            }
        }
        *vectors = Some(out);
    }
}

/// Wilkinson shift: the eigenvalue of the trailing 2×2 block closest to the
/// corner entry `dh`.
fn wilkinson_shift(dh1: f64, dh: f64, eh: f64) -> f64 {
    let delta = (dh1 - dh) / 2.0;
    if delta == 0.0 {
        dh - fmath::abs(eh)
    } else {
        dh - eh * eh / (delta + fmath::copysign(fmath::hypot(delta, eh), delta))
    }
}

/// Symmetric tridiagonal eigensolver by implicit QR sweeps with Wilkinson
/// shift.
///
/// Eigenvalues come back ascending; with `want_vectors` the accumulated
/// orthogonal factor is returned with columns following the eigenvalue sort
/// and signs normalized (first nonzero component positive). The eigenvalue
/// arithmetic is identical with and without vector accumulation, so both
/// paths return bitwise-equal eigenvalues.
///
/// # Errors
/// [`Error::NoConvergence`] if more than `30n` sweeps are needed (unreachable
/// for finite input in practice).
pub fn qr_eigensolve(t: &SymTridiag, want_vectors: bool) -> Result<SpectralDecomposition> {
    let n = t.n();
    let mut d = t.diag().to_vec();
    let mut e = t.offdiag().to_vec();
    let mut z = if want_vectors {
        Some(Mat::identity(n))
    } else {
        None
    };

    let eps = f64::EPSILON;
    let max_sweeps = 30 * n;
    let mut sweeps = 0usize;

    let mut h = n.saturating_sub(1);
    while h > 0 {
        // Walk down from h to the start of the unreduced block ending at h,
        // zeroing negligible couplings on the way.
        let mut l = h;
        while l > 0 {
            let bound = eps * (fmath::abs(d[l - 1]) + fmath::abs(d[l]));
            if fmath::abs(e[l - 1]) <= bound {
                e[l - 1] = 0.0;
                break;
            }
            l -= 1;
        }
        if l == h {
            // d[h] is isolated.
            h -= 1;
            continue;
        }

        sweeps += 1;
        if sweeps > max_sweeps {
            return Err(Error::NoConvergence { sweeps: max_sweeps });
        }

        // One implicit QR sweep on the block [l..=h].
        let mu = wilkinson_shift(d[h - 1], d[h], e[h - 1]);
        let mut x = d[l] - mu;
        let mut zz = e[l];
        let mut rotations = 0u64;
        for k in l..h {
            let r = fmath::hypot(x, zz);
            let (c, s) = if r == 0.0 {
                (1.0, 0.0)
            } else {
                (x / r, zz / r)
            };
            if k > l {
                e[k - 1] = r;
            }
            let dk = d[k];
            let dk1 = d[k + 1];
            let ek = e[k];
            d[k] = c * c * dk + 2.0 * c * s * ek + s * s * dk1;
            d[k + 1] = s * s * dk - 2.0 * c * s * ek + c * c * dk1;
            e[k] = c * s * (dk1 - dk) + (c * c - s * s) * ek;
            if k + 1 < h {
                // Bulge chases into the next coupling.
                zz = s * e[k + 1];
                e[k + 1] *= c;
                x = e[k];
            }
            rotations += 1;
            if let Some(z) = &mut z {
                // Z ← Z·Jᵀ on columns (k, k+1).
                for row in 0..n {
                    let a = z.at(row, k);
                    let b = z.at(row, k + 1);
                    z.set(row, k, c * a + s * b);
                    z.set(row, k + 1, -s * a + c * b);
                }
            }
        }

        // Rotation algebra: ~14 muls, 7 adds, 2 divs, 1 sqrt per rotation;
        // shift computation once per sweep. Vector accumulation is 4 muls +
        // 2 adds per matrix row per rotation.
        {
            let _p = flops::phase(Phase::Decompose);
            flops::tally(
                7 * rotations + 3,
                14 * rotations + 4,
                2 * rotations + 1,
                rotations + 1,
            );
        }
        if want_vectors {
            let _p = flops::phase(Phase::Vectors);
            flops::tally(2 * rotations * n as u64, 4 * rotations * n as u64, 0, 0);
        }
    }

    sort_pairs(&mut d, &mut z);
    if let Some(z) = &mut z {
        enforce_sign_convention(z);
    }
    SpectralDecomposition::new(d, z)
}

/// Eigensolver for dense symmetric matrices: Householder tridiagonalization,
/// implicit QR on the reduced matrix, back-transformation of the vectors.
///
/// This is the ground-truth reference ("dense oracle") used throughout the
/// crate's tests: it exercises none of the divide-and-conquer machinery.
///
/// # Errors
/// Propagates [`qr_eigensolve`] errors.
pub fn dense_eigensolve(a: &DenseSym) -> Result<SpectralDecomposition> {
    let (t, q) = householder_tridiagonalize(a);
    let dec = qr_eigensolve(&t, true)?;
    let mut vectors = q.mul(dec.vectors_unchecked());
    enforce_sign_convention(&mut vectors);
    SpectralDecomposition::new(dec.eigenvalues, Some(vectors))
}

/// Solve a tridiagonal matrix with zero off-diagonal couplings by solving
/// each maximal coupled block independently with `solve` and assembling the
/// direct sum: block eigenvectors are embedded at their block offsets and
/// everything is re-sorted by eigenvalue (stable, so ties keep block order).
pub(crate) fn solve_decoupled(
    t: &SymTridiag,
    solve: impl Fn(&SymTridiag) -> Result<SpectralDecomposition>,
) -> Result<SpectralDecomposition> {
    let n = t.n();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n);
    let mut decs = Vec::new();
    for (bi, (start, block)) in crate::tridiag::decoupled_blocks(t).into_iter().enumerate() {
        let dec = solve(&block)?;
        for j in 0..dec.n() {
            pairs.push((dec.eigenvalues()[j], bi, j));
        }
        decs.push((start, dec));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut vals = Vec::with_capacity(n);
    let mut vectors = Mat::zeros(n, n);
    for (col, (val, bi, j)) in pairs.into_iter().enumerate() {
        vals.push(val);
        let (start, dec) = &decs[bi];
        let q = dec.vectors_unchecked();
        for i in 0..q.rows() {
            vectors.set(start + i, col, q.at(i, j));
        }
    }
    SpectralDecomposition::new(vals, Some(vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tridiag::laplacian_2d_eigenvalues;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_tridiag(n: usize, seed: u64) -> SymTridiag {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let diag: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let offdiag: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        SymTridiag::new(diag, offdiag).unwrap()
    }

    /// Max-abs entry of A·V − V·Λ against the dense form of `t`.
    fn residual_max(a: &DenseSym, dec: &SpectralDecomposition) -> f64 {
        let n = a.n();
        let v = dec.vectors_unchecked();
        let av = a.as_mat().mul(v);
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let r = av.at(i, j) - v.at(i, j) * dec.eigenvalues()[j];
                worst = worst.max(r.abs());
            }
        }
        worst
    }

    fn orthogonality_max(dec: &SpectralDecomposition) -> f64 {
        let v = dec.vectors_unchecked();
        let vtv = v.transpose().mul(v);
        let n = v.rows();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((vtv.at(i, j) - want).abs());
            }
        }
        worst
    }

    #[test]
    fn order_one_matrix() {
        let t = SymTridiag::new(vec![5.0], vec![]).unwrap();
        let dec = qr_eigensolve(&t, true).unwrap();
        assert_eq!(dec.eigenvalues(), &[5.0]);
        assert_eq!(dec.vectors_unchecked().at(0, 0), 1.0);
    }

    #[test]
    fn two_by_two_analytic() {
        let t = SymTridiag::new(vec![0.0, 0.0], vec![1.0]).unwrap();
        let dec = qr_eigensolve(&t, true).unwrap();
        assert!((dec.eigenvalues()[0] + 1.0).abs() < 4.0 * f64::EPSILON);
        assert!((dec.eigenvalues()[1] - 1.0).abs() < 4.0 * f64::EPSILON);
        let v = dec.vectors_unchecked();
        let s = 0.5_f64.sqrt();
        // Sign convention: first component positive.
        assert!(
            (v.at(0, 0) - s).abs() < 1e-15 && (v.at(1, 0) + s).abs() < 1e-15,
            "column 0 = {:?}",
            v.col(0)
        );
        assert!(
            (v.at(0, 1) - s).abs() < 1e-15 && (v.at(1, 1) - s).abs() < 1e-15,
            "column 1 = {:?}",
            v.col(1)
        );
    }

    #[test]
    fn laplacian_m3_matches_analytic_eigenvalues() {
        let a = crate::tridiag::laplacian_2d(3);
        let (t, _) = householder_tridiagonalize(&a);
        let dec = qr_eigensolve(&t, false).unwrap();
        let expected = laplacian_2d_eigenvalues(3);
        for (got, want) in dec.eigenvalues().iter().zip(expected.iter()) {
            assert!(
                (got - want).abs() <= 1e-12 * want.abs(),
                "eigenvalue {got} vs analytic {want}"
            );
        }
    }

    #[test]
    fn eigenvalues_bitwise_equal_with_and_without_vectors() {
        for seed in 0..5u64 {
            let t = random_tridiag(50, seed);
            let without = qr_eigensolve(&t, false).unwrap();
            let with = qr_eigensolve(&t, true).unwrap();
            assert_eq!(without.eigenvalues(), with.eigenvalues(), "seed {seed}");
        }
    }

    #[test]
    fn residual_and_orthogonality_random() {
        for seed in [0u64, 7, 21] {
            let n = 60;
            let t = random_tridiag(n, seed);
            let dec = qr_eigensolve(&t, true).unwrap();
            let a = t.to_dense();
            let scale = (n as f64) * f64::EPSILON * a.inf_norm();
            assert!(
                residual_max(&a, &dec) <= 5.0 * scale,
                "residual too large, seed {seed}"
            );
            assert!(
                orthogonality_max(&dec) <= 5.0 * (n as f64) * f64::EPSILON,
                "orthogonality too large, seed {seed}"
            );
        }
    }

    #[test]
    fn trace_is_preserved() {
        let n = 80;
        let t = random_tridiag(n, 42);
        let dec = qr_eigensolve(&t, false).unwrap();
        let tr: f64 = t.diag().iter().sum();
        let sum: f64 = dec.eigenvalues().iter().sum();
        let max_d = t.diag().iter().fold(0.0_f64, |m, &x| m.max(x.abs()));
        assert!((tr - sum).abs() <= (n as f64) * f64::EPSILON * (n as f64) * max_d.max(1.0));
    }

    #[test]
    fn decoupled_blocks_are_handled() {
        // Zero couplings are legal for QR (it just deflates there).
        let t = SymTridiag::new(vec![3.0, 1.0, 2.0], vec![0.0, 0.0]).unwrap();
        let dec = qr_eigensolve(&t, true).unwrap();
        assert_eq!(dec.eigenvalues(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn dense_oracle_identity_and_diagonal() {
        let id = DenseSym::from_fn(4, |i, j| if i == j { 1.0 } else { 0.0 });
        let dec = dense_eigensolve(&id).unwrap();
        for &v in dec.eigenvalues() {
            assert_eq!(v, 1.0);
        }
        assert!(orthogonality_max(&dec) < 1e-14);

        let a = DenseSym::from_fn(3, |i, j| if i == j { (i + 1) as f64 } else { 0.0 });
        let dec = dense_eigensolve(&a).unwrap();
        assert_eq!(dec.eigenvalues(), &[1.0, 2.0, 3.0]);
        let v = dec.vectors_unchecked();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (v.at(i, j) - want).abs() < 1e-14,
                    "vectors not identity at ({i}, {j})"
                );
            }
        }
    }

    #[test]
    fn dense_oracle_all_ones_matrix() {
        // Rank-one matrix of all ones: eigenvalues {0, 0, 3}.
        let a = DenseSym::from_fn(3, |_, _| 1.0);
        let dec = dense_eigensolve(&a).unwrap();
        let vals = dec.eigenvalues();
        assert!(
            vals[0].abs() < 1e-14 && vals[1].abs() < 1e-14,
            "got {vals:?}"
        );
        assert!((vals[2] - 3.0).abs() < 1e-14, "got {vals:?}");
        assert!(residual_max(&a, &dec) < 1e-14);
    }

    #[test]
    fn dense_oracle_residuals_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..3 {
            let n = 20;
            let a = DenseSym::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
            let dec = dense_eigensolve(&a).unwrap();
            let scale = (n as f64) * f64::EPSILON * a.inf_norm();
            assert!(residual_max(&a, &dec) <= 5.0 * scale);
            assert!(orthogonality_max(&dec) <= 5.0 * (n as f64) * f64::EPSILON);
        }
    }
}
