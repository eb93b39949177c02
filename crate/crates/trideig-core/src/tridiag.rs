//! Matrix types, block splitting, the 2-D Laplacian test matrix, and
//! Householder tridiagonalization.
//!
//! The splits are the "divide" half of the divide-and-conquer solvers: a
//! symmetric tridiagonal matrix is cut at one or two off-diagonal positions
//! into independent blocks plus rank-one correction terms. Cutting at
//! position `k` (the off-diagonal entry `β` coupling rows `k-1` and `k`,
//! zero-based) replaces that coupling by `β·wwᵀ` with `w = e_{k-1} + e_k`,
//! which requires subtracting `β` from the two adjacent diagonal entries.
//! Reassembly adds the same `β` back, so the round trip is exact in floating
//! point.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fmath;

/// Real symmetric tridiagonal matrix, stored as its diagonal and its
/// sub/super-diagonal (the matrix is symmetric, so one off-diagonal array
/// serves both sides).
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl SymTridiag {
    /// Build a matrix from its diagonal (length `n ≥ 1`) and off-diagonal
    /// (length `n − 1`).
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidArgument("matrix order must be at least 1"));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::InvalidArgument(
                "off-diagonal length must be one less than diagonal length",
            ));
        }
        Ok(SymTridiag { diag, offdiag })
    }

    /// Matrix order.
    #[must_use]
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Main diagonal entries.
    #[must_use]
    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// Sub/super-diagonal entries.
    #[must_use]
    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Dense symmetric form.
    #[must_use]
    pub fn to_dense(&self) -> DenseSym {
        let n = self.n();
        let mut a = Mat::zeros(n, n);
        for i in 0..n {
            a.set(i, i, self.diag[i]);
        }
        for i in 0..n - 1 {
            a.set(i, i + 1, self.offdiag[i]);
            a.set(i + 1, i, self.offdiag[i]);
        }
        DenseSym { mat: a }
    }

    /// Infinity norm (maximum absolute row sum); a cheap scale for
    /// tolerances.
    #[must_use]
    pub fn inf_norm(&self) -> f64 {
        let n = self.n();
        let mut best = 0.0_f64;
        for i in 0..n {
            let mut row = fmath::abs(self.diag[i]);
            if i > 0 {
                row += fmath::abs(self.offdiag[i - 1]);
            }
            if i + 1 < n {
                row += fmath::abs(self.offdiag[i]);
            }
            best = best.max(row);
        }
        best
    }
}

/// General dense matrix, row-major. Used for eigenvector matrices and
/// intermediate orthogonal factors; not required to be symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    /// `rows × cols` matrix of zeros.
    #[must_use]
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// `n × n` identity.
    #[must_use]
    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    #[must_use]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[must_use]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    #[must_use]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    /// One row as a slice.
    #[must_use]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Copy of column `j`.
    #[must_use]
    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.at(i, j)).collect()
    }

    /// Overwrite column `j`.
    pub fn set_col(&mut self, j: usize, v: &[f64]) {
        debug_assert_eq!(v.len(), self.rows);
        for (i, &x) in v.iter().enumerate() {
            self.set(i, j, x);
        }
    }

    /// Matrix product `self · other`.
    ///
    /// # Panics
    /// Panics when the inner dimensions disagree.
    #[must_use]
    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.at(i, k);
                if aik == 0.0 {
                    continue;
                }
                let row_out = i * out.cols;
                let row_b = k * other.cols;
                for j in 0..other.cols {
                    out.data[row_out + j] += aik * other.data[row_b + j];
                }
            }
        }
        crate::flops::tally(
            (self.rows * self.cols * other.cols) as u64,
            (self.rows * self.cols * other.cols) as u64,
            0,
            0,
        );
        out
    }

    /// Matrix-vector product `self · x`.
    #[must_use]
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(self.cols, x.len());
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            let row = self.row(i);
            let mut s = 0.0;
            for j in 0..self.cols {
                s += row[j] * x[j];
            }
            out[i] = s;
        }
        out
    }

    /// Transposed matrix-vector product `selfᵀ · x`, without materializing
    /// the transpose.
    #[must_use]
    pub fn tr_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(self.rows, x.len());
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let row = self.row(i);
            let xi = x[i];
            for j in 0..self.cols {
                out[j] += row[j] * xi;
            }
        }
        out
    }

    /// Transposed copy.
    #[must_use]
    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.at(i, j));
            }
        }
        out
    }
}

/// Dense real symmetric matrix. The constructor validates symmetry, so a
/// value of this type always represents an exactly symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSym {
    mat: Mat,
}

impl DenseSym {
    /// Validate and wrap a square matrix; `entries[i][j]` must equal
    /// `entries[j][i]` exactly.
    pub fn new(mat: Mat) -> Result<Self> {
        if mat.rows() != mat.cols() || mat.rows() == 0 {
            return Err(Error::InvalidArgument(
                "dense symmetric matrix must be square, order >= 1",
            ));
        }
        for i in 0..mat.rows() {
            for j in 0..i {
                if mat.at(i, j) != mat.at(j, i) {
                    return Err(Error::InvalidArgument("matrix entries are not symmetric"));
                }
            }
        }
        Ok(DenseSym { mat })
    }

    /// Build from a row-major closure, mirroring the lower triangle from the
    /// upper one so the result is exactly symmetric.
    #[must_use]
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, f(i, i));
            for j in i + 1..n {
                let v = f(i, j);
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        DenseSym { mat: m }
    }

    #[must_use]
    pub fn n(&self) -> usize {
        self.mat.rows()
    }

    #[inline]
    #[must_use]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.mat.at(i, j)
    }

    /// The underlying matrix.
    #[must_use]
    pub fn as_mat(&self) -> &Mat {
        &self.mat
    }

    /// Infinity norm (maximum absolute row sum).
    #[must_use]
    pub fn inf_norm(&self) -> f64 {
        let n = self.n();
        let mut best = 0.0_f64;
        for i in 0..n {
            let row: f64 = self.mat.row(i).iter().map(|&x| fmath::abs(x)).sum();
            best = best.max(row);
        }
        best
    }
}

/// A tridiagonal matrix cut at two positions: three blocks plus two rank-one
/// corrections `β₁w₁w₁ᵀ + β₂w₂w₂ᵀ`, `w₁ = e_{k₁-1}+e_{k₁}`,
/// `w₂ = e_{k₁+k₂-1}+e_{k₁+k₂}` (zero-based).
#[derive(Debug, Clone)]
pub struct ThreeWaySplit {
    /// First block, order `k1`.
    pub t1: SymTridiag,
    /// Second block, order `k2`.
    pub t2: SymTridiag,
    /// Third block, order `n − k1 − k2`.
    pub t3: SymTridiag,
    /// Off-diagonal entry at the first cut.
    pub beta1: f64,
    /// Off-diagonal entry at the second cut.
    pub beta2: f64,
    /// Order of the first block.
    pub k1: usize,
    /// Order of the second block.
    pub k2: usize,
}

/// A tridiagonal matrix cut at one position: two blocks plus one rank-one
/// correction `β·wwᵀ`, `w = e_{k-1}+e_k` (zero-based).
#[derive(Debug, Clone)]
pub struct TwoWaySplit {
    /// First block, order `k`.
    pub t1: SymTridiag,
    /// Second block, order `n − k`.
    pub t2: SymTridiag,
    /// Off-diagonal entry at the cut.
    pub beta: f64,
    /// Order of the first block.
    pub k: usize,
}

fn sub_block(a: &SymTridiag, start: usize, len: usize) -> SymTridiag {
    SymTridiag {
        diag: a.diag[start..start + len].to_vec(),
        offdiag: a.offdiag[start..start + len - 1].to_vec(),
    }
}

/// Cut `a` into three blocks of orders `k1`, `k2`, `n − k1 − k2`.
///
/// The diagonal entries adjacent to each cut have the cut's off-diagonal
/// value subtracted, so that adding the rank-one terms back reproduces `a`
/// exactly.
///
/// # Errors
/// [`Error::DecoupledMatrix`] when an off-diagonal entry at a cut is zero (the
/// matrix falls apart into independent blocks there; callers should recurse on
/// those instead), [`Error::InvalidArgument`] for out-of-range cut positions.
pub fn split_three(a: &SymTridiag, k1: usize, k2: usize) -> Result<ThreeWaySplit> {
    let n = a.n();
    if k1 < 1 || k2 < 1 || k1 + k2 > n - 1 {
        return Err(Error::InvalidArgument(
            "three-way split needs k1 >= 1, k2 >= 1, k1+k2 <= n-1",
        ));
    }
    let c1 = k1 - 1; // off-diagonal index of the first cut
    let c2 = k1 + k2 - 1;
    let beta1 = a.offdiag[c1];
    let beta2 = a.offdiag[c2];
    if beta1 == 0.0 {
        return Err(Error::DecoupledMatrix { offdiag_index: c1 });
    }
    if beta2 == 0.0 {
        return Err(Error::DecoupledMatrix { offdiag_index: c2 });
    }
    let mut t1 = sub_block(a, 0, k1);
    let mut t2 = sub_block(a, k1, k2);
    let mut t3 = sub_block(a, k1 + k2, n - k1 - k2);
    t1.diag[k1 - 1] -= beta1;
    t2.diag[0] -= beta1;
    t2.diag[k2 - 1] -= beta2;
    t3.diag[0] -= beta2;
    Ok(ThreeWaySplit {
        t1,
        t2,
        t3,
        beta1,
        beta2,
        k1,
        k2,
    })
}

/// Cut `a` into two blocks of orders `k` and `n − k`.
///
/// # Errors
/// As [`split_three`], for the single cut at off-diagonal index `k − 1`.
pub fn split_two(a: &SymTridiag, k: usize) -> Result<TwoWaySplit> {
    let n = a.n();
    if k < 1 || k > n - 1 {
        return Err(Error::InvalidArgument("two-way split needs 1 <= k <= n-1"));
    }
    let beta = a.offdiag[k - 1];
    if beta == 0.0 {
        return Err(Error::DecoupledMatrix {
            offdiag_index: k - 1,
        });
    }
    let mut t1 = sub_block(a, 0, k);
    let mut t2 = sub_block(a, k, n - k);
    t1.diag[k - 1] -= beta;
    t2.diag[0] -= beta;
    Ok(TwoWaySplit { t1, t2, beta, k })
}

impl ThreeWaySplit {
    /// Reassemble the original matrix: block-diagonal of the three blocks
    /// plus the two rank-one corrections. Exact in floating point (the same
    /// `β` that was subtracted is added back).
    #[must_use]
    pub fn reassemble(&self) -> SymTridiag {
        let mut diag: Vec<f64> = Vec::with_capacity(self.t1.n() + self.t2.n() + self.t3.n());
        let mut offdiag: Vec<f64> = Vec::new();
        for (i, t) in [&self.t1, &self.t2, &self.t3].into_iter().enumerate() {
            if i > 0 {
                offdiag.push(0.0);
            }
            diag.extend_from_slice(&t.diag);
            offdiag.extend_from_slice(&t.offdiag);
        }
        // β·wwᵀ touches diagonal entries (c, c) and (c+1, c+1) and the
        // off-diagonal entry c, where c is the cut's off-diagonal index.
        for (c, beta) in [
            (self.k1 - 1, self.beta1),
            (self.k1 + self.k2 - 1, self.beta2),
        ] {
            diag[c] += beta;
            diag[c + 1] += beta;
            offdiag[c] += beta;
        }
        SymTridiag { diag, offdiag }
    }
}

impl TwoWaySplit {
    /// Reassemble the original matrix; exact in floating point.
    #[must_use]
    pub fn reassemble(&self) -> SymTridiag {
        let mut diag: Vec<f64> = Vec::with_capacity(self.t1.n() + self.t2.n());
        let mut offdiag: Vec<f64> = Vec::new();
        diag.extend_from_slice(&self.t1.diag);
        offdiag.extend_from_slice(&self.t1.offdiag);
        offdiag.push(0.0);
        diag.extend_from_slice(&self.t2.diag);
        offdiag.extend_from_slice(&self.t2.offdiag);
        let c = self.k - 1;
        diag[c] += self.beta;
        diag[c + 1] += self.beta;
        offdiag[c] += self.beta;
        SymTridiag { diag, offdiag }
    }
}

/// Split a tridiagonal matrix at its zero off-diagonal entries into maximal
/// coupled blocks, each tagged with its starting row index. A matrix with no
/// zero couplings comes back as a single block.
pub(crate) fn decoupled_blocks(a: &SymTridiag) -> Vec<(usize, SymTridiag)> {
    let n = a.n();
    let mut blocks = Vec::new();
    let mut start = 0;
    for i in 0..n - 1 {
        if a.offdiag[i] == 0.0 {
            blocks.push((start, sub_block(a, start, i + 1 - start)));
            start = i + 1;
        }
    }
    blocks.push((start, sub_block(a, start, n - start)));
    blocks
}

/// Multiply a block-diagonal matrix (given as its diagonal blocks, in order)
/// by a dense matrix, exploiting the block structure: row block `b` of the
/// product only reads the matching row block of `rhs`.
///
/// # Panics
/// Panics when the block orders do not sum to `rhs.rows()` or a block is not
/// square.
#[must_use]
pub(crate) fn block_diag_mul(blocks: &[&Mat], rhs: &Mat) -> Mat {
    let total: usize = blocks.iter().map(|b| b.rows()).sum();
    assert_eq!(
        total,
        rhs.rows(),
        "block orders must sum to the row count of rhs"
    );
    let mut out = Mat::zeros(total, rhs.cols());
    let mut r0 = 0;
    let mut flop_muls = 0u64;
    for b in blocks {
        assert_eq!(b.rows(), b.cols(), "diagonal blocks must be square");
        let m = b.rows();
        for i in 0..m {
            for j in 0..rhs.cols() {
                let mut acc = 0.0;
                for k in 0..m {
                    acc += b.at(i, k) * rhs.at(r0 + k, j);
                }
                out.set(r0 + i, j, acc);
            }
        }
        flop_muls += (m * m * rhs.cols()) as u64;
        r0 += m;
    }
    crate::flops::tally(flop_muls, flop_muls, 0, 0);
    out
}

/// Five-point finite-difference discretization of the Laplace operator on the
/// unit square with an `m × m` interior grid: order `n = m²`, mesh width
/// `h = 1/(m+1)`, diagonal blocks with `4/h²` on the diagonal and `−1/h²`
/// couplings within and between grid rows.
///
/// The eigenvalues are known in closed form; see
/// [`laplacian_2d_eigenvalues`].
///
/// # Panics
/// Panics when `m == 0`.
#[must_use]
pub fn laplacian_2d(m: usize) -> DenseSym {
    assert!(m >= 1, "grid size must be at least 1");
    let h = 1.0 / (m as f64 + 1.0);
    let scale = 1.0 / (h * h);
    let n = m * m;
    DenseSym::from_fn(n, |p, q| {
        let (pi, pj) = (p / m, p % m);
        let (qi, qj) = (q / m, q % m);
        if p == q {
            4.0 * scale
        } else if (pi == qi && pj.abs_diff(qj) == 1) || (pj == qj && pi.abs_diff(qi) == 1) {
            -scale
        } else {
            0.0
        }
    })
}

/// Closed-form eigenvalues of [`laplacian_2d`]:
/// `(4 − 2cos(iπh) − 2cos(jπh))/h²` for `i, j = 1..m`, sorted ascending.
#[must_use]
pub fn laplacian_2d_eigenvalues(m: usize) -> Vec<f64> {
    assert!(m >= 1, "grid size must be at least 1");
    let h = 1.0 / (m as f64 + 1.0);
    let scale = 1.0 / (h * h);
    let mut vals = Vec::with_capacity(m * m);
    for i in 1..=m {
        for j in 1..=m {
            let c = 4.0
                - 2.0 * fmath::cos(i as f64 * core::f64::consts::PI * h)
                - 2.0 * fmath::cos(j as f64 * core::f64::consts::PI * h);
            vals.push(c * scale);
        }
    }
    vals.sort_by(f64::total_cmp);
    vals
}

/// Reduce a dense symmetric matrix to tridiagonal form by Householder
/// similarity transformations, accumulating the orthogonal factor.
///
/// Returns `(T, Q)` with `QᵀAQ = T` up to roundoff; an already-tridiagonal
/// input comes back unchanged with `Q = I`.
#[must_use]
pub fn householder_tridiagonalize(a: &DenseSym) -> (SymTridiag, Mat) {
    let n = a.n();
    let mut w = a.as_mat().clone();
    let mut q = Mat::identity(n);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];

    for k in 0..n.saturating_sub(2) {
        // Column k below the subdiagonal: decide whether a reflection is
        // needed at all.
        let mut sigma = 0.0; // squared norm beyond the first entry
        for i in k + 2..n {
            sigma += w.at(i, k) * w.at(i, k);
        }
        if sigma == 0.0 {
            continue;
        }
        let x0 = w.at(k + 1, k);
        let alpha = -fmath::copysign(
            fmath::sqrt(x0 * x0 + sigma),
            if x0 == 0.0 { 1.0 } else { x0 },
        );
        // Householder vector v = x − αe₁ over rows k+1..n.
        v[k + 1] = x0 - alpha;
        for i in k + 2..n {
            v[i] = w.at(i, k);
        }
        let vnorm2 = v[k + 1] * v[k + 1] + sigma;
        let beta = 2.0 / vnorm2;

        // Symmetric update of the trailing block B = W[k+1.., k+1..]:
        // B ← B − vqᵀ − qvᵀ with p = βBv, q = p − (β vᵀp / 2) v.
        for i in k + 1..n {
            let mut s = 0.0;
            for j in k + 1..n {
                s += w.at(i, j) * v[j];
            }
            p[i] = beta * s;
        }
        let mut vp = 0.0;
        for i in k + 1..n {
            vp += v[i] * p[i];
        }
        let kk = beta * vp / 2.0;
        for i in k + 1..n {
            p[i] -= kk * v[i];
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let upd = w.at(i, j) - v[i] * p[j] - p[i] * v[j];
                w.set(i, j, upd);
            }
        }
        w.set(k + 1, k, alpha);
        w.set(k, k + 1, alpha);
        for i in k + 2..n {
            w.set(i, k, 0.0);
            w.set(k, i, 0.0);
        }

        // Accumulate Q ← Q(I − βvvᵀ) on columns k+1..n.
        for r in 0..n {
            let mut s = 0.0;
            for j in k + 1..n {
                s += q.at(r, j) * v[j];
            }
            let s = beta * s;
            for j in k + 1..n {
                let upd = q.at(r, j) - s * v[j];
                q.set(r, j, upd);
            }
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| w.at(i, i)).collect();
    let offdiag: Vec<f64> = (0..n - 1).map(|i| w.at(i + 1, i)).collect();
    (SymTridiag { diag, offdiag }, q)
}
