//! Quality measures for computed spectral decompositions.
//!
//! Both measures follow the usual scaled-norm convention for symmetric
//! eigensolvers:
//!
//! * residual:      `𝓡 = ‖AQ̂ − Q̂Λ̂‖₂ / (n·ε·‖A‖₂)`
//! * orthogonality: `𝓞 = ‖I − Q̂ᵀQ̂‖₂ / (n·ε)`
//!
//! Values of order one mean the decomposition is as good as the arithmetic
//! allows; a solver with an orthogonality defect shows up as `𝓞` in the
//! thousands or far beyond. Spectral norms are computed by two-sided power
//! iteration on `BᵀB` with a fixed deterministic start vector, a 200-step
//! cap, and a `1e−6` relative stopping test — far more resolution than the
//! order-of-magnitude use of these measures needs.

use alloc::vec::Vec;

use crate::fmath;
use crate::qr::SpectralDecomposition;
use crate::tridiag::{DenseSym, Mat};

const MAX_ITERS: usize = 200;
const REL_TOL: f64 = 1e-6;

fn norm2(x: &[f64]) -> f64 {
    fmath::sqrt(x.iter().map(|&v| v * v).sum())
}

/// Largest singular value of `b`, by power iteration on `bᵀb` from the given
/// start vector.
#[must_use]
pub fn spectral_norm_with_start(b: &Mat, start: &[f64]) -> f64 {
    assert_eq!(
        start.len(),
        b.cols(),
        "start vector length must match column count"
    );
    let mut x: Vec<f64> = start.to_vec();
    let nx = norm2(&x);
    if nx == 0.0 {
        return 0.0;
    }
    for v in &mut x {
        *v /= nx;
    }
    let mut sigma = 0.0_f64;
    for _ in 0..MAX_ITERS {
        let y = b.mul_vec(&x);
        let ny = norm2(&y);
        if ny == 0.0 {
            return 0.0;
        }
        let z = b.tr_mul_vec(&y);
        let nz = norm2(&z);
        let new_sigma = nz / ny;
        let converged = fmath::abs(new_sigma - sigma) <= REL_TOL * new_sigma;
        sigma = new_sigma;
        if nz == 0.0 {
            break;
        }
        for (xi, zi) in x.iter_mut().zip(z.iter()) {
            *xi = zi / nz;
        }
        if converged {
            break;
        }
    }
    sigma
}

/// Deterministic start vector for the power iteration: decaying, sign-mixed
/// entries make accidental orthogonality to the dominant singular vector
/// implausible, and rounding noise breaks it anyway.
fn default_start(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let v = 1.0 / (k + 1) as f64;
            if k % 2 == 0 {
                v
            } else {
                -v
            }
        })
        .collect()
}

/// Largest singular value of `b` with the built-in deterministic start.
#[must_use]
pub fn spectral_norm(b: &Mat) -> f64 {
    spectral_norm_with_start(b, &default_start(b.cols()))
}

/// Scaled residual `𝓡 = ‖AQ̂ − Q̂Λ̂‖₂ / (n·ε·‖A‖₂)` of a decomposition
/// against the matrix it claims to decompose.
///
/// A zero matrix gets measure 0 by convention.
///
/// # Panics
/// Panics when dimensions disagree or the decomposition has no vectors.
#[must_use]
pub fn residual_measure(a: &DenseSym, dec: &SpectralDecomposition) -> f64 {
    residual_measure_with_start(a, dec, &default_start(a.n()))
}

/// [`residual_measure`] with an explicit power-iteration start vector.
#[must_use]
pub fn residual_measure_with_start(
    a: &DenseSym,
    dec: &SpectralDecomposition,
    start: &[f64],
) -> f64 {
    let n = a.n();
    assert_eq!(n, dec.n(), "matrix and decomposition order disagree");
    let q = dec.vectors_unchecked();
    let mut b = a.as_mat().mul(q);
    for j in 0..n {
        let lambda = dec.eigenvalues()[j];
        for i in 0..n {
            let v = b.at(i, j) - q.at(i, j) * lambda;
            b.set(i, j, v);
        }
    }
    let norm_a = spectral_norm_with_start(a.as_mat(), start);
    if norm_a == 0.0 {
        return 0.0;
    }
    let norm_b = spectral_norm_with_start(&b, start);
    norm_b / ((n as f64) * f64::EPSILON * norm_a)
}

/// Scaled orthogonality defect `𝓞 = ‖I − Q̂ᵀQ̂‖₂ / (n·ε)`.
///
/// # Panics
/// Panics when the decomposition has no vectors.
#[must_use]
pub fn orthogonality_measure(dec: &SpectralDecomposition) -> f64 {
    orthogonality_measure_with_start(dec, &default_start(dec.n()))
}

/// [`orthogonality_measure`] with an explicit power-iteration start vector.
#[must_use]
pub fn orthogonality_measure_with_start(dec: &SpectralDecomposition, start: &[f64]) -> f64 {
    let q = dec.vectors_unchecked();
    let n = q.rows();
    let mut c = q.transpose().mul(q);
    for i in 0..n {
        let v = c.at(i, i);
        c.set(i, i, v - 1.0);
    }
    spectral_norm_with_start(&c, start) / ((n as f64) * f64::EPSILON)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qr::qr_eigensolve;
    use crate::tridiag::{householder_tridiagonalize, laplacian_2d, SymTridiag};

    fn diag_matrix(vals: &[f64]) -> DenseSym {
        DenseSym::from_fn(vals.len(), |i, j| if i == j { vals[i] } else { 0.0 })
    }

    #[test]
    fn spectral_norm_of_known_matrices() {
        let a = diag_matrix(&[1.0, -3.0, 2.0]);
        let norm = spectral_norm(a.as_mat());
        assert!((norm - 3.0).abs() < 1e-5, "got {norm}");

        let zero = Mat::zeros(4, 4);
        assert_eq!(spectral_norm(&zero), 0.0);
    }

    #[test]
    fn exact_decomposition_measures_zero() {
        let a = diag_matrix(&[1.0, 2.0, 3.0]);
        let dec = SpectralDecomposition::new(vec![1.0, 2.0, 3.0], Some(Mat::identity(3))).unwrap();
        assert_eq!(residual_measure(&a, &dec), 0.0);
        assert_eq!(orthogonality_measure(&dec), 0.0);
    }

    #[test]
    fn perturbed_vector_entry_is_detected() {
        let n = 10;
        let vals: Vec<f64> = (1..=n).map(|i| i as f64).collect();
        let a = diag_matrix(&vals);
        let mut v = Mat::identity(n);
        v.set(0, n - 1, 1e-12);
        let dec = SpectralDecomposition::new(vals.clone(), Some(v)).unwrap();
        let r = residual_measure(&a, &dec);
        // Column n−1 has residual entry (a₀₀ − λₙ₋₁)·1e−12 = −9e−12.
        let floor = 0.5 * 9e-12 / ((n as f64) * f64::EPSILON * 10.0);
        assert!(r >= floor, "residual {r} below floor {floor}");
    }

    #[test]
    fn duplicated_column_destroys_orthogonality() {
        let n = 10;
        let mut v = Mat::identity(n);
        let col0 = v.col(0);
        v.set_col(1, &col0);
        let vals: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let dec = SpectralDecomposition::new(vals, Some(v)).unwrap();
        let o = orthogonality_measure(&dec);
        assert!(o > 1e13, "orthogonality measure {o} should be catastrophic");
    }

    #[test]
    fn measures_invariant_under_column_sign_flips() {
        let t = SymTridiag::new(vec![1.0, -0.5, 2.0, 0.25], vec![0.3, -0.7, 0.9]).unwrap();
        let a = t.to_dense();
        let dec = qr_eigensolve(&t, true).unwrap();
        let r1 = residual_measure(&a, &dec);
        let o1 = orthogonality_measure(&dec);

        let mut flipped = dec.vectors_unchecked().clone();
        for j in [0usize, 2] {
            for i in 0..4 {
                let v = flipped.at(i, j);
                flipped.set(i, j, -v);
            }
        }
        let dec2 = SpectralDecomposition::new(dec.eigenvalues().to_vec(), Some(flipped)).unwrap();
        let r2 = residual_measure(&a, &dec2);
        let o2 = orthogonality_measure(&dec2);
        // The norms agree exactly in exact arithmetic; numerically they are
        // limited by the power iteration's 1e−6 stopping tolerance.
        assert!(
            (r1 - r2).abs() <= 1e-5 * r1.max(1.0),
            "residual changed under sign flip: {r1} vs {r2}"
        );
        assert!(
            (o1 - o2).abs() <= 1e-5 * o1.max(1.0),
            "orthogonality changed under sign flip: {o1} vs {o2}"
        );
    }

    #[test]
    fn qr_on_laplacian_is_order_unity() {
        let (t, _) = householder_tridiagonalize(&laplacian_2d(3));
        let dec = qr_eigensolve(&t, true).unwrap();
        let a = t.to_dense();
        let r = residual_measure(&a, &dec);
        let o = orthogonality_measure(&dec);
        assert!(r <= 5.0, "residual measure {r} exceeds 5");
        assert!(o <= 5.0, "orthogonality measure {o} exceeds 5");
    }
}
