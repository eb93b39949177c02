//! Eigenvector extraction for the rank-two modification problem.
//!
//! Two methods with different accuracy/robustness trade-offs:
//!
//! * [`rank_two_vectors`] — direct per-root construction. An eigenvector
//!   for a secular root `λ` is a combination `x = a·u₁ + b·u₂` of the
//!   pole-weighted vectors `uₖ = (λI − D)⁻¹vₖ`, with `(a, b)` the null
//!   vector of a 2×2 system whose determinant is the secular function.
//!   Cheap, but near-coincident roots inherit the classic orthogonality
//!   loss of explicit inverse-pole formulas.
//! * [`rank_two_vectors_stable`] — solves the modification as a chain of
//!   two rank-one problems: first the head block carrying `v₁`, then the
//!   full problem with `v₂` rotated into the head's eigenbasis. Each stage
//!   uses the orthogonality-preserving rank-one machinery, so the composed
//!   basis stays numerically orthogonal even for pathologically clustered
//!   spectra.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::flops;
use crate::fmath;
use crate::rank_one::{solve_rank_one, RankOneProblem};
use crate::tridiag::Mat;

use super::RankTwoProblem;

/// Relative width within which two consecutive roots are treated as a
/// numerically coincident pair.
fn paired(a: f64, b: f64) -> bool {
    (b - a).abs() <= 4.0 * f64::EPSILON * (1.0 + fmath::abs(a).max(fmath::abs(b)))
}

fn pole_index(p: &RankTwoProblem, lambda: f64) -> Option<usize> {
    p.d.iter().position(|&di| {
        fmath::abs(lambda - di) <= 2.0 * f64::EPSILON * (fmath::abs(lambda) + fmath::abs(di))
    })
}

/// Eigenvector for an eigenvalue sitting on pole `k`, valid when the
/// pole's residue numerically vanishes (deflation misses, boundary values
/// and barely-alive poles). Writing the eigenvalue equation at `λ = d_k`,
/// row `k` forces `β₁v₁ₖ·v₁ᵀx + β₂v₂ₖ·v₂ᵀx = 0`, which fixes the two dot
/// products up to scale; the other rows then give `x_q` directly, and row
/// `k`'s own entry follows from whichever dot product has the
/// better-conditioned coefficient.
fn on_pole_vector(p: &RankTwoProblem, k: usize) -> Result<Vec<f64>> {
    let n = p.n();
    let b12 = p.beta1 * p.beta2;
    let mut x = vec![0.0; n];
    let (mut t1, mut t2) = (0.0_f64, 0.0_f64);
    for q in 0..n {
        if q == k {
            continue;
        }
        let cross = p.v1[q] * p.v2[k] - p.v2[q] * p.v1[k];
        let w = cross / (p.d[q] - p.d[k]);
        x[q] = -b12 * w;
        t1 += p.v1[q] * w;
        t2 += p.v2[q] * w;
    }
    x[k] = if fmath::abs(p.v1[k]) >= fmath::abs(p.v2[k]) {
        (p.beta2 * p.v2[k] + b12 * t1) / p.v1[k]
    } else {
        (-p.beta1 * p.v1[k] + b12 * t2) / p.v2[k]
    };
    let nrm = norm(&x);
    if !(nrm.is_finite() && nrm > 0.0) {
        return Err(Error::DegenerateSystem { root_index: k });
    }
    for t in &mut x {
        *t /= nrm;
    }
    flops::tally(5 * n as u64, 7 * n as u64, n as u64 + 2, 1);
    Ok(x)
}

/// Unit eigenvector columns for the given secular roots (ascending), by
/// the direct inverse-pole construction.
///
/// A root coinciding with a pole gets the on-pole construction (such roots
/// come from barely-alive poles whose residue is below resolution); the
/// rest must sit strictly between poles. Coincident root pairs produce an
/// orthonormalized basis of the two-dimensional space spanned by both
/// pole-weighted vectors.
pub fn rank_two_vectors(p: &RankTwoProblem, roots: &[f64]) -> Result<Mat> {
    let n = p.n();
    let mut out = Mat::zeros(n, roots.len());
    let mut j = 0;
    while j < roots.len() {
        if let Some(k) = pole_index(p, roots[j]) {
            let x = on_pole_vector(p, k)?;
            out.set_col(j, &x);
            j += 1;
            continue;
        }
        if j + 1 < roots.len()
            && paired(roots[j], roots[j + 1])
            && pole_index(p, roots[j + 1]).is_none()
        {
            let lam = 0.5 * (roots[j] + roots[j + 1]);
            let (u1, u2) = pole_weighted(p, lam);
            let (q1, q2) =
                orthonormal_pair(&u1, &u2).ok_or(Error::DegenerateSystem { root_index: j + 1 })?;
            out.set_col(j, &q1);
            out.set_col(j + 1, &q2);
            j += 2;
            continue;
        }
        let x = simple_root_vector(p, roots[j], j)?;
        out.set_col(j, &x);
        j += 1;
    }
    Ok(out)
}

/// `u₁ = (λI − D)⁻¹v₁` and `u₂ = (λI − D)⁻¹v₂`.
fn pole_weighted(p: &RankTwoProblem, lam: f64) -> (Vec<f64>, Vec<f64>) {
    let n = p.n();
    let mut u1 = vec![0.0; n];
    let mut u2 = vec![0.0; n];
    for i in 0..n {
        let inv = 1.0 / (lam - p.d[i]);
        u1[i] = p.v1[i] * inv;
        u2[i] = p.v2[i] * inv;
    }
    flops::tally(n as u64, 2 * n as u64, n as u64, 0);
    (u1, u2)
}

fn norm(x: &[f64]) -> f64 {
    fmath::sqrt(x.iter().map(|&t| t * t).sum())
}

/// Orthonormal basis of span{u₁, u₂}, preferring `u₁` as the first leg;
/// `None` when the two vectors are numerically parallel.
fn orthonormal_pair(u1: &[f64], u2: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
    let (first, second) = if norm(u1) >= norm(u2) {
        (u1, u2)
    } else {
        (u2, u1)
    };
    let n1 = norm(first);
    if n1 == 0.0 {
        return None;
    }
    let q1: Vec<f64> = first.iter().map(|&t| t / n1).collect();
    let dot: f64 = q1.iter().zip(second).map(|(&a, &b)| a * b).sum();
    let mut q2: Vec<f64> = second.iter().zip(&q1).map(|(&b, &a)| b - dot * a).collect();
    let n2 = norm(&q2);
    if n2 <= 64.0 * f64::EPSILON * norm(second).max(n1) {
        return None;
    }
    for t in &mut q2 {
        *t /= n2;
    }
    flops::tally(
        6 * q1.len() as u64,
        6 * q1.len() as u64,
        2 * q1.len() as u64,
        2,
    );
    Some((q1, q2))
}

/// Eigenvector for a simple secular root: null vector of the 2×2
/// self-consistency system applied to the pole-weighted vectors.
fn simple_root_vector(p: &RankTwoProblem, lam: f64, root_index: usize) -> Result<Vec<f64>> {
    let n = p.n();
    let (u1, u2) = pole_weighted(p, lam);
    let (mut c1, mut c2, mut c3) = (0.0_f64, 0.0_f64, 0.0_f64);
    let (mut m1, mut m2, mut m3) = (0.0_f64, 0.0_f64, 0.0_f64);
    for i in 0..n {
        c1 += p.v1[i] * u1[i];
        c2 += p.v2[i] * u2[i];
        c3 += p.v1[i] * u2[i];
        m1 += fmath::abs(p.v1[i] * u1[i]);
        m2 += fmath::abs(p.v2[i] * u2[i]);
        m3 += fmath::abs(p.v1[i] * u2[i]);
    }
    // Rows of the system [[β₁c₁ − 1, β₁c₃], [β₂c₃, β₂c₂ − 1]]·(a, b)ᵀ = 0,
    // whose determinant is the secular value (zero at a root).
    let row1 = (p.beta1 * c1 - 1.0, p.beta1 * c3);
    let row2 = (p.beta2 * c3, p.beta2 * c2 - 1.0);
    let mag1 = fmath::abs(p.beta1) * (m1 + m3) + 1.0;
    let mag2 = fmath::abs(p.beta2) * (m3 + m2) + 1.0;
    let inf1 = fmath::abs(row1.0).max(fmath::abs(row1.1));
    let inf2 = fmath::abs(row2.0).max(fmath::abs(row2.1));
    let eps = f64::EPSILON;
    if inf1 <= 4.0 * eps * mag1 && inf2 <= 4.0 * eps * mag2 {
        // Both equations vanish to rounding: the 2×2 system is numerically
        // zero and the combination direction is undetermined.
        return Err(Error::DegenerateSystem { root_index });
    }
    let (a, b) = if inf1 / mag1 >= inf2 / mag2 {
        (row1.1, -row1.0)
    } else {
        (row2.1, -row2.0)
    };
    let mut x: Vec<f64> = (0..n).map(|i| a * u1[i] + b * u2[i]).collect();
    let nx = norm(&x);
    if nx == 0.0 {
        return Err(Error::DegenerateSystem { root_index });
    }
    for t in &mut x {
        *t /= nx;
    }
    flops::tally(8 * n as u64 + 8, 10 * n as u64 + 10, n as u64 + 2, 1);
    Ok(x)
}

/// Unit eigenvector columns by the chained rank-one method.
///
/// Requires the full ascending eigenvalue list of the problem (all `n`
/// values, deflated and boundary values included) purely as a consistency
/// check: the vectors are derived from two rank-one solves, and their
/// columns correspond positionally to the ascending eigenvalues.
///
/// `p.head` must bound the support of `v₁`: components from `head` onward
/// must be exactly zero (`None` means `v₁` may have full support). The
/// first stage diagonalizes the head block of `D + β₁v₁v₁ᵀ`; the second
/// solves the whole problem in that basis, where it is a pure rank-one
/// modification by `v₂`.
pub fn rank_two_vectors_stable(p: &RankTwoProblem, roots: &[f64]) -> Result<Mat> {
    let n = p.n();
    if roots.len() != n {
        return Err(Error::InvalidArgument(
            "stable vector extraction needs the full eigenvalue list",
        ));
    }
    let h = p.head.unwrap_or(n);
    if h > n {
        return Err(Error::InvalidArgument("head extends past the problem size"));
    }
    if p.v1[h..].iter().any(|&t| t != 0.0) {
        return Err(Error::InvalidArgument(
            "first modification vector must vanish beyond the head block",
        ));
    }

    // Stage one: eigenbasis of the head block of D + β₁v₁v₁ᵀ.
    let head = if h > 0 {
        let b1 = RankOneProblem::new(p.d[..h].to_vec(), p.v1[..h].to_vec(), p.beta1)?;
        let dec1 = solve_rank_one(&b1)?;
        let (vals, vecs) = dec1.into_parts();
        let q1 = vecs.ok_or(Error::InvalidArgument("rank-one stage produced no vectors"))?;
        Some((vals, q1))
    } else {
        None
    };

    // Stage two: in the stage-one basis the problem is diagonal plus
    // β₂·z₂z₂ᵀ with z₂ the rotated second vector.
    let (mut d2, mut z2) = match &head {
        Some((vals, q1)) => {
            let z_head = q1.tr_mul_vec(&p.v2[..h]);
            flops::tally((h * h) as u64, (h * h) as u64, 0, 0);
            (vals.clone(), z_head)
        }
        None => (Vec::new(), Vec::new()),
    };
    d2.extend_from_slice(&p.d[h..]);
    z2.extend_from_slice(&p.v2[h..]);
    let b2 = RankOneProblem::new(d2, z2, p.beta2)?;
    let dec2 = solve_rank_one(&b2)?;
    let (_, vecs2) = dec2.into_parts();
    let u2 = vecs2.ok_or(Error::InvalidArgument("rank-one stage produced no vectors"))?;

    // Compose: rows inside the head go back through the stage-one basis,
    // rows past it are untouched by stage one.
    let mut out = Mat::zeros(n, n);
    if let Some((_, q1)) = &head {
        for i in 0..h {
            for k in 0..h {
                let qik = q1.at(i, k);
                if qik == 0.0 {
                    continue;
                }
                for c in 0..n {
                    out.set(i, c, out.at(i, c) + qik * u2.at(k, c));
                }
            }
        }
        flops::tally((h * h * n) as u64, (h * h * n) as u64, 0, 0);
    }
    for i in h..n {
        for c in 0..n {
            out.set(i, c, u2.at(i, c));
        }
    }
    Ok(out)
}
