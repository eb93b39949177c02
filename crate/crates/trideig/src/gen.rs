//! Test-matrix generators.
//!
//! Three families cover the benchmark and stress needs: the 2-D Laplacian
//! (the standard accuracy benchmark), uniformly random tridiagonal matrices
//! (oracle fuzzing), and "glued" block matrices whose spectra collapse into
//! tight clusters (the orthogonality stress case).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trideig_core::tridiag::laplacian_2d;
use trideig_core::{DenseSym, SymTridiag};

/// Dense 2-D Dirichlet Laplacian on a `grid × grid` mesh; matrix order is
/// `grid²`.
///
/// # Panics
/// Panics when `grid == 0`.
#[must_use]
pub fn laplacian(grid: usize) -> DenseSym {
    laplacian_2d(grid)
}

/// Random symmetric tridiagonal matrix with entries uniform in `[−1, 1]`,
/// deterministic in `seed`.
///
/// # Panics
/// Panics when `n == 0`.
#[must_use]
pub fn random_tridiag(n: usize, seed: u64) -> SymTridiag {
    assert!(n >= 1, "matrix order must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let diag: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let offdiag: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
    SymTridiag::new(diag, offdiag).expect("lengths are consistent by construction")
}

/// Block size used by [`glued`]: identical blocks of this order are chained
/// with weak couplings.
pub const GLUED_BLOCK: usize = 10;

/// Default inter-block coupling for [`glued`].
pub const GLUED_COUPLING: f64 = 1e-11;

/// Clustered-spectrum stress matrix: identical tridiagonal blocks of order
/// [`GLUED_BLOCK`] joined by off-diagonal couplings of size `coupling`.
///
/// Each block has diagonal `2.0, 2.1, …, 2.9` and unit off-diagonals, so for
/// `n` a multiple of the block size every block eigenvalue recurs once per
/// block, split only by the weak couplings — the eigenvalues arrive in
/// near-degenerate clusters of `n / GLUED_BLOCK` members.
///
/// # Panics
/// Panics when `n == 0`.
#[must_use]
pub fn glued_with_coupling(n: usize, coupling: f64) -> SymTridiag {
    assert!(n >= 1, "matrix order must be at least 1");
    let diag: Vec<f64> = (0..n).map(|i| 2.0 + 0.1 * (i % GLUED_BLOCK) as f64).collect();
    let offdiag: Vec<f64> = (0..n - 1)
        .map(|i| {
            if (i + 1) % GLUED_BLOCK == 0 {
                coupling
            } else {
                1.0
            }
        })
        .collect();
    SymTridiag::new(diag, offdiag).expect("lengths are consistent by construction")
}

/// [`glued_with_coupling`] at the default coupling [`GLUED_COUPLING`].
#[must_use]
pub fn glued(n: usize) -> SymTridiag {
    glued_with_coupling(n, GLUED_COUPLING)
}

#[cfg(test)]
mod tests {
    use super::*;
    use trideig_core::qr::qr_eigensolve;

    #[test]
    fn laplacian_matches_stencil() {
        let a = laplacian(3);
        assert_eq!(a.n(), 9);
        // h = 1/4, so the diagonal is 4/h² = 64 and neighbor couplings −16.
        assert_eq!(a.at(0, 0), 64.0);
        assert_eq!(a.at(0, 1), -16.0);
        assert_eq!(a.at(0, 3), -16.0);
        assert_eq!(a.at(0, 4), 0.0);
        // Grid row boundary: index 2 and 3 are not mesh neighbors.
        assert_eq!(a.at(2, 3), 0.0);
    }

    #[test]
    fn random_tridiag_is_deterministic_and_bounded() {
        let a = random_tridiag(50, 7);
        let b = random_tridiag(50, 7);
        assert_eq!(
            a.diag().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            b.diag().iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
        assert_eq!(
            a.offdiag().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            b.offdiag().iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
        let c = random_tridiag(50, 8);
        assert_ne!(a.diag(), c.diag(), "different seeds should differ");
        assert!(a.diag().iter().chain(a.offdiag()).all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn random_tridiag_handles_order_one() {
        let a = random_tridiag(1, 3);
        assert_eq!(a.n(), 1);
        assert!(a.offdiag().is_empty());
    }

    #[test]
    fn glued_layout_places_weak_couplings_at_block_seams() {
        let a = glued(25);
        assert_eq!(a.diag()[0], 2.0);
        assert_eq!(a.diag()[9], 2.9);
        assert_eq!(a.diag()[10], 2.0);
        assert_eq!(a.offdiag()[8], 1.0);
        assert_eq!(a.offdiag()[9], GLUED_COUPLING);
        assert_eq!(a.offdiag()[10], 1.0);
        assert_eq!(a.offdiag()[19], GLUED_COUPLING);
    }

    #[test]
    fn glued_spectrum_has_near_degenerate_clusters() {
        let a = glued(60);
        let dec = qr_eigensolve(&a, false).unwrap();
        let vals = dec.eigenvalues();
        let min_gap = vals
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        assert!(
            min_gap < 1e-10 * a.inf_norm(),
            "expected a clustered spectrum, smallest gap {min_gap:.3e}"
        );
    }
}
