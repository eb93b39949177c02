//! Safeguarded scalar root finding on a bracket.
//!
//! The secular functions this crate solves have poles at known locations and
//! roots bracketed between them; the sign of the function at each bracket end
//! is often known analytically (as a one-sided limit) even though the
//! function cannot be evaluated there. The solver therefore takes the
//! endpoint *signs* as inputs and only evaluates strictly inside the bracket.
//!
//! Strategy: bisection maintains the bracket at all times; a Newton step is
//! taken from the current iterate and accepted only when it lands strictly
//! inside the bracket. Convergence is declared when the bracket width drops
//! to a few ulps of the endpoints or the function evaluates to exact zero.
//! The returned root is always strictly inside the original open bracket.

use crate::flops;

/// Iteration cap. Bisection halves the bracket every step, so 200 iterations
/// exhausts an f64 bracket many times over; the cap only guards against a
/// sign-inconsistent function.
const MAX_ITERS: usize = 200;

/// Find the root of `f` in the open bracket `(lo, hi)`.
///
/// `f` returns `(value, derivative)`. `sign_lo` and `sign_hi` give the signs
/// of `f` just inside each end (`+1.0` / `-1.0`), and must differ.
///
/// # Panics
/// Panics when `lo >= hi` or the endpoint signs agree (caller bugs).
pub(crate) fn solve_bracketed(
    mut f: impl FnMut(f64) -> (f64, f64),
    lo: f64,
    hi: f64,
    sign_lo: f64,
    sign_hi: f64,
) -> f64 {
    assert!(lo < hi, "empty bracket [{lo}, {hi}]");
    assert!(
        sign_lo * sign_hi < 0.0,
        "bracket endpoints must have opposite signs"
    );

    let mut lo = lo;
    let mut hi = hi;
    let mut x = 0.5 * (lo + hi);
    if x <= lo || x >= hi {
        // Adjacent floats: no interior point exists; give back the midpoint
        // rounded into the bracket.
        return x.max(lo).min(hi);
    }

    for _ in 0..MAX_ITERS {
        let (fx, dfx) = f(x);
        flops::tally(2, 1, 1, 0); // solver bookkeeping per iterate
        if fx == 0.0 {
            return x;
        }
        // Shrink the bracket to keep the sign change inside.
        if fx * sign_lo > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 2.0 * f64::EPSILON * (crate::fmath::abs(lo) + crate::fmath::abs(hi)) {
            break;
        }

        // Prefer a Newton step when it stays strictly inside the bracket.
        let newton = x - fx / dfx;
        x = if dfx != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if x <= lo || x >= hi {
            // The bracket has closed to adjacent floats.
            break;
        }
    }
    // Midpoint of the final bracket, kept strictly inside the original one.
    let mid = 0.5 * (lo + hi);
    if mid > lo && mid < hi {
        mid
    } else {
        x
    }
}
