//! Independent numerical oracles used by the test suites.
//!
//! These deliberately avoid the closed-form expressions under test: unitaries
//! are built by eigendecomposition-based matrix exponentials so that the
//! analytic formulas elsewhere in the crate are checked against an unrelated
//! computation path.

use ndarray::Array2;
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64 as C64;

/// `exp(-i tau H)` for a real symmetric `H`, via full eigendecomposition.
pub fn expm_hermitian(h: &Array2<f64>, tau: f64) -> Array2<C64> {
    let (vals, vecs) = h.eigh(UPLO::Lower).expect("eigh failed");
    let n = h.nrows();
    let mut u = Array2::<C64>::zeros((n, n));
    for k in 0..n {
        let phase = C64::from_polar(1.0, -tau * vals[k]);
        for i in 0..n {
            for j in 0..n {
                u[[i, j]] += phase * vecs[[i, k]] * vecs[[j, k]];
            }
        }
    }
    u
}

/// Largest entrywise difference between two complex matrices.
pub fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    assert_eq!(a.dim(), b.dim());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest entrywise deviation of `U^dagger U` from the identity.
pub fn unitarity_defect(u: &Array2<C64>) -> f64 {
    let n = u.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                acc += u[[k, i]].conj() * u[[k, j]];
            }
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((acc - want).norm());
        }
    }
    worst
}
