//! Small dense linear-algebra helpers shared by the tomography and
//! reconstruction code: Hermitian eigendecompositions, PSD projections and
//! triangular factorizations in the `T^dag T` convention.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::states::C0;

/// Eigendecomposition of a Hermitian matrix; eigenvalues real.
pub fn hermitian_eigen(h: &DMatrix<C64>) -> (DVector<f64>, DMatrix<C64>) {
    let se = h.clone().symmetric_eigen();
    (se.eigenvalues, se.eigenvectors)
}

pub fn min_eigenvalue(h: &DMatrix<C64>) -> f64 {
    hermitian_eigen(h).0.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Sum of |eigenvalue| of a Hermitian matrix (its trace norm).
pub fn trace_norm_hermitian(h: &DMatrix<C64>) -> f64 {
    hermitian_eigen(h).0.iter().map(|l| l.abs()).sum()
}

/// exp(factor * H) for Hermitian H via eigendecomposition; with
/// factor = -i t this is the propagator of a constant Hamiltonian.
pub fn expm_hermitian(h: &DMatrix<C64>, factor: C64) -> DMatrix<C64> {
    let (vals, vecs) = hermitian_eigen(h);
    let d = DMatrix::from_diagonal(&vals.map(|l| (factor * l).exp()));
    &vecs * d * vecs.adjoint()
}

/// Nearest-PSD projection: clip negative eigenvalues to zero.
pub fn eigen_clip_psd(h: &DMatrix<C64>) -> DMatrix<C64> {
    let (vals, vecs) = hermitian_eigen(h);
    let d = DMatrix::from_diagonal(&vals.map(|l| C64::new(l.max(0.0), 0.0)));
    &vecs * d * vecs.adjoint()
}

/// Lower-triangular T with real non-negative diagonal such that
/// T^dag T = A for Hermitian PSD A (Cholesky run from the bottom-right
/// corner). Semidefinite input is handled by zeroing exhausted rows;
/// slightly indefinite input is clamped at `-tol`.
pub fn lower_factor_psd(a: &DMatrix<C64>, tol: f64) -> DMatrix<C64> {
    let d = a.nrows();
    assert_eq!(d, a.ncols());
    let mut w = a.clone();
    let mut t = DMatrix::from_element(d, d, C0);
    for i in (0..d).rev() {
        let mut diag = w[(i, i)].re;
        if diag < -tol {
            diag = 0.0; // clamp indefiniteness
        }
        let tii = diag.max(0.0).sqrt();
        t[(i, i)] = C64::new(tii, 0.0);
        if tii <= tol.max(f64::MIN_POSITIVE).sqrt() * 1e-8 {
            // exhausted direction: leave the row zero
            continue;
        }
        for j in 0..i {
            t[(i, j)] = w[(i, j)] / tii;
        }
        for r in 0..i {
            for c in 0..i {
                let delta = t[(i, r)].conj() * t[(i, c)];
                w[(r, c)] -= delta;
            }
        }
    }
    t
}

/// Frobenius distance.
pub fn frobenius_distance(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).norm()
}
