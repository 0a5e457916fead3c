//! Dense linear-algebra kernels.

mod cholesky;
mod eigen;
mod svd;
mod transforms;

pub use cholesky::{spd_inverse, Cholesky};
pub use eigen::{sym_eig, SymEigen};
pub use svd::{svd, Svd};
pub use transforms::{dct_matrix, haar_matrix, orthogonality_defect};

pub(crate) use eigen::{spectral_sum, sym_eig_unchecked};
pub(crate) use svd::svd_unchecked;
pub(crate) use transforms::ensure_orthogonal;

use crate::matrix::DenseMatrix;

/// Nuclear norm (sum of singular values).
pub fn nuclear_norm(a: &DenseMatrix) -> f64 {
    svd_unchecked(a).nuclear_norm()
}

/// Numerical rank: singular values above `rel_tol · σ₁`.
pub fn numerical_rank(a: &DenseMatrix, rel_tol: f64) -> usize {
    let s = svd_unchecked(a);
    let top = s.singular_values.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    s.rank(rel_tol * top)
}

/// Smallest eigenvalue of a symmetric matrix (symmetrized first).
pub fn min_eigenvalue(a: &DenseMatrix) -> f64 {
    sym_eig_unchecked(&a.symmetrize()).min_eigenvalue()
}
