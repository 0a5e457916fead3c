//! Orthogonal sparsifying transforms.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Orthonormal Haar wavelet matrix; rows are the basis functions.
///
/// Built recursively as `H₂ₙ = [Hₙ ⊗ (1, 1); Iₙ ⊗ (1, −1)] / √2`.
pub fn haar_matrix(size: usize) -> Result<DenseMatrix> {
    if size == 0 || !size.is_power_of_two() {
        return Err(Error::SizeNotPowerOfTwo(size));
    }
    let mut h = DenseMatrix::identity(1);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    while h.rows() < size {
        let n = h.rows();
        let mut next = DenseMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                next[(i, 2 * j)] = h[(i, j)] * r;
                next[(i, 2 * j + 1)] = h[(i, j)] * r;
            }
            next[(n + i, 2 * i)] = r;
            next[(n + i, 2 * i + 1)] = -r;
        }
        h = next;
    }
    Ok(h)
}

/// Orthonormal DCT-II matrix: `T[k][j] = α_k cos(π (2j + 1) k / 2n)`.
pub fn dct_matrix(size: usize) -> Result<DenseMatrix> {
    if size == 0 {
        return Err(Error::InvalidShape("DCT of size 0".into()));
    }
    let n = size as f64;
    Ok(DenseMatrix::from_fn(size, size, |k, j| {
        let alpha = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
        alpha * (PI * (2 * j + 1) as f64 * k as f64 / (2.0 * n)).cos()
    }))
}

/// Largest entry of `|TᵀT − I|`.
pub fn orthogonality_defect(t: &DenseMatrix) -> f64 {
    if !t.is_square() {
        return f64::INFINITY;
    }
    let g = t.tr_mul(t);
    let mut dev = 0.0f64;
    for i in 0..g.rows() {
        for j in 0..g.cols() {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((g[(i, j)] - target).abs());
        }
    }
    dev
}

pub(crate) fn ensure_orthogonal(t: &DenseMatrix, tol: f64) -> Result<()> {
    t.ensure_finite()?;
    let dev = orthogonality_defect(t);
    if dev > tol {
        return Err(Error::NotOrthogonal(dev));
    }
    Ok(())
}
