//! Closed-form proximal operators and projections.

use crate::error::{Error, Result};
use crate::linalg::{ensure_orthogonal, spectral_sum, svd_unchecked, sym_eig_unchecked};
use crate::matrix::{norm2, DenseMatrix};

/// Orthogonality tolerance for the transforms accepted by [`transform_l1_prox`].
pub const ORTHOGONALITY_TOL: f64 = 1e-8;

/// Step weight and ADMM penalty as they enter a prox evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProxParams {
    pub tau: f64,
    pub rho: f64,
}

impl ProxParams {
    pub fn new(tau: f64, rho: f64) -> Result<Self> {
        check_tau(tau)?;
        check_rho(rho)?;
        Ok(Self { tau, rho })
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveTau(tau))
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("rho must be positive, got {rho}")))
    }
}

#[inline]
pub(crate) fn shrink(a: f64, tau: f64) -> f64 {
    if a > tau {
        a - tau
    } else if a < -tau {
        a + tau
    } else {
        0.0
    }
}

/// Entrywise `sign(a) · max(|a| − τ, 0)`.
pub fn soft_threshold(a: &DenseMatrix, tau: f64) -> Result<DenseMatrix> {
    check_tau(tau)?;
    a.ensure_finite()?;
    Ok(a.map(|x| shrink(x, tau)))
}

/// Singular value thresholding, the prox of `τ‖·‖_*`.
pub fn svt(a: &DenseMatrix, tau: f64) -> Result<DenseMatrix> {
    check_tau(tau)?;
    a.ensure_finite()?;
    Ok(svt_with_norm(a, tau).0)
}

/// SVT plus the nuclear norm of the result.
pub(crate) fn svt_with_norm(a: &DenseMatrix, tau: f64) -> (DenseMatrix, f64) {
    let d = svd_unchecked(a);
    let nuc = d.singular_values.iter().map(|&s| (s - tau).max(0.0)).sum();
    (d.reconstruct_with(|s| (s - tau).max(0.0)), nuc)
}

/// SVT of a symmetric matrix through its eigendecomposition: singular values
/// are `|λ|`, so each eigenvalue is shrunk toward zero by `τ`.
pub(crate) fn svt_symmetric_with_norm(a: &DenseMatrix, tau: f64) -> (DenseMatrix, f64) {
    let eig = sym_eig_unchecked(a);
    let w: Vec<f64> = eig.eigenvalues.iter().map(|&l| shrink(l, tau)).collect();
    let nuc = w.iter().map(|x| x.abs()).sum();
    (spectral_sum(&eig.eigenvectors, &w, a.rows()), nuc)
}

/// Positive root of `ρx² − ργx − 1 = 0`, i.e. `(γ + √(γ² + 4/ρ)) / 2`.
#[inline]
pub(crate) fn logdet_root(gamma: f64, rho: f64) -> f64 {
    let disc = (gamma * gamma + 4.0 / rho).sqrt();
    if gamma >= 0.0 {
        0.5 * (gamma + disc)
    } else {
        // avoids cancellation for strongly negative γ
        (2.0 / rho) / (disc - gamma)
    }
}

/// `argmin_X −log det X + (ρ/2)‖X − A‖_F²`; always positive definite.
pub fn prox_neg_logdet(a: &DenseMatrix, rho: f64) -> Result<DenseMatrix> {
    check_rho(rho)?;
    let a = a.checked_symmetric()?;
    Ok(prox_neg_logdet_unchecked(&a, rho))
}

pub(crate) fn prox_neg_logdet_unchecked(a: &DenseMatrix, rho: f64) -> DenseMatrix {
    prox_neg_logdet_with_logdet(a, rho).0
}

/// Also returns `log det` of the result.
pub(crate) fn prox_neg_logdet_with_logdet(a: &DenseMatrix, rho: f64) -> (DenseMatrix, f64) {
    let eig = sym_eig_unchecked(a);
    let w: Vec<f64> = eig.eigenvalues.iter().map(|&g| logdet_root(g, rho)).collect();
    let logdet = w.iter().map(|x| x.ln()).sum();
    (spectral_sum(&eig.eigenvectors, &w, a.rows()), logdet)
}

/// Prox of `τ·tr(L) + I(L ⪰ 0)`: eigenvalues shifted down by `τ` then
/// clamped at zero.
pub fn prox_trace_psd(v: &DenseMatrix, tau: f64) -> Result<DenseMatrix> {
    check_tau(tau)?;
    let v = v.checked_symmetric()?;
    Ok(prox_trace_psd_unchecked(&v, tau).0)
}

/// Also returns the trace of the result.
pub(crate) fn prox_trace_psd_unchecked(v: &DenseMatrix, tau: f64) -> (DenseMatrix, f64) {
    let eig = sym_eig_unchecked(v);
    let w: Vec<f64> = eig.eigenvalues.iter().map(|&l| (l - tau).max(0.0)).collect();
    let tr = w.iter().sum();
    (spectral_sum(&eig.eigenvectors, &w, v.rows()), tr)
}

/// Euclidean projection onto the positive semidefinite cone.
pub fn psd_project(v: &DenseMatrix) -> Result<DenseMatrix> {
    let v = v.checked_symmetric()?;
    let eig = sym_eig_unchecked(&v);
    let w: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    Ok(spectral_sum(&eig.eigenvectors, &w, v.rows()))
}

/// Projection of `v` onto the closed ball `{x : ‖x − center‖₂ ≤ radius}`.
pub fn l2ball_project(v: &[f64], center: &[f64], radius: f64) -> Result<Vec<f64>> {
    if v.len() != center.len() {
        return Err(Error::DimensionMismatch(format!("point has {} entries, center has {}", v.len(), center.len())));
    }
    if !(radius >= 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be nonnegative, got {radius}")));
    }
    Ok(l2ball_project_unchecked(v, center, radius))
}

pub(crate) fn l2ball_project_unchecked(v: &[f64], center: &[f64], radius: f64) -> Vec<f64> {
    let diff: Vec<f64> = v.iter().zip(center).map(|(a, c)| a - c).collect();
    let dist = norm2(&diff);
    if dist <= radius {
        return v.to_vec();
    }
    let s = radius / dist;
    center.iter().zip(&diff).map(|(c, d)| c + s * d).collect()
}

/// Prox of `τ‖W X F‖₁` for orthogonal `W`, `F`:
/// `Wᵀ · soft_threshold(W V F, τ) · Fᵀ`.
pub fn transform_l1_prox(v: &DenseMatrix, w: &DenseMatrix, f: &DenseMatrix, tau: f64) -> Result<DenseMatrix> {
    check_tau(tau)?;
    v.ensure_finite()?;
    ensure_orthogonal(w, ORTHOGONALITY_TOL)?;
    ensure_orthogonal(f, ORTHOGONALITY_TOL)?;
    if w.cols() != v.rows() || v.cols() != f.rows() {
        return Err(Error::DimensionMismatch(format!(
            "W is {}x{}, V is {}x{}, F is {}x{}",
            w.rows(),
            w.cols(),
            v.rows(),
            v.cols(),
            f.rows(),
            f.cols()
        )));
    }
    Ok(transform_l1_prox_unchecked(v, w, f, tau).0)
}

/// Also returns `‖W · out · F‖₁`.
pub(crate) fn transform_l1_prox_unchecked(
    v: &DenseMatrix,
    w: &DenseMatrix,
    f: &DenseMatrix,
    tau: f64,
) -> (DenseMatrix, f64) {
    let coeffs = w.mul_unchecked(v).mul_unchecked(f).map(|x| shrink(x, tau));
    let l1 = coeffs.l1_norm();
    (w.tr_mul(&coeffs).mul_tr(f), l1)
}
