//! Graphical lasso: `min −log det S + tr(SΣ) + λ‖S‖₁` over `S ≻ 0`.
//!
//! Splitting `R = Z` with the log-det and trace terms on `R` and the ℓ1 term
//! on `Z`.

use super::admm::{self, Residuals, Splitting};
use super::{check_nonnegative, ensure_psd_input, SolveResult, SolverConfig};
use crate::error::{Error, Result};
use crate::linalg::Cholesky;
use crate::matrix::DenseMatrix;
use crate::prox::{prox_neg_logdet_with_logdet, shrink};

#[derive(Debug, Clone)]
pub struct GlassoSpec {
    /// Empirical covariance.
    pub sigma: DenseMatrix,
    pub lambda: f64,
    pub penalize_diagonal: bool,
}

impl GlassoSpec {
    pub fn new(sigma: DenseMatrix, lambda: f64) -> Self {
        Self { sigma, lambda, penalize_diagonal: false }
    }
}

/// Entrywise ℓ1 prox that optionally leaves the diagonal alone.
pub(crate) fn soft_offdiag(a: &DenseMatrix, tau: f64, penalize_diagonal: bool) -> DenseMatrix {
    let n = a.cols();
    let mut out = a.clone();
    for (idx, x) in out.as_mut_slice().iter_mut().enumerate() {
        if penalize_diagonal || idx / n != idx % n {
            *x = shrink(*x, tau);
        }
    }
    out
}

pub(crate) fn l1_penalty(a: &DenseMatrix, penalize_diagonal: bool) -> f64 {
    if penalize_diagonal {
        a.l1_norm()
    } else {
        a.l1_norm_offdiag()
    }
}

pub(crate) fn validate_covariance(sigma: &DenseMatrix) -> Result<DenseMatrix> {
    let sigma = ensure_psd_input(sigma)?;
    if sigma.diagonal().iter().any(|&d| d <= 0.0) {
        return Err(Error::InvalidParameter("covariance diagonal must be positive".into()));
    }
    Ok(sigma)
}

struct Glasso<'a> {
    sigma: &'a DenseMatrix,
    lambda: f64,
    penalize_diagonal: bool,
    r: DenseMatrix,
    logdet_r: f64,
    z: DenseMatrix,
    u: DenseMatrix,
    z_prev: DenseMatrix,
}

impl Splitting for Glasso<'_> {
    fn primal_dim(&self) -> usize {
        self.r.as_slice().len()
    }

    fn dual_dim(&self) -> usize {
        self.r.as_slice().len()
    }

    fn update_x(&mut self, rho: f64) {
        let v = self.z.zip_map_unchecked(&self.u, |z, u| z - u).zip_map_unchecked(self.sigma, |a, s| a - s / rho);
        let (r, logdet) = prox_neg_logdet_with_logdet(&v, rho);
        self.r = r;
        self.logdet_r = logdet;
    }

    fn update_z(&mut self, rho: f64) {
        std::mem::swap(&mut self.z_prev, &mut self.z);
        let v = self.r.zip_map_unchecked(&self.u, |r, u| r + u);
        self.z = soft_offdiag(&v, self.lambda / rho, self.penalize_diagonal);
    }

    fn update_dual(&mut self) -> Residuals {
        let mut primal = 0.0;
        for ((u, r), z) in self.u.as_mut_slice().iter_mut().zip(self.r.as_slice()).zip(self.z.as_slice()) {
            let d = r - z;
            *u += d;
            primal += d * d;
        }
        Residuals {
            primal: primal.sqrt(),
            dual_change: admm::diff_norm_sq(&self.z, &self.z_prev).sqrt(),
            ax_norm: self.r.frobenius_norm(),
            bz_norm: self.z.frobenius_norm(),
            c_norm: 0.0,
            dual_norm: self.u.frobenius_norm(),
        }
    }

    fn scale_dual(&mut self, factor: f64) {
        self.u = self.u.scale(factor);
    }

    fn objective(&self) -> f64 {
        -self.logdet_r + self.r.inner(self.sigma) + self.lambda * l1_penalty(&self.r, self.penalize_diagonal)
    }
}

/// Max-norm violation of `S⁻¹ − Σ − λG = 0` for the best subgradient `G` of
/// the penalty at `S`.
pub(crate) fn kkt_violation(
    s_inv: &DenseMatrix,
    s: &DenseMatrix,
    sigma: &DenseMatrix,
    lambda: f64,
    pen_diag: bool,
) -> f64 {
    let n = s.cols();
    let mut worst = 0.0f64;
    for idx in 0..n * n {
        let g = s_inv.as_slice()[idx] - sigma.as_slice()[idx];
        let x = s.as_slice()[idx];
        let penalized = pen_diag || idx / n != idx % n;
        let v = if !penalized {
            g.abs()
        } else if x != 0.0 {
            (g - lambda * x.signum()).abs()
        } else {
            (g.abs() - lambda).max(0.0)
        };
        worst = worst.max(v);
    }
    worst
}

pub fn glasso_solve(spec: &GlassoSpec, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate()?;
    check_nonnegative("lambda", spec.lambda)?;
    let sigma = validate_covariance(&spec.sigma)?;
    let p = sigma.rows();
    let start = DenseMatrix::diag(&sigma.diagonal().iter().map(|d| 1.0 / d).collect::<Vec<_>>());
    let mut prob = Glasso {
        sigma: &sigma,
        lambda: spec.lambda,
        penalize_diagonal: spec.penalize_diagonal,
        r: start.clone(),
        logdet_r: 0.0,
        z: start,
        u: DenseMatrix::zeros(p, p),
        z_prev: DenseMatrix::zeros(p, p),
    };
    let trace = admm::run(&mut prob, cfg);
    let mut out = SolveResult::from_trace("glasso", trace);

    // Prefer the sparse block; fall back to the log-det block when the
    // thresholded iterate is not positive definite.
    let s = match Cholesky::new(&prob.z) {
        Ok(_) => prob.z.clone(),
        Err(_) => prob.r.clone(),
    };
    let ch = Cholesky::new(&s)?;
    out.objective = -ch.log_det() + s.inner(&sigma) + spec.lambda * l1_penalty(&s, spec.penalize_diagonal);
    let kkt = kkt_violation(&ch.inverse(), &s, &sigma, spec.lambda, spec.penalize_diagonal);
    out.report("kkt", kkt);
    out.report("symmetry", s.asymmetry());
    out.push_var("S", s);
    Ok(out)
}
