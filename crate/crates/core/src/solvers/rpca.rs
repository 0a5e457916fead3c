//! Robust PCA with partial observations:
//! `min ‖L‖_* + λ‖S‖₁` subject to `L + S = M` on the observed entries.
//!
//! Written as `L + W = M̄` with `M̄` the zero-filled data and `W` the sparse
//! part on observed entries plus a free filler on unobserved ones.

use super::admm::{Residuals, Splitting};
use super::{admm, check_positive, SolveResult, SolverConfig};
use crate::error::{Error, Result};
use crate::mask::Mask;
use crate::matrix::DenseMatrix;
use crate::prox::{shrink, svt_with_norm};

#[derive(Debug, Clone)]
pub struct RpcaSpec {
    pub m: DenseMatrix,
    pub mask: Mask,
    /// Defaults to `1/√max(n1, n2)`.
    pub lambda: Option<f64>,
}

impl RpcaSpec {
    pub fn new(m: DenseMatrix, mask: Mask, lambda: Option<f64>) -> Self {
        Self { m, mask, lambda }
    }

    /// Fully observed instance with the default `λ`.
    pub fn full(m: DenseMatrix) -> Self {
        let mask = Mask::full(m.rows(), m.cols());
        Self { m, mask, lambda: None }
    }

    pub fn effective_lambda(&self) -> f64 {
        self.lambda.unwrap_or_else(|| 1.0 / (self.m.rows().max(self.m.cols()) as f64).sqrt())
    }
}

struct Rpca<'a> {
    mbar: &'a DenseMatrix,
    observed: &'a [bool],
    lambda: f64,
    l: DenseMatrix,
    nuclear: f64,
    w: DenseMatrix,
    w_prev: DenseMatrix,
    u: DenseMatrix,
}

impl Rpca<'_> {
    fn sparse_l1(&self) -> f64 {
        self.w.as_slice().iter().zip(self.observed).filter(|(_, &o)| o).map(|(x, _)| x.abs()).sum()
    }
}

impl Splitting for Rpca<'_> {
    fn primal_dim(&self) -> usize {
        self.l.as_slice().len()
    }

    fn dual_dim(&self) -> usize {
        self.l.as_slice().len()
    }

    fn update_x(&mut self, rho: f64) {
        let mut v = self.mbar.clone();
        for ((x, w), u) in v.as_mut_slice().iter_mut().zip(self.w.as_slice()).zip(self.u.as_slice()) {
            *x -= w + u;
        }
        let (l, nuc) = svt_with_norm(&v, 1.0 / rho);
        self.l = l;
        self.nuclear = nuc;
    }

    fn update_z(&mut self, rho: f64) {
        std::mem::swap(&mut self.w, &mut self.w_prev);
        let tau = self.lambda / rho;
        let w = self.w.as_mut_slice();
        let it = self.mbar.as_slice().iter().zip(self.l.as_slice()).zip(self.u.as_slice()).zip(self.observed);
        for (i, (((m, l), u), &obs)) in it.enumerate() {
            let v = m - l - u;
            w[i] = if obs { shrink(v, tau) } else { v };
        }
    }

    fn update_dual(&mut self) -> Residuals {
        let mut primal = 0.0;
        let it =
            self.u.as_mut_slice().iter_mut().zip(self.l.as_slice()).zip(self.w.as_slice()).zip(self.mbar.as_slice());
        for (((u, l), w), m) in it {
            let d = l + w - m;
            *u += d;
            primal += d * d;
        }
        Residuals {
            primal: primal.sqrt(),
            dual_change: admm::diff_norm_sq(&self.w, &self.w_prev).sqrt(),
            ax_norm: self.l.frobenius_norm(),
            bz_norm: self.w.frobenius_norm(),
            c_norm: self.mbar.frobenius_norm(),
            dual_norm: self.u.frobenius_norm(),
        }
    }

    fn scale_dual(&mut self, factor: f64) {
        self.u = self.u.scale(factor);
    }

    fn objective(&self) -> f64 {
        self.nuclear + self.lambda * self.sparse_l1()
    }
}

pub fn rpca_solve(spec: &RpcaSpec, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate()?;
    spec.m.ensure_finite()?;
    spec.mask.check_shape(&spec.m)?;
    if spec.mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    let lambda = spec.effective_lambda();
    check_positive("lambda", lambda)?;
    let (n1, n2) = spec.m.shape();
    let mbar = spec.mask.apply(&spec.m);
    let mut prob = Rpca {
        mbar: &mbar,
        observed: spec.mask.bits(),
        lambda,
        l: DenseMatrix::zeros(n1, n2),
        nuclear: 0.0,
        w: DenseMatrix::zeros(n1, n2),
        w_prev: DenseMatrix::zeros(n1, n2),
        u: DenseMatrix::zeros(n1, n2),
    };
    let trace = admm::run(&mut prob, cfg);
    let mut out = SolveResult::from_trace("rpca", trace);

    // S keeps the observed part of W; the remaining observed residual is
    // moved into L so the equality holds at the returned point.
    let s = spec.mask.apply(&prob.w);
    let mut l = prob.l.clone();
    let mut correction = 0.0f64;
    for (i, &obs) in spec.mask.bits().iter().enumerate() {
        if obs {
            let r = spec.m.as_slice()[i] - l.as_slice()[i] - s.as_slice()[i];
            correction = correction.max(r.abs());
            l.as_mut_slice()[i] += r;
        }
    }
    out.record_correction("observed_residual", correction);
    let mut violation = 0.0f64;
    for (i, &obs) in spec.mask.bits().iter().enumerate() {
        if obs {
            violation = violation.max((spec.m.as_slice()[i] - l.as_slice()[i] - s.as_slice()[i]).abs());
        }
    }
    out.report("equality", violation / spec.m.max_abs().max(1e-300));
    out.objective = crate::linalg::nuclear_norm(&l) + lambda * s.l1_norm();
    out.push_var("L", l);
    out.push_var("S", s);
    Ok(out)
}
