//! Latent-variable graphical lasso:
//! `min −log det(S − L) + tr((S − L)Σ) + λ‖S‖₁ + λγ·tr L` over `L ⪰ 0`, `S − L ≻ 0`.
//!
//! Consensus form: block one holds `(R, S, L)` with separable proxes, block
//! two holds copies `(R̃, S̃, L̃)` constrained to `R̃ = S̃ − L̃`, which is a
//! closed-form projection.

use super::admm::{self, Residuals, Splitting};
use super::glasso::{l1_penalty, soft_offdiag, validate_covariance};
use super::{check_positive, SolveResult, SolverConfig};
use crate::error::Result;
use crate::linalg::min_eigenvalue;
use crate::matrix::DenseMatrix;
use crate::prox::{prox_neg_logdet_with_logdet, prox_trace_psd_unchecked};

/// Diagonal shift applied when `S − L` is positive definite only marginally.
pub const PD_SHIFT: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct LvglassoSpec {
    pub sigma: DenseMatrix,
    /// Weight of `‖S‖₁`.
    pub lambda: f64,
    /// Ratio of the trace weight to `λ`. Large `γ` drives `L` to zero and the
    /// problem to the graphical lasso with the same `λ`.
    pub gamma: f64,
    pub penalize_diagonal: bool,
}

impl LvglassoSpec {
    pub fn new(sigma: DenseMatrix, lambda: f64, gamma: f64) -> Self {
        Self { sigma, lambda, gamma, penalize_diagonal: false }
    }
}

struct Lvglasso<'a> {
    sigma: &'a DenseMatrix,
    tau_s: f64,
    tau_l: f64,
    penalize_diagonal: bool,
    r: DenseMatrix,
    s: DenseMatrix,
    l: DenseMatrix,
    logdet_r: f64,
    trace_l: f64,
    rt: DenseMatrix,
    st: DenseMatrix,
    lt: DenseMatrix,
    prev: [DenseMatrix; 3],
    ur: DenseMatrix,
    us: DenseMatrix,
    ul: DenseMatrix,
}

impl Splitting for Lvglasso<'_> {
    fn primal_dim(&self) -> usize {
        3 * self.r.as_slice().len()
    }

    fn dual_dim(&self) -> usize {
        3 * self.r.as_slice().len()
    }

    fn update_x(&mut self, rho: f64) {
        let v = self.rt.zip_map_unchecked(&self.ur, |a, u| a - u).zip_map_unchecked(self.sigma, |a, s| a - s / rho);
        let (r, logdet) = prox_neg_logdet_with_logdet(&v, rho);
        self.r = r;
        self.logdet_r = logdet;
        let v = self.st.zip_map_unchecked(&self.us, |a, u| a - u);
        self.s = soft_offdiag(&v, self.tau_s / rho, self.penalize_diagonal);
        let v = self.lt.zip_map_unchecked(&self.ul, |a, u| a - u);
        let (l, tr) = prox_trace_psd_unchecked(&v, self.tau_l / rho);
        self.l = l;
        self.trace_l = tr;
    }

    fn update_z(&mut self, _rho: f64) {
        std::mem::swap(&mut self.prev[0], &mut self.rt);
        std::mem::swap(&mut self.prev[1], &mut self.st);
        std::mem::swap(&mut self.prev[2], &mut self.lt);
        let a = self.r.zip_map_unchecked(&self.ur, |x, u| x + u);
        let b = self.s.zip_map_unchecked(&self.us, |x, u| x + u);
        let c = self.l.zip_map_unchecked(&self.ul, |x, u| x + u);
        // projection onto {R̃ − S̃ + L̃ = 0}
        let r3 = a.zip_map_unchecked(&b, |x, y| x - y).zip_map_unchecked(&c, |x, y| (x + y) / 3.0);
        self.rt = a.zip_map_unchecked(&r3, |x, m| x - m);
        self.st = b.zip_map_unchecked(&r3, |x, m| x + m);
        self.lt = c.zip_map_unchecked(&r3, |x, m| x - m);
    }

    fn update_dual(&mut self) -> Residuals {
        let mut primal = 0.0;
        for (u, x, z) in
            [(&mut self.ur, &self.r, &self.rt), (&mut self.us, &self.s, &self.st), (&mut self.ul, &self.l, &self.lt)]
        {
            for ((u, a), b) in u.as_mut_slice().iter_mut().zip(x.as_slice()).zip(z.as_slice()) {
                let d = a - b;
                *u += d;
                primal += d * d;
            }
        }
        let change = admm::diff_norm_sq(&self.rt, &self.prev[0])
            + admm::diff_norm_sq(&self.st, &self.prev[1])
            + admm::diff_norm_sq(&self.lt, &self.prev[2]);
        Residuals {
            primal: primal.sqrt(),
            dual_change: change.sqrt(),
            ax_norm: admm::stacked_norm(&[&self.r, &self.s, &self.l]),
            bz_norm: admm::stacked_norm(&[&self.rt, &self.st, &self.lt]),
            c_norm: 0.0,
            dual_norm: admm::stacked_norm(&[&self.ur, &self.us, &self.ul]),
        }
    }

    fn scale_dual(&mut self, factor: f64) {
        self.ur = self.ur.scale(factor);
        self.us = self.us.scale(factor);
        self.ul = self.ul.scale(factor);
    }

    fn objective(&self) -> f64 {
        -self.logdet_r
            + self.r.inner(self.sigma)
            + self.tau_s * l1_penalty(&self.s, self.penalize_diagonal)
            + self.tau_l * self.trace_l
    }
}

pub fn lvglasso_solve(spec: &LvglassoSpec, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate()?;
    check_positive("lambda", spec.lambda)?;
    check_positive("gamma", spec.gamma)?;
    let sigma = validate_covariance(&spec.sigma)?;
    let p = sigma.rows();
    let start = DenseMatrix::diag(&sigma.diagonal().iter().map(|d| 1.0 / d).collect::<Vec<_>>());
    let zero = DenseMatrix::zeros(p, p);
    let mut prob = Lvglasso {
        sigma: &sigma,
        tau_s: spec.lambda,
        tau_l: spec.lambda * spec.gamma,
        penalize_diagonal: spec.penalize_diagonal,
        r: start.clone(),
        s: start.clone(),
        l: zero.clone(),
        logdet_r: 0.0,
        trace_l: 0.0,
        rt: start.clone(),
        st: start,
        lt: zero.clone(),
        prev: [zero.clone(), zero.clone(), zero.clone()],
        ur: zero.clone(),
        us: zero.clone(),
        ul: zero,
    };
    let trace = admm::run(&mut prob, cfg);
    let mut out = SolveResult::from_trace("lvglasso", trace);

    let mut s = prob.s.clone();
    let l = prob.l.clone();
    let k = s.sub(&l)?;
    let consensus = prob.r.sub(&k)?.frobenius_norm() / k.frobenius_norm().max(1.0);
    let mut min_eig = min_eigenvalue(&s.sub(&l)?);
    if min_eig > 0.0 && min_eig <= PD_SHIFT {
        for i in 0..p {
            s.as_mut_slice()[i * p + i] += PD_SHIFT;
        }
        min_eig = min_eigenvalue(&s.sub(&l)?);
        out.record_correction("pd_shift", PD_SHIFT);
    } else {
        out.record_correction("pd_shift", 0.0);
    }
    out.objective = {
        let k = s.sub(&l)?;
        if min_eig > 0.0 {
            let ch = crate::linalg::Cholesky::new(&k)?;
            -ch.log_det()
                + k.inner(&sigma)
                + spec.lambda * l1_penalty(&s, spec.penalize_diagonal)
                + spec.lambda * spec.gamma * l.trace()
        } else {
            f64::INFINITY
        }
    };
    out.report("consensus", consensus);
    out.report("psd", -min_eigenvalue(&l));
    out.report("pd", PD_SHIFT - min_eig);
    out.push_var("S", s);
    out.push_var("L", l);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::{glasso_solve, GlassoSpec, Status};

    #[test]
    fn identity_instance() {
        let spec = LvglassoSpec::new(DenseMatrix::identity(4), 0.1, 2.0);
        let res = lvglasso_solve(&spec, &SolverConfig::default()).unwrap();
        assert_eq!(res.status, Status::Converged);
        assert!(res.var("S").sub(&DenseMatrix::identity(4)).unwrap().max_abs() < 1e-5);
        assert!(res.var("L").max_abs() < 1e-8);
    }

    #[test]
    fn large_gamma_is_glasso() {
        let sigma = DenseMatrix::from_rows(&[vec![1.0, 0.4, 0.1], vec![0.4, 1.2, 0.3], vec![0.1, 0.3, 0.9]]).unwrap();
        let cfg = SolverConfig::tight();
        let lv = lvglasso_solve(&LvglassoSpec::new(sigma.clone(), 0.05, 1e6), &cfg).unwrap();
        let gl = glasso_solve(&GlassoSpec::new(sigma, 0.05), &cfg).unwrap();
        assert_eq!(lv.var("L").frobenius_norm(), 0.0);
        assert!(lv.var("S").sub(gl.var("S")).unwrap().max_abs() < 1e-6);
    }
}
