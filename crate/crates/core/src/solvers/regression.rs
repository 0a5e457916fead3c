//! Robust regression: `min ‖b‖₁ + λ‖e‖₁` subject to `Xb + e = y`.
//!
//! Block one soft-thresholds `(b, e)`; block two projects a copy onto the
//! affine set, using a Cholesky factor of `I + XXᵀ` computed once.

use std::collections::VecDeque;

use super::admm::{self, Residuals, Splitting};
use super::{check_positive, SolveResult, SolverConfig};
use crate::error::{Error, Result};
use crate::linalg::Cholesky;
use crate::matrix::DenseMatrix;
use crate::prox::shrink;

#[derive(Debug, Clone)]
pub struct RobustRegressionSpec {
    pub x: DenseMatrix,
    pub y: Vec<f64>,
    pub lambda: f64,
}

struct Regression<'a> {
    x: &'a DenseMatrix,
    xt: DenseMatrix,
    y: &'a [f64],
    lambda: f64,
    chol: Cholesky,
    b: Vec<f64>,
    e: Vec<f64>,
    bt: Vec<f64>,
    et: Vec<f64>,
    bt_prev: Vec<f64>,
    et_prev: Vec<f64>,
    ub: Vec<f64>,
    ue: Vec<f64>,
    /// `(objective, b)` for the most recent iterates.
    recent: VecDeque<(f64, Vec<f64>)>,
}

/// Iterates kept for the final pick.
const POCKET: usize = 50;

fn norm_sq(v: &[f64]) -> f64 {
    admm::vec_norm_sq(v)
}

impl Splitting for Regression<'_> {
    fn primal_dim(&self) -> usize {
        self.b.len() + self.e.len()
    }

    fn dual_dim(&self) -> usize {
        self.b.len() + self.e.len()
    }

    fn update_x(&mut self, rho: f64) {
        for ((b, t), u) in self.b.iter_mut().zip(&self.bt).zip(&self.ub) {
            *b = shrink(t - u, 1.0 / rho);
        }
        for ((e, t), u) in self.e.iter_mut().zip(&self.et).zip(&self.ue) {
            *e = shrink(t - u, self.lambda / rho);
        }
    }

    fn update_z(&mut self, _rho: f64) {
        std::mem::swap(&mut self.bt, &mut self.bt_prev);
        std::mem::swap(&mut self.et, &mut self.et_prev);
        let c: Vec<f64> = self.b.iter().zip(&self.ub).map(|(a, u)| a + u).collect();
        let d: Vec<f64> = self.e.iter().zip(&self.ue).map(|(a, u)| a + u).collect();
        let xc = self.x.matvec(&c).expect("shapes checked");
        let rhs: Vec<f64> = xc.iter().zip(&d).zip(self.y).map(|((a, b), y)| a + b - y).collect();
        let nu = self.chol.solve(&rhs);
        let xtnu = self.xt.matvec(&nu).expect("shapes checked");
        self.bt = c.iter().zip(&xtnu).map(|(a, b)| a - b).collect();
        self.et = d.iter().zip(&nu).map(|(a, b)| a - b).collect();
    }

    fn update_dual(&mut self) -> Residuals {
        let mut primal = 0.0;
        for ((u, a), b) in self.ub.iter_mut().zip(&self.b).zip(&self.bt) {
            *u += a - b;
            primal += (a - b) * (a - b);
        }
        for ((u, a), b) in self.ue.iter_mut().zip(&self.e).zip(&self.et) {
            *u += a - b;
            primal += (a - b) * (a - b);
        }
        if self.recent.len() == POCKET {
            self.recent.pop_front();
        }
        self.recent.push_back((regression_objective(self.x, self.y, &self.b, self.lambda), self.b.clone()));
        let change: f64 = self
            .bt
            .iter()
            .zip(&self.bt_prev)
            .chain(self.et.iter().zip(&self.et_prev))
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        Residuals {
            primal: primal.sqrt(),
            dual_change: change.sqrt(),
            ax_norm: (norm_sq(&self.b) + norm_sq(&self.e)).sqrt(),
            bz_norm: (norm_sq(&self.bt) + norm_sq(&self.et)).sqrt(),
            c_norm: 0.0,
            dual_norm: (norm_sq(&self.ub) + norm_sq(&self.ue)).sqrt(),
        }
    }

    fn scale_dual(&mut self, factor: f64) {
        self.ub.iter_mut().chain(self.ue.iter_mut()).for_each(|u| *u *= factor);
    }

    /// Objective at the feasible point `(b, y − Xb)`.
    fn objective(&self) -> f64 {
        regression_objective(self.x, self.y, &self.b, self.lambda)
    }
}

fn regression_objective(x: &DenseMatrix, y: &[f64], b: &[f64], lambda: f64) -> f64 {
    let xb = x.matvec(b).expect("shapes checked");
    let e1: f64 = y.iter().zip(&xb).map(|(y, p)| (y - p).abs()).sum();
    b.iter().map(|v| v.abs()).sum::<f64>() + lambda * e1
}

pub fn robust_regression_solve(spec: &RobustRegressionSpec, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate()?;
    check_positive("lambda", spec.lambda)?;
    let (m, n) = spec.x.shape();
    if m == 0 || n == 0 {
        return Err(Error::InvalidShape(format!("{m}x{n} design matrix")));
    }
    if spec.y.len() != m {
        return Err(Error::DimensionMismatch(format!("y has {} entries, X has {m} rows", spec.y.len())));
    }
    spec.x.ensure_finite()?;
    if spec.y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotFinite);
    }
    let mut gram = spec.x.mul_tr(&spec.x);
    for i in 0..m {
        gram.as_mut_slice()[i * m + i] += 1.0;
    }
    let mut prob = Regression {
        x: &spec.x,
        xt: spec.x.transpose(),
        y: &spec.y,
        lambda: spec.lambda,
        chol: Cholesky::new(&gram.symmetrize())?,
        b: vec![0.0; n],
        e: vec![0.0; m],
        bt: vec![0.0; n],
        et: vec![0.0; m],
        bt_prev: vec![0.0; n],
        et_prev: vec![0.0; m],
        ub: vec![0.0; n],
        ue: vec![0.0; m],
        recent: VecDeque::with_capacity(POCKET),
    };
    let trace = admm::run(&mut prob, cfg);
    let mut out = SolveResult::from_trace("regression", trace);

    // every iterate maps to the feasible point (b, y − Xb); return the best
    // of the last few, which damps the residual wobble of the final steps
    let b =
        prob.recent.iter().min_by(|x, y| x.0.total_cmp(&y.0)).map(|(_, b)| b.clone()).unwrap_or_else(|| prob.b.clone());
    let xb = spec.x.matvec(&b)?;
    let e: Vec<f64> = spec.y.iter().zip(&xb).map(|(y, p)| y - p).collect();
    let shift = e.iter().zip(&prob.e).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    out.record_correction("e_reset", shift);
    let eq = spec.y.iter().zip(&xb).zip(&e).map(|((y, p), e)| (y - p - e).abs()).fold(0.0, f64::max);
    let ymax = spec.y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    out.report("equality", eq / ymax.max(1.0));
    out.objective = regression_objective(&spec.x, &spec.y, &b, spec.lambda);
    out.push_var("b", DenseMatrix::column(&b));
    out.push_var("e", DenseMatrix::column(&e));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(lambda: f64, y: &[f64]) -> RobustRegressionSpec {
        RobustRegressionSpec { x: DenseMatrix::identity(y.len()), y: y.to_vec(), lambda }
    }

    #[test]
    fn identity_design_prefers_cheaper_side() {
        let y = [1.5, -0.3, 0.0, 2.0];
        let cfg = SolverConfig::tight();
        let res = robust_regression_solve(&spec(2.0, &y), &cfg).unwrap();
        for i in 0..4 {
            assert!((res.var("b")[(i, 0)] - y[i]).abs() < 1e-5);
            assert!(res.var("e")[(i, 0)].abs() < 1e-5);
        }
        let res = robust_regression_solve(&spec(0.5, &y), &cfg).unwrap();
        for i in 0..4 {
            assert!(res.var("b")[(i, 0)].abs() < 1e-5);
            assert!((res.var("e")[(i, 0)] - y[i]).abs() < 1e-5);
        }
    }

    #[test]
    fn shape_mismatch() {
        let s = RobustRegressionSpec { x: DenseMatrix::identity(3), y: vec![1.0; 2], lambda: 1.0 };
        assert!(matches!(robust_regression_solve(&s, &SolverConfig::default()), Err(Error::DimensionMismatch(_))));
    }
}
