//! Two-block ADMM driver shared by every splitting.
//!
//! Each problem is written as `min f(x) + g(z)` subject to `Ax + Bz = c` with
//! a scaled dual `u`. The driver owns the penalty schedule, stopping rule,
//! divergence guard and iteration history; problems own their variables.

use super::{SolverConfig, Status};

/// Norms reported by a splitting after its dual update.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Residuals {
    /// `‖Ax + Bz − c‖`.
    pub primal: f64,
    /// `‖AᵀB(z − z_prev)‖`; multiplied by ρ for the dual residual.
    pub dual_change: f64,
    pub ax_norm: f64,
    pub bz_norm: f64,
    pub c_norm: f64,
    /// `‖Aᵀu‖` of the scaled dual; multiplied by ρ for the dual threshold.
    pub dual_norm: f64,
}

pub(crate) trait Splitting {
    /// Length of the constraint vector (`c`).
    fn primal_dim(&self) -> usize;
    /// Length of `x`.
    fn dual_dim(&self) -> usize;
    fn update_x(&mut self, rho: f64);
    fn update_z(&mut self, rho: f64);
    /// `u ← u + Ax + Bz − c` and report the residual norms.
    fn update_dual(&mut self) -> Residuals;
    /// Multiplies the scaled dual by `factor` (after a penalty change).
    fn scale_dual(&mut self, factor: f64);
    /// Objective at the current block iterates.
    fn objective(&self) -> f64;
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Trace {
    pub objective: Vec<f64>,
    pub r_primal: Vec<f64>,
    pub r_dual: Vec<f64>,
    pub eps_primal: Vec<f64>,
    pub eps_dual: Vec<f64>,
    pub rho: Vec<f64>,
    pub status: Option<Status>,
}

const RHO_MIN: f64 = 1e-4;
const RHO_MAX: f64 = 1e4;
const RHO_COOLDOWN: usize = 10;
const BALANCE_RATIO: f64 = 10.0;
const DIVERGENCE_FACTOR: f64 = 1e6;

pub(crate) fn run<S: Splitting>(problem: &mut S, cfg: &SolverConfig) -> Trace {
    let mut trace = Trace::default();
    let mut rho = cfg.rho.clamp(RHO_MIN, RHO_MAX);
    let mut last_change = 0usize;
    let mut baseline: Option<f64> = None;
    let sqrt_p = (problem.primal_dim() as f64).sqrt();
    let sqrt_n = (problem.dual_dim() as f64).sqrt();
    let mut status = Status::MaxIters;

    for it in 1..=cfg.max_iters {
        problem.update_x(rho);
        problem.update_z(rho);
        let res = problem.update_dual();
        let r = res.primal;
        let s = rho * res.dual_change;
        let eps_pri = sqrt_p * cfg.eps_abs + cfg.eps_rel * res.ax_norm.max(res.bz_norm).max(res.c_norm);
        let eps_dual = sqrt_n * cfg.eps_abs + cfg.eps_rel * rho * res.dual_norm;
        let obj = problem.objective();
        trace.objective.push(obj);
        trace.r_primal.push(r);
        trace.r_dual.push(s);
        trace.eps_primal.push(eps_pri);
        trace.eps_dual.push(eps_dual);
        trace.rho.push(rho);

        if !(r.is_finite() && s.is_finite() && obj.is_finite()) {
            status = Status::Diverged;
            break;
        }
        let worst = r.max(s);
        let base = *baseline.get_or_insert(worst.max(eps_pri).max(eps_dual).max(1e-12));
        if worst > DIVERGENCE_FACTOR * base {
            status = Status::Diverged;
            break;
        }
        if r <= eps_pri && s <= eps_dual {
            status = Status::Converged;
            break;
        }
        if cfg.adaptive_rho && it - last_change >= RHO_COOLDOWN {
            if r > BALANCE_RATIO * s && rho < RHO_MAX {
                let next = (2.0 * rho).min(RHO_MAX);
                problem.scale_dual(rho / next);
                rho = next;
                last_change = it;
            } else if s > BALANCE_RATIO * r && rho > RHO_MIN {
                let next = (0.5 * rho).max(RHO_MIN);
                problem.scale_dual(rho / next);
                rho = next;
                last_change = it;
            }
        }
    }
    trace.status = Some(status);
    trace
}

/// `sqrt(Σ ‖mᵢ‖_F²)`.
pub(crate) fn stacked_norm(parts: &[&crate::DenseMatrix]) -> f64 {
    parts.iter().map(|m| m.as_slice().iter().map(|v| v * v).sum::<f64>()).sum::<f64>().sqrt()
}

pub(crate) fn diff_norm_sq(a: &crate::DenseMatrix, b: &crate::DenseMatrix) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn vec_norm_sq(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum()
}
