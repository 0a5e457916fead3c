//! ADMM solvers, one splitting per convex program.

mod admm;
mod clique;
mod cs_lps;
mod glasso;
mod lvglasso;
mod regression;
mod rpca;

pub use clique::{clique_estimate, planted_clique_solve, PlantedCliqueSpec};
pub use cs_lps::{cs_lps_solve, CsLpsSpec, CsMode};
pub use glasso::{glasso_solve, GlassoSpec};
pub use lvglasso::{lvglasso_solve, LvglassoSpec, PD_SHIFT};
pub use regression::{robust_regression_solve, RobustRegressionSpec};
pub use rpca::{rpca_solve, RpcaSpec};

use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Initial ADMM penalty.
    pub rho: f64,
    pub max_iters: usize,
    pub eps_abs: f64,
    pub eps_rel: f64,
    /// Residual balancing: double/halve ρ when one residual exceeds the other
    /// tenfold, at most once every ten iterations.
    pub adaptive_rho: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { rho: 1.0, max_iters: 2000, eps_abs: 1e-7, eps_rel: 1e-5, adaptive_rho: true }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let ok =
            self.rho > 0.0 && self.rho.is_finite() && self.max_iters >= 1 && self.eps_abs > 0.0 && self.eps_rel > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid solver configuration {self:?}")))
        }
    }

    /// Same configuration with tighter tolerances and a larger iteration cap.
    pub fn tight() -> Self {
        Self { max_iters: 20_000, eps_abs: 1e-10, eps_rel: 1e-9, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    MaxIters,
    Diverged,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Converged => "converged",
            Status::MaxIters => "max_iters",
            Status::Diverged => "diverged",
        })
    }
}

impl std::str::FromStr for Status {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "converged" => Ok(Status::Converged),
            "max_iters" => Ok(Status::MaxIters),
            "diverged" => Ok(Status::Diverged),
            other => Err(Error::Parse(format!("unknown status `{other}`"))),
        }
    }
}

/// One of the six convex programs with its data and regularization.
#[derive(Debug, Clone)]
pub enum ProblemSpec {
    Glasso(GlassoSpec),
    Lvglasso(LvglassoSpec),
    Rpca(RpcaSpec),
    RobustRegression(RobustRegressionSpec),
    CsLps(CsLpsSpec),
    PlantedClique(PlantedCliqueSpec),
}

impl ProblemSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ProblemSpec::Glasso(_) => "glasso",
            ProblemSpec::Lvglasso(_) => "lvglasso",
            ProblemSpec::Rpca(_) => "rpca",
            ProblemSpec::RobustRegression(_) => "regression",
            ProblemSpec::CsLps(_) => "cslps",
            ProblemSpec::PlantedClique(_) => "clique",
        }
    }
}

/// Dispatches to the solver for `spec`.
pub fn solve(spec: &ProblemSpec, cfg: &SolverConfig) -> Result<SolveResult> {
    match spec {
        ProblemSpec::Glasso(s) => glasso_solve(s, cfg),
        ProblemSpec::Lvglasso(s) => lvglasso_solve(s, cfg),
        ProblemSpec::Rpca(s) => rpca_solve(s, cfg),
        ProblemSpec::RobustRegression(s) => robust_regression_solve(s, cfg),
        ProblemSpec::CsLps(s) => cs_lps_solve(s, cfg),
        ProblemSpec::PlantedClique(s) => planted_clique_solve(s, cfg),
    }
}

/// Final iterates, per-iteration history and constraint violations.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub problem: String,
    /// Primal variables by name, e.g. `S`, `L`, `b`, `e`, `X`.
    pub variables: Vec<(String, DenseMatrix)>,
    /// Objective at the returned point.
    pub objective: f64,
    pub status: Status,
    pub objective_history: Vec<f64>,
    pub primal_residuals: Vec<f64>,
    pub dual_residuals: Vec<f64>,
    pub primal_thresholds: Vec<f64>,
    pub dual_thresholds: Vec<f64>,
    pub rho_history: Vec<f64>,
    /// Nonnegative violation per named constraint at the returned point.
    pub constraint_report: Vec<(String, f64)>,
    /// Size of each post-processing step applied to the final iterate
    /// (feasibility projections, definiteness shifts).
    pub corrections: Vec<(String, f64)>,
    /// Planted-clique estimate, when applicable.
    pub clique: Option<Vec<usize>>,
}

impl SolveResult {
    fn from_trace(problem: &str, trace: admm::Trace) -> Self {
        Self {
            problem: problem.to_string(),
            variables: Vec::new(),
            objective: f64::NAN,
            status: trace.status.unwrap_or(Status::MaxIters),
            objective_history: trace.objective,
            primal_residuals: trace.r_primal,
            dual_residuals: trace.r_dual,
            primal_thresholds: trace.eps_primal,
            dual_thresholds: trace.eps_dual,
            rho_history: trace.rho,
            constraint_report: Vec::new(),
            corrections: Vec::new(),
            clique: None,
        }
    }

    pub fn iterations(&self) -> usize {
        self.objective_history.len()
    }

    pub fn get(&self, name: &str) -> Option<&DenseMatrix> {
        self.variables.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }

    /// Panicking accessor for variables every solver of a kind returns.
    pub fn var(&self, name: &str) -> &DenseMatrix {
        self.get(name).unwrap_or_else(|| panic!("no variable `{name}` in {} result", self.problem))
    }

    pub fn constraint(&self, name: &str) -> Option<f64> {
        self.constraint_report.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn correction(&self, name: &str) -> Option<f64> {
        self.corrections.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn max_violation(&self) -> f64 {
        self.constraint_report.iter().map(|(_, v)| *v).fold(0.0, f64::max)
    }

    /// Number of `t ≥ 10` (1-based, with `10t` within the run) where
    /// `max(primal, dual)` at iteration `10t` exceeds its value at `t`.
    pub fn residual_trend_breaks(&self) -> usize {
        let r = |i: usize| self.primal_residuals[i - 1].max(self.dual_residuals[i - 1]);
        (10..).take_while(|t| 10 * t <= self.iterations()).filter(|&t| r(10 * t) > r(t)).count()
    }

    fn push_var(&mut self, name: &str, m: DenseMatrix) {
        self.variables.push((name.to_string(), m));
    }

    fn report(&mut self, name: &str, value: f64) {
        self.constraint_report.push((name.to_string(), value.max(0.0)));
    }

    fn record_correction(&mut self, name: &str, value: f64) {
        self.corrections.push((name.to_string(), value));
    }
}

/// One row of the per-iteration diagnostics table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRow {
    pub iter: usize,
    pub objective: f64,
    pub r_primal: f64,
    pub r_dual: f64,
    pub rho: f64,
}

pub const DIAGNOSTICS_HEADER: &str = "iter,objective,r_primal,r_dual,rho";

pub fn admm_step_report(result: &SolveResult) -> Vec<DiagnosticsRow> {
    (0..result.iterations())
        .map(|i| DiagnosticsRow {
            iter: i + 1,
            objective: result.objective_history[i],
            r_primal: result.primal_residuals[i],
            r_dual: result.dual_residuals[i],
            rho: result.rho_history[i],
        })
        .collect()
}

/// Diagnostics as CSV with header `iter,objective,r_primal,r_dual,rho`.
pub fn diagnostics_csv(rows: &[DiagnosticsRow]) -> String {
    let mut out = String::from(DIAGNOSTICS_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{},{:e},{:e},{:e},{:e}\n", r.iter, r.objective, r.r_primal, r.r_dual, r.rho));
    }
    out
}

pub(crate) fn ensure_psd_input(sigma: &DenseMatrix) -> Result<DenseMatrix> {
    let sigma = sigma.checked_symmetric()?;
    let min = crate::linalg::min_eigenvalue(&sigma);
    if min < -1e-10 * sigma.max_abs().max(1.0) {
        return Err(Error::NotPsd(min));
    }
    Ok(sigma)
}

pub(crate) fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

pub(crate) fn check_nonnegative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be nonnegative, got {v}")))
    }
}
