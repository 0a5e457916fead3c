//! Does the sparse-plus-low-rank estimator lose anything against the
//! graphical lasso when there are no hidden variables, and what does it gain
//! when there are? Both estimators are tuned over a grid with oracle access
//! to the true support.

use super::svg::{LinePlot, Series};
use super::{csv_bytes, fmt_num, median, offdiag_f1, par_map, ZERO_TOL_REL};
use crate::error::{Error, Result};
use crate::linalg::numerical_rank;
use crate::solvers::{glasso_solve, lvglasso_solve, GlassoSpec, LvglassoSpec, SolverConfig};
use crate::synth::{gen_latent_model, sample_empirical_cov, Prng};

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptivityConfig {
    pub p: usize,
    pub degree: usize,
    pub strength: f64,
    /// Must contain 0.
    pub h_values: Vec<usize>,
    pub n_values: Vec<usize>,
    /// Shared by both estimators.
    pub lambdas: Vec<f64>,
    /// Latent-variable estimator only; a very large value reproduces the
    /// graphical lasso.
    pub gammas: Vec<f64>,
    pub trials: usize,
    pub base_seed: u64,
    pub solver: SolverConfig,
}

impl AdaptivityConfig {
    pub const DEFAULT_LAMBDAS: [f64; 5] = [0.01, 0.02, 0.04, 0.08, 0.16];
    pub const DEFAULT_GAMMAS: [f64; 6] = [2.0, 2.83, 4.0, 5.66, 8.0, 1e6];

    pub fn new(
        p: usize,
        degree: usize,
        h_values: Vec<usize>,
        n_values: Vec<usize>,
        trials: usize,
        base_seed: u64,
    ) -> Self {
        Self {
            p,
            degree,
            strength: 0.3,
            h_values,
            n_values,
            lambdas: Self::DEFAULT_LAMBDAS.to_vec(),
            gammas: Self::DEFAULT_GAMMAS.to_vec(),
            trials,
            base_seed,
            solver: SolverConfig { eps_abs: 1e-9, eps_rel: 1e-8, max_iters: 5000, ..SolverConfig::default() },
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.h_values.contains(&0) {
            return Err(Error::InvalidShape("hidden-variable counts must include 0".into()));
        }
        if self.n_values.is_empty() || self.trials == 0 || self.lambdas.is_empty() || self.gammas.is_empty() {
            return Err(Error::InvalidShape("empty adaptivity grid".into()));
        }
        if self.n_values.contains(&0) {
            return Err(Error::InvalidParameter("sample counts must be positive".into()));
        }
        if self.lambdas.iter().chain(&self.gammas).any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidParameter("grid values must be positive".into()));
        }
        self.solver.validate()
    }

    fn cells(&self) -> Vec<(usize, usize)> {
        self.h_values.iter().flat_map(|&h| self.n_values.iter().map(move |&n| (h, n))).collect()
    }
}

/// One estimator fit inside one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptivityTrial {
    pub h: usize,
    pub n: usize,
    pub trial: usize,
    pub lambda: f64,
    /// `None` for the graphical lasso.
    pub gamma: Option<f64>,
    pub f1: f64,
    pub rank_l: usize,
    pub l_norm: f64,
    pub status: String,
    pub max_violation: f64,
    pub trend_breaks: usize,
}

/// Best-over-grid summary for one `(h, n)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptivityRow {
    pub h: usize,
    pub n: usize,
    pub glasso_best_f1: f64,
    pub glasso_best_lambda: f64,
    pub lvglasso_best_f1: f64,
    pub lvglasso_best_lambda: f64,
    pub lvglasso_best_gamma: f64,
    pub rank_median: f64,
    pub rank_min: usize,
    pub rank_max: usize,
    /// Largest `‖L̂‖_F` over all fits at the largest `γ` in the grid.
    pub degenerate_l_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptivityReport {
    pub config: AdaptivityConfig,
    pub trials: Vec<AdaptivityTrial>,
    pub rows: Vec<AdaptivityRow>,
}

fn run_one(cfg: &AdaptivityConfig, h: usize, n: usize, trial: usize, rng: &mut Prng) -> Result<Vec<AdaptivityTrial>> {
    let model = gen_latent_model(cfg.p, h, cfg.degree, cfg.strength, rng)?;
    let sigma = sample_empirical_cov(&model.sigma_obs, n, rng)?;
    let zero_tol = ZERO_TOL_REL * model.s_star.max_abs();
    let mut out = Vec::with_capacity(cfg.lambdas.len() * (1 + cfg.gammas.len()));
    for &lambda in &cfg.lambdas {
        let res = glasso_solve(&GlassoSpec::new(sigma.clone(), lambda), &cfg.solver)?;
        out.push(AdaptivityTrial {
            h,
            n,
            trial,
            lambda,
            gamma: None,
            f1: offdiag_f1(res.var("S"), &model.s_star, zero_tol),
            rank_l: 0,
            l_norm: 0.0,
            status: res.status.to_string(),
            max_violation: res.max_violation(),
            trend_breaks: res.residual_trend_breaks(),
        });
        for &gamma in &cfg.gammas {
            let res = lvglasso_solve(&LvglassoSpec::new(sigma.clone(), lambda, gamma), &cfg.solver)?;
            let l = res.var("L");
            let rank_l = if l.max_abs() == 0.0 { 0 } else { numerical_rank(l, ZERO_TOL_REL) };
            out.push(AdaptivityTrial {
                h,
                n,
                trial,
                lambda,
                gamma: Some(gamma),
                f1: offdiag_f1(res.var("S"), &model.s_star, zero_tol),
                rank_l,
                l_norm: l.frobenius_norm(),
                status: res.status.to_string(),
                max_violation: res.max_violation(),
                trend_breaks: res.residual_trend_breaks(),
            });
        }
    }
    Ok(out)
}

/// Grid point with the highest mean F1 across trials; earliest wins ties.
fn best<'a>(fits: &[&'a AdaptivityTrial], trials: usize) -> (f64, &'a AdaptivityTrial) {
    let mut best: Option<(f64, &AdaptivityTrial)> = None;
    let per_point = fits.len() / trials;
    for k in 0..per_point {
        let mean = (0..trials).map(|t| fits[t * per_point + k].f1).sum::<f64>() / trials as f64;
        if best.is_none_or(|(b, _)| mean > b) {
            best = Some((mean, fits[k]));
        }
    }
    best.expect("nonempty grid")
}

pub fn run_adaptivity(cfg: &AdaptivityConfig) -> Result<AdaptivityReport> {
    cfg.validate()?;
    let cells = cfg.cells();
    let results = par_map(cells.len() * cfg.trials, |job| {
        let (c, t) = (job / cfg.trials, job % cfg.trials);
        let (h, n) = cells[c];
        let mut rng = Prng::derive(cfg.base_seed, &[c as u64, t as u64]);
        run_one(cfg, h, n, t, &mut rng)
    });
    let mut trials = Vec::new();
    for r in results {
        trials.extend(r?);
    }
    let gamma_max = cfg.gammas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let rows = cells
        .iter()
        .map(|&(h, n)| {
            let in_cell: Vec<&AdaptivityTrial> = trials.iter().filter(|f| f.h == h && f.n == n).collect();
            let gl: Vec<&AdaptivityTrial> = in_cell.iter().copied().filter(|f| f.gamma.is_none()).collect();
            let lv: Vec<&AdaptivityTrial> = in_cell.iter().copied().filter(|f| f.gamma.is_some()).collect();
            let (gf1, gbest) = best(&gl, cfg.trials);
            let (lf1, lbest) = best(&lv, cfg.trials);
            let at_best: Vec<&AdaptivityTrial> =
                lv.iter().copied().filter(|f| f.lambda == lbest.lambda && f.gamma == lbest.gamma).collect();
            let mut ranks: Vec<f64> = at_best.iter().map(|f| f.rank_l as f64).collect();
            AdaptivityRow {
                h,
                n,
                glasso_best_f1: gf1,
                glasso_best_lambda: gbest.lambda,
                lvglasso_best_f1: lf1,
                lvglasso_best_lambda: lbest.lambda,
                lvglasso_best_gamma: lbest.gamma.unwrap_or(f64::NAN),
                rank_median: median(&mut ranks),
                rank_min: at_best.iter().map(|f| f.rank_l).min().unwrap_or(0),
                rank_max: at_best.iter().map(|f| f.rank_l).max().unwrap_or(0),
                degenerate_l_norm: lv
                    .iter()
                    .filter(|f| f.gamma == Some(gamma_max))
                    .map(|f| f.l_norm)
                    .fold(0.0, f64::max),
            }
        })
        .collect();
    Ok(AdaptivityReport { config: cfg.clone(), trials, rows })
}

impl AdaptivityReport {
    /// `h,n,trial,method,lambda,gamma,f1,rank_l,l_norm,status,max_violation,trend_breaks`; `gamma` is
    /// empty for the graphical lasso.
    pub fn trials_csv(&self) -> Vec<u8> {
        let rows: Vec<Vec<String>> = self
            .trials
            .iter()
            .map(|f| {
                vec![
                    f.h.to_string(),
                    f.n.to_string(),
                    f.trial.to_string(),
                    if f.gamma.is_some() { "lvglasso" } else { "glasso" }.to_string(),
                    fmt_num(f.lambda),
                    f.gamma.map(fmt_num).unwrap_or_default(),
                    fmt_num(f.f1),
                    f.rank_l.to_string(),
                    fmt_num(f.l_norm),
                    f.status.clone(),
                    fmt_num(f.max_violation),
                    f.trend_breaks.to_string(),
                ]
            })
            .collect();
        csv_bytes(
            &[
                "h",
                "n",
                "trial",
                "method",
                "lambda",
                "gamma",
                "f1",
                "rank_l",
                "l_norm",
                "status",
                "max_violation",
                "trend_breaks",
            ],
            &rows,
        )
    }

    /// One row per `(h, n)` cell.
    pub fn summary_csv(&self) -> Vec<u8> {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.h.to_string(),
                    r.n.to_string(),
                    fmt_num(r.glasso_best_f1),
                    fmt_num(r.glasso_best_lambda),
                    fmt_num(r.lvglasso_best_f1),
                    fmt_num(r.lvglasso_best_lambda),
                    fmt_num(r.lvglasso_best_gamma),
                    fmt_num(r.rank_median),
                    r.rank_min.to_string(),
                    r.rank_max.to_string(),
                    fmt_num(r.degenerate_l_norm),
                ]
            })
            .collect();
        csv_bytes(
            &[
                "h",
                "n",
                "glasso_best_f1",
                "glasso_best_lambda",
                "lvglasso_best_f1",
                "lvglasso_best_lambda",
                "lvglasso_best_gamma",
                "rank_median",
                "rank_min",
                "rank_max",
                "degenerate_l_norm",
            ],
            &rows,
        )
    }

    /// Best F1 against sample size, one line per estimator and `h`.
    pub fn svg(&self) -> String {
        let mut series = Vec::new();
        for &h in &self.config.h_values {
            let rows: Vec<&AdaptivityRow> = self.rows.iter().filter(|r| r.h == h).collect();
            series.push(Series {
                label: format!("glasso h={h}"),
                points: rows.iter().map(|r| (r.n as f64, r.glasso_best_f1)).collect(),
            });
            series.push(Series {
                label: format!("lvglasso h={h}"),
                points: rows.iter().map(|r| (r.n as f64, r.lvglasso_best_f1)).collect(),
            });
        }
        LinePlot { title: "best-over-grid support F1".into(), x_label: "samples".into(), y_label: "F1".into(), series }
            .render()
    }
}
