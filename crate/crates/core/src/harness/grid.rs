use std::fmt;
use std::str::FromStr;

use super::svg::{LinePlot, Series};
use super::{csv_bytes, fmt_num, offdiag_f1, par_map, score_recovery, RecoveryScore, SUCCESS_TOL, ZERO_TOL_REL};
use crate::error::{Error, Result};
use crate::linalg::numerical_rank;
use crate::mask::Mask;
use crate::matrix::DenseMatrix;
use crate::solvers::{
    glasso_solve, planted_clique_solve, rpca_solve, GlassoSpec, PlantedCliqueSpec, RpcaSpec, SolveResult, SolverConfig,
};
use crate::synth::{gen_latent_model, gen_lowrank_sparse, gen_planted_clique, sample_empirical_cov, Prng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Planted clique in `G(n, 1/2)`; success is exact set recovery.
    Clique,
    /// Uncorrupted low-rank matrix observed on a random subset of entries.
    Completion,
    /// Fully observed low-rank matrix with sparse gross corruption.
    Rpca,
    /// Sparse Gaussian graphical model without hidden variables; success is
    /// exact off-diagonal support recovery.
    Glasso,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Clique, Family::Completion, Family::Rpca, Family::Glasso];

    pub fn name(self) -> &'static str {
        match self {
            Family::Clique => "clique",
            Family::Completion => "completion",
            Family::Rpca => "rpca",
            Family::Glasso => "glasso",
        }
    }

    /// Parameters the family reads, with their defaults. `lambda` defaults
    /// depend on other parameters and are resolved per cell.
    pub fn parameters(self) -> &'static [(&'static str, f64)] {
        match self {
            Family::Clique => &[("n", 400.0), ("k", 20.0), ("lambda", f64::NAN)],
            Family::Completion => &[("n", 100.0), ("rank", 3.0), ("rate", 0.5), ("lambda", 1.0)],
            Family::Rpca => &[("n", 100.0), ("rank", 5.0), ("sparsity", 0.1), ("lambda", f64::NAN)],
            Family::Glasso => {
                &[("p", 10.0), ("degree", 2.0), ("samples", 1e5), ("strength", 0.3), ("lambda", f64::NAN)]
            }
        }
    }

    /// Solver settings used when the grid does not override them. The clique
    /// relaxation runs on 400×400 eigendecompositions, so it stops at a looser
    /// tolerance; its success criterion only needs the ordering of row sums.
    pub fn default_solver(self) -> SolverConfig {
        match self {
            Family::Clique => SolverConfig { max_iters: 200, eps_abs: 1e-6, eps_rel: 1e-4, ..SolverConfig::default() },
            Family::Completion => SolverConfig { max_iters: 1000, ..SolverConfig::default() },
            Family::Rpca | Family::Glasso => SolverConfig::default(),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(name: &str, values: &[f64]) -> Self {
        Self { name: name.to_string(), values: values.to_vec() }
    }
}

/// Grid definition. Cells are the Cartesian product of the axes with the
/// first axis varying slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub family: Family,
    pub axes: Vec<Axis>,
    /// Parameters held fixed across cells.
    pub fixed: Vec<(String, f64)>,
    pub trials: usize,
    pub base_seed: u64,
    /// Overrides [`Family::default_solver`].
    pub solver: Option<SolverConfig>,
}

impl GridSpec {
    pub fn new(family: Family, axes: Vec<Axis>, trials: usize, base_seed: u64) -> Self {
        Self { family, axes, fixed: Vec::new(), trials, base_seed, solver: None }
    }

    pub fn with_fixed(mut self, name: &str, value: f64) -> Self {
        self.fixed.push((name.to_string(), value));
        self
    }

    fn validate(&self) -> Result<()> {
        let known = self.family.parameters();
        let names = self.axes.iter().map(|a| a.name.as_str()).chain(self.fixed.iter().map(|(n, _)| n.as_str()));
        for name in names {
            if !known.iter().any(|(k, _)| *k == name) {
                return Err(Error::InvalidParameter(format!("`{name}` is not a {} parameter", self.family)));
            }
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.axes.iter().any(|a| a.values.is_empty()) {
            return Err(Error::InvalidParameter("grid axes must be nonempty".into()));
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    /// Axis values of cell `c`.
    pub fn cell_values(&self, c: usize) -> Vec<f64> {
        let mut rem = c;
        let mut out = vec![0.0; self.axes.len()];
        for (i, axis) in self.axes.iter().enumerate().rev() {
            out[i] = axis.values[rem % axis.values.len()];
            rem /= axis.values.len();
        }
        out
    }

    /// Full parameter set of cell `c` with defaults filled in.
    pub fn cell_params(&self, c: usize) -> Params {
        let mut p: Vec<(String, f64)> = self.family.parameters().iter().map(|(k, v)| (k.to_string(), *v)).collect();
        let set = |p: &mut Vec<(String, f64)>, k: &str, v: f64| {
            if let Some(slot) = p.iter_mut().find(|(name, _)| name == k) {
                slot.1 = v;
            }
        };
        for (k, v) in &self.fixed {
            set(&mut p, k, *v);
        }
        for (axis, v) in self.axes.iter().zip(self.cell_values(c)) {
            set(&mut p, &axis.name, v);
        }
        Params(p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Params(pub Vec<(String, f64)>);

impl Params {
    pub fn get(&self, name: &str) -> f64 {
        self.0.iter().find(|(k, _)| k == name).map(|(_, v)| *v).unwrap_or(f64::NAN)
    }

    fn count(&self, name: &str) -> Result<usize> {
        let v = self.get(name);
        if v.is_finite() && v >= 0.0 && v.fract() == 0.0 {
            Ok(v as usize)
        } else {
            Err(Error::InvalidParameter(format!("`{name}` must be a nonnegative integer, got {v}")))
        }
    }

    fn lambda_or(&self, default: f64) -> f64 {
        let v = self.get("lambda");
        if v.is_nan() {
            default
        } else {
            v
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub values: Vec<f64>,
    pub scores: Vec<RecoveryScore>,
    pub iterations: Vec<usize>,
    /// Largest relative constraint violation of each trial's solve.
    pub max_violation: Vec<f64>,
    /// Residual-trend breaks of each trial's solve.
    pub trend_breaks: Vec<usize>,
}

impl CellResult {
    pub fn successes(&self) -> usize {
        self.scores.iter().filter(|s| s.success).count()
    }

    pub fn success_rate(&self) -> f64 {
        self.successes() as f64 / self.scores.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentGrid {
    pub spec: GridSpec,
    pub cells: Vec<CellResult>,
}

struct TrialOutcome {
    score: RecoveryScore,
    iterations: usize,
    max_violation: f64,
    trend_breaks: usize,
}

fn outcome(score: RecoveryScore, res: &SolveResult) -> TrialOutcome {
    TrialOutcome {
        score,
        iterations: res.iterations(),
        max_violation: res.max_violation(),
        trend_breaks: res.residual_trend_breaks(),
    }
}

fn run_trial(family: Family, params: &Params, cfg: &SolverConfig, rng: &mut Prng) -> Result<TrialOutcome> {
    match family {
        Family::Clique => {
            let n = params.count("n")?;
            let k = params.count("k")?;
            let lambda = params.lambda_or(1.0 / (n as f64).sqrt());
            let inst = gen_planted_clique(n, k, rng)?;
            let spec = PlantedCliqueSpec { adjacency: inst.adjacency, k, lambda };
            let res = planted_clique_solve(&spec, cfg)?;
            let est = res.clique.clone().unwrap_or_default();
            let mut member = vec![false; n];
            inst.clique.iter().for_each(|&i| member[i] = true);
            let truth = DenseMatrix::from_fn(n, n, |i, j| if member[i] && member[j] { 1.0 } else { 0.0 });
            let x = res.var("X");
            let rel = x.sub(&truth)?.frobenius_norm() / truth.frobenius_norm();
            let mut est_mask = vec![false; n];
            est.iter().for_each(|&i| est_mask[i] = true);
            let score = RecoveryScore {
                rel_error_f: rel,
                support_f1: super::support_f1(&est_mask, &member),
                sign_consistency: est == inst.clique,
                rank_hat: numerical_rank(x, ZERO_TOL_REL),
                success: est == inst.clique,
            };
            Ok(outcome(score, &res))
        }
        Family::Completion | Family::Rpca => {
            let n = params.count("n")?;
            let r = params.count("rank")?;
            let (sparsity, rate, lambda) = if family == Family::Rpca {
                (params.get("sparsity"), 1.0, params.lambda_or(1.0 / (n as f64).sqrt()))
            } else {
                (0.0, params.get("rate"), params.lambda_or(1.0))
            };
            if !(rate > 0.0 && rate <= 1.0) {
                return Err(Error::InvalidRate(rate));
            }
            let inst = gen_lowrank_sparse(n, n, r, sparsity, rng)?;
            let mask = if rate >= 1.0 { Mask::full(n, n) } else { Mask::from_fn(n, n, |_, _| rng.bernoulli(rate)) };
            if mask.is_empty() {
                return Err(Error::EmptyMask);
            }
            let res = rpca_solve(&RpcaSpec::new(inst.m, mask, Some(lambda)), cfg)?;
            let zero_tol = ZERO_TOL_REL * inst.l0.max_abs();
            Ok(outcome(score_recovery(res.var("L"), &inst.l0, zero_tol, SUCCESS_TOL)?, &res))
        }
        Family::Glasso => {
            let p = params.count("p")?;
            let degree = params.count("degree")?;
            let samples = params.count("samples")?;
            let lambda = params.lambda_or(2.0 * ((p as f64).ln() / samples as f64).sqrt());
            let model = gen_latent_model(p, 0, degree, params.get("strength"), rng)?;
            let sigma = sample_empirical_cov(&model.sigma_obs, samples, rng)?;
            let res = glasso_solve(&GlassoSpec::new(sigma, lambda), cfg)?;
            let s = res.var("S");
            let zero_tol = ZERO_TOL_REL * model.s_star.max_abs();
            let mut score = score_recovery(s, &model.s_star, zero_tol, SUCCESS_TOL)?;
            score.support_f1 = offdiag_f1(s, &model.s_star, zero_tol);
            score.success = score.support_f1 == 1.0;
            Ok(outcome(score, &res))
        }
    }
}

/// Runs every cell and trial. Trial `t` of cell `c` draws from the sub-stream
/// `(base_seed, c, t)`, so results do not depend on scheduling.
pub fn run_phase_grid(spec: &GridSpec) -> Result<ExperimentGrid> {
    spec.validate()?;
    let cfg = spec.solver.clone().unwrap_or_else(|| spec.family.default_solver());
    cfg.validate()?;
    let cells = spec.cell_count();
    let params: Vec<Params> = (0..cells).map(|c| spec.cell_params(c)).collect();
    let outcomes = par_map(cells * spec.trials, |job| {
        let (c, t) = (job / spec.trials, job % spec.trials);
        let mut rng = Prng::derive(spec.base_seed, &[c as u64, t as u64]);
        run_trial(spec.family, &params[c], &cfg, &mut rng)
    });
    let mut out = Vec::with_capacity(cells);
    let mut it = outcomes.into_iter();
    for c in 0..cells {
        let mut cell = CellResult {
            values: spec.cell_values(c),
            scores: Vec::with_capacity(spec.trials),
            iterations: Vec::with_capacity(spec.trials),
            max_violation: Vec::with_capacity(spec.trials),
            trend_breaks: Vec::with_capacity(spec.trials),
        };
        for _ in 0..spec.trials {
            let o = it.next().expect("one outcome per job")?;
            cell.scores.push(o.score);
            cell.iterations.push(o.iterations);
            cell.max_violation.push(o.max_violation);
            cell.trend_breaks.push(o.trend_breaks);
        }
        out.push(cell);
    }
    Ok(ExperimentGrid { spec: spec.clone(), cells: out })
}

impl ExperimentGrid {
    /// Cell whose axis values equal `values`.
    pub fn cell(&self, values: &[f64]) -> Option<&CellResult> {
        self.cells.iter().find(|c| c.values == values)
    }

    pub const TRIAL_COLUMNS: [&'static str; 9] = [
        "rel_error",
        "support_f1",
        "sign_consistency",
        "rank_hat",
        "success",
        "iterations",
        "max_violation",
        "trend_breaks",
        "seed_path",
    ];

    /// One row per cell and trial: `family,cell,trial,<axes...>` followed by
    /// [`Self::TRIAL_COLUMNS`].
    pub fn trials_csv(&self) -> Vec<u8> {
        let mut header: Vec<&str> = vec!["family", "cell", "trial"];
        header.extend(self.spec.axes.iter().map(|a| a.name.as_str()));
        header.extend(Self::TRIAL_COLUMNS);
        let mut rows = Vec::new();
        for (c, cell) in self.cells.iter().enumerate() {
            for (t, s) in cell.scores.iter().enumerate() {
                let mut row = vec![self.spec.family.to_string(), c.to_string(), t.to_string()];
                row.extend(cell.values.iter().map(|&v| fmt_num(v)));
                row.extend([
                    fmt_num(s.rel_error_f),
                    fmt_num(s.support_f1),
                    u8::from(s.sign_consistency).to_string(),
                    s.rank_hat.to_string(),
                    u8::from(s.success).to_string(),
                    cell.iterations[t].to_string(),
                    fmt_num(cell.max_violation[t]),
                    cell.trend_breaks[t].to_string(),
                    format!("{}/{c}/{t}", self.spec.base_seed),
                ]);
                rows.push(row);
            }
        }
        csv_bytes(&header, &rows)
    }

    /// One aggregated row per cell:
    /// `family,cell,<axes...>,trials,successes,success_rate,mean_rel_error,mean_support_f1,median_rank`.
    pub fn cells_csv(&self) -> Vec<u8> {
        let mut header: Vec<&str> = vec!["family", "cell"];
        header.extend(self.spec.axes.iter().map(|a| a.name.as_str()));
        header.extend(["trials", "successes", "success_rate", "mean_rel_error", "mean_support_f1", "median_rank"]);
        let mut rows = Vec::new();
        for (c, cell) in self.cells.iter().enumerate() {
            let n = cell.scores.len() as f64;
            let mut ranks: Vec<f64> = cell.scores.iter().map(|s| s.rank_hat as f64).collect();
            let mut row = vec![self.spec.family.to_string(), c.to_string()];
            row.extend(cell.values.iter().map(|&v| fmt_num(v)));
            row.extend([
                cell.scores.len().to_string(),
                cell.successes().to_string(),
                fmt_num(cell.success_rate()),
                fmt_num(cell.scores.iter().map(|s| s.rel_error_f).sum::<f64>() / n),
                fmt_num(cell.scores.iter().map(|s| s.support_f1).sum::<f64>() / n),
                fmt_num(super::median(&mut ranks)),
            ]);
            rows.push(row);
        }
        csv_bytes(&header, &rows)
    }

    /// Success rate against the first axis, one line per combination of the
    /// remaining axes.
    pub fn svg(&self) -> String {
        let x_name = self.spec.axes.first().map(|a| a.name.clone()).unwrap_or_else(|| "cell".into());
        let mut series: Vec<Series> = Vec::new();
        for cell in &self.cells {
            let label = self
                .spec
                .axes
                .iter()
                .zip(&cell.values)
                .skip(1)
                .map(|(a, v)| format!("{}={}", a.name, fmt_num(*v)))
                .collect::<Vec<_>>()
                .join(", ");
            let x = cell.values.first().copied().unwrap_or(0.0);
            match series.iter_mut().find(|s| s.label == label) {
                Some(s) => s.points.push((x, cell.success_rate())),
                None => series.push(Series { label, points: vec![(x, cell.success_rate())] }),
            }
        }
        LinePlot {
            title: format!("{} success rate", self.spec.family),
            x_label: x_name,
            y_label: "success rate".into(),
            series,
        }
        .render()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_family() {
        assert_eq!("bogus".parse::<Family>().unwrap_err(), Error::UnknownFamily("bogus".into()));
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
    }

    #[test]
    fn cell_enumeration() {
        let spec =
            GridSpec::new(Family::Rpca, vec![Axis::new("n", &[10.0, 20.0]), Axis::new("rank", &[1.0, 2.0, 3.0])], 1, 0);
        assert_eq!(spec.cell_count(), 6);
        assert_eq!(spec.cell_values(0), vec![10.0, 1.0]);
        assert_eq!(spec.cell_values(4), vec![20.0, 2.0]);
        assert_eq!(spec.cell_params(5).get("rank"), 3.0);
        assert_eq!(spec.cell_params(5).get("sparsity"), 0.1);
    }

    #[test]
    fn rejects_unknown_axis() {
        let spec = GridSpec::new(Family::Clique, vec![Axis::new("gamma", &[1.0])], 1, 0);
        assert!(matches!(run_phase_grid(&spec), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn fully_observed_completion_is_exact() {
        let spec = GridSpec::new(Family::Completion, vec![Axis::new("rate", &[1.0])], 3, 5).with_fixed("n", 20.0);
        let grid = run_phase_grid(&spec).unwrap();
        assert_eq!(grid.cells[0].success_rate(), 1.0);
        assert!(grid.cells[0].scores.iter().all(|s| s.rel_error_f == 0.0));
    }
}
