//! Subcommand bodies. Each one builds its artifacts in memory; files are
//! written together at the end, followed by the manifest.

use std::path::{Path, PathBuf};

use lslab::harness::{run_adaptivity, run_phase_grid, AdaptivityConfig, Axis, Family, GridSpec};
use lslab::io::{config_to_text, fmt_f64, Bundle};
use lslab::linalg::{dct_matrix, haar_matrix};
use lslab::solvers::{
    admm_step_report, diagnostics_csv, solve, CsLpsSpec, CsMode, GlassoSpec, LvglassoSpec, PlantedCliqueSpec,
    ProblemSpec, RobustRegressionSpec, RpcaSpec, SolveResult, SolverConfig,
};
use lslab::synth::{
    gen_background_innovation, gen_latent_model, gen_lowrank_sparse, gen_planted_clique, gen_sampling_operator,
    sample_empirical_cov, Prng, SamplingOperator, PRNG_ID,
};
use lslab::{DenseMatrix, Mask};

use crate::args::{RunConfig, Subcommand};
use crate::error::CliError;

/// Name of the run manifest inside the output directory.
pub const MANIFEST: &str = "manifest";

type Artifacts = Vec<(String, Vec<u8>)>;

/// Runs the subcommand and returns the paths written, manifest last.
pub fn run(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let module = |source| CliError::Module { subcommand: cfg.subcommand.name(), source };
    let artifacts = match cfg.subcommand {
        Subcommand::Gen => gen(cfg),
        Subcommand::Solve => solve_cmd(cfg),
        Subcommand::Phase => phase(cfg),
        Subcommand::Adaptivity => adaptivity(cfg),
        Subcommand::Clique => clique(cfg),
    }
    .map_err(|e| match e {
        Failure::Lib(source) => module(source),
        Failure::Cli(e) => e,
    })?;

    std::fs::create_dir_all(&cfg.out).map_err(|source| CliError::Io { path: cfg.out.clone(), source })?;
    let mut written = Vec::with_capacity(artifacts.len() + 1);
    for (name, bytes) in &artifacts {
        let path = cfg.out.join(name);
        write(&path, bytes)?;
        written.push(path);
    }
    let path = cfg.out.join(MANIFEST);
    write(&path, manifest(cfg, &artifacts).as_bytes())?;
    written.push(path);
    Ok(written)
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn manifest(cfg: &RunConfig, artifacts: &Artifacts) -> String {
    let mut entries: Vec<(String, String)> = vec![
        ("tool".into(), "lslab".into()),
        ("version".into(), env!("CARGO_PKG_VERSION").into()),
        ("subcommand".into(), cfg.subcommand.name().into()),
        ("seed".into(), cfg.seed.to_string()),
        ("prng".into(), PRNG_ID.into()),
        ("timestamp".into(), chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)),
    ];
    entries.extend(cfg.entries().into_iter().map(|(k, v)| (format!("config.{k}"), v)));
    entries.push(("outputs".into(), artifacts.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>().join(",")));
    config_to_text(&entries)
}

enum Failure {
    Lib(lslab::Error),
    Cli(CliError),
}

impl From<lslab::Error> for Failure {
    fn from(e: lslab::Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<CliError> for Failure {
    fn from(e: CliError) -> Self {
        Failure::Cli(e)
    }
}

fn solver_config(cfg: &RunConfig, base: SolverConfig) -> SolverConfig {
    SolverConfig {
        rho: cfg.float_or("rho", base.rho),
        max_iters: cfg.int_or("max_iters", base.max_iters),
        eps_abs: cfg.float_or("eps_abs", base.eps_abs),
        eps_rel: cfg.float_or("eps_rel", base.eps_rel),
        ..base
    }
}

fn header(cfg: &RunConfig, bundle: Bundle, keys: &[(&str, String)]) -> Bundle {
    let mut b = bundle.with_header("seed", cfg.seed).with_header("prng", PRNG_ID);
    for (k, v) in keys {
        b = b.with_header(k, v);
    }
    b
}

fn index_column(idx: &[usize]) -> DenseMatrix {
    DenseMatrix::column(&idx.iter().map(|&i| i as f64).collect::<Vec<_>>())
}

fn gen(cfg: &RunConfig) -> Result<Artifacts, Failure> {
    let mut rng = Prng::new(cfg.seed);
    let family = cfg.text("family").expect("required");
    let bundle = match family {
        "latent" => {
            let (p, h, degree) = (cfg.int_or("p", 20), cfg.int_or("h", 2), cfg.int_or("degree", 3));
            let strength = cfg.float_or("strength", 0.3);
            let model = gen_latent_model(p, h, degree, strength, &mut rng)?;
            let mut keys = vec![
                ("generator", "latent".to_string()),
                ("p", p.to_string()),
                ("h", h.to_string()),
                ("degree", degree.to_string()),
                ("strength", fmt_f64(strength)),
            ];
            let mut b = Bundle::new();
            match cfg.int("samples") {
                Some(n) => {
                    keys.push(("samples", n.to_string()));
                    b = b
                        .with_matrix("sigma", sample_empirical_cov(&model.sigma_obs, n, &mut rng)?)
                        .with_matrix("sigma_population", model.sigma_obs);
                }
                None => b = b.with_matrix("sigma", model.sigma_obs),
            }
            header(cfg, b.with_matrix("s_star", model.s_star).with_matrix("l_star", model.l_star), &keys)
        }
        "lowrank" => {
            let (n1, n2, rank) = (cfg.int_or("n1", 50), cfg.int_or("n2", 50), cfg.int_or("rank", 2));
            let (sparsity, rate) = (cfg.float_or("sparsity", 0.05), cfg.float_or("rate", 1.0));
            if !(rate > 0.0 && rate <= 1.0) {
                return Err(lslab::Error::InvalidRate(rate).into());
            }
            let inst = gen_lowrank_sparse(n1, n2, rank, sparsity, &mut rng)?;
            let mask = if rate >= 1.0 { inst.mask } else { Mask::from_fn(n1, n2, |_, _| rng.bernoulli(rate)) };
            let keys = [
                ("generator", "lowrank".to_string()),
                ("n1", n1.to_string()),
                ("n2", n2.to_string()),
                ("rank", rank.to_string()),
                ("sparsity", fmt_f64(sparsity)),
                ("rate", fmt_f64(rate)),
            ];
            let b = Bundle::new()
                .with_matrix("m", mask.apply(&inst.m))
                .with_matrix("mask", mask.to_matrix())
                .with_matrix("l0", inst.l0)
                .with_matrix("s0", inst.s0);
            header(cfg, b, &keys)
        }
        "clique" => {
            let (n, k) = (cfg.int_or("n", 100), cfg.int_or("k", 10));
            let inst = gen_planted_clique(n, k, &mut rng)?;
            let keys = [("generator", "clique".to_string()), ("n", n.to_string()), ("k", k.to_string())];
            let b = Bundle::new()
                .with_matrix("adjacency", inst.adjacency)
                .with_matrix("clique", index_column(&inst.clique));
            header(cfg, b, &keys)
        }
        "video" => {
            let (n1, n2) = (cfg.int_or("n1", 64), cfg.int_or("n2", 16));
            let (density, rate) = (cfg.float_or("density", 0.03), cfg.float_or("rate", 0.5));
            let (w, f) = (haar_matrix(n1)?, dct_matrix(n2)?);
            let video = gen_background_innovation(&w, &f, density, &mut rng)?;
            let truth = video.l0.add(&video.s0)?;
            let op = gen_sampling_operator(n1, n2, rate, None, &mut rng)?;
            let keys = [
                ("generator", "video".to_string()),
                ("n1", n1.to_string()),
                ("n2", n2.to_string()),
                ("density", fmt_f64(density)),
                ("rate", fmt_f64(rate)),
                ("w", "haar".to_string()),
                ("f", "dct".to_string()),
            ];
            let b = Bundle::new()
                .with_matrix("m", op.mask.apply(&truth))
                .with_matrix("mask", op.mask.to_matrix())
                .with_matrix("l0", video.l0)
                .with_matrix("s0", video.s0);
            header(cfg, b, &keys)
        }
        _ => unreachable!("family validated while parsing"),
    };
    Ok(vec![("instance.mat".into(), bundle.to_text().into_bytes())])
}

fn read_bundle(path: &Path) -> Result<Bundle, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    Bundle::parse(&text).map_err(|source| CliError::Config { path: path.to_path_buf(), source })
}

/// Matrix `name`, or the bundle's first matrix when `fallback` is set.
fn pick(bundle: &Bundle, path: &Path, name: &str, fallback: bool) -> Result<DenseMatrix, CliError> {
    bundle
        .get(name)
        .or_else(|| if fallback { bundle.first().ok() } else { None })
        .cloned()
        .ok_or_else(|| CliError::MissingMatrix { path: path.to_path_buf(), name: name.into() })
}

fn mask_of(bundle: &Bundle, m: &DenseMatrix) -> Mask {
    bundle.get("mask").map(Mask::from_matrix).unwrap_or_else(|| Mask::full(m.rows(), m.cols()))
}

fn transform(name: &str, size: usize) -> Result<DenseMatrix, Failure> {
    match name {
        "haar" => Ok(haar_matrix(size)?),
        "dct" => Ok(dct_matrix(size)?),
        "identity" => Ok(DenseMatrix::identity(size)),
        other => {
            Err(CliError::TypeError { key: "w/f".into(), value: other.into(), expected: "haar, dct or identity" }
                .into())
        }
    }
}

fn solution_artifacts(cfg: &RunConfig, res: &SolveResult) -> Artifacts {
    let mut b = Bundle::new()
        .with_header("problem", &res.problem)
        .with_header("status", res.status)
        .with_header("iterations", res.iterations())
        .with_header("objective", fmt_f64(res.objective))
        .with_header("seed", cfg.seed);
    for (name, v) in &res.constraint_report {
        b = b.with_header(&format!("constraint.{name}"), fmt_f64(*v));
    }
    for (name, v) in &res.corrections {
        b = b.with_header(&format!("correction.{name}"), fmt_f64(*v));
    }
    for (name, m) in &res.variables {
        b = b.with_matrix(name, m.clone());
    }
    if let Some(c) = &res.clique {
        b = b.with_matrix("clique", index_column(c));
    }
    vec![
        ("solution.mat".into(), b.to_text().into_bytes()),
        ("diagnostics.csv".into(), diagnostics_csv(&admm_step_report(res)).into_bytes()),
    ]
}

fn solve_cmd(cfg: &RunConfig) -> Result<Artifacts, Failure> {
    let path = PathBuf::from(cfg.text("input").expect("required"));
    let bundle = read_bundle(&path)?;
    let problem = cfg.text("problem").expect("required");
    let spec = match problem {
        "glasso" => ProblemSpec::Glasso(GlassoSpec {
            penalize_diagonal: cfg.flag("penalize_diagonal"),
            ..GlassoSpec::new(pick(&bundle, &path, "sigma", true)?, cfg.require_float("lambda")?)
        }),
        "lvglasso" => ProblemSpec::Lvglasso(LvglassoSpec {
            penalize_diagonal: cfg.flag("penalize_diagonal"),
            ..LvglassoSpec::new(
                pick(&bundle, &path, "sigma", true)?,
                cfg.require_float("lambda")?,
                cfg.require_float("gamma")?,
            )
        }),
        "rpca" => {
            let m = pick(&bundle, &path, "m", true)?;
            let mask = mask_of(&bundle, &m);
            ProblemSpec::Rpca(RpcaSpec::new(m, mask, cfg.float("lambda")))
        }
        "regression" => {
            let y = pick(&bundle, &path, "y", false)?;
            ProblemSpec::RobustRegression(RobustRegressionSpec {
                x: pick(&bundle, &path, "x", false)?,
                y: y.as_slice().to_vec(),
                lambda: cfg.require_float("lambda")?,
            })
        }
        "clique" => ProblemSpec::PlantedClique(PlantedCliqueSpec {
            adjacency: pick(&bundle, &path, "adjacency", true)?,
            k: cfg.require_int("k")?,
            lambda: cfg.require_float("lambda")?,
        }),
        "cslps" => {
            let m = pick(&bundle, &path, "m", true)?;
            let op = SamplingOperator::entries(mask_of(&bundle, &m))?;
            let y = op.apply(&m)?;
            let mode: CsMode = cfg.text("mode").unwrap_or("single").parse()?;
            ProblemSpec::CsLps(CsLpsSpec {
                w: transform(cfg.text("w").unwrap_or("identity"), m.rows())?,
                f: transform(cfg.text("f").unwrap_or("identity"), m.cols())?,
                op,
                y,
                eps: cfg.float_or("eps", 0.0),
                lambda: cfg.require_float("lambda")?,
                mode,
            })
        }
        _ => unreachable!("problem validated while parsing"),
    };
    let res = solve(&spec, &solver_config(cfg, SolverConfig::default()))?;
    Ok(solution_artifacts(cfg, &res))
}

fn phase(cfg: &RunConfig) -> Result<Artifacts, Failure> {
    let family: Family = cfg.text("family").expect("required").parse()?;
    let mut axes: Vec<Axis> = Vec::new();
    let mut fixed: Vec<Axis> = Vec::new();
    for (name, _) in family.parameters() {
        if let Some(values) = cfg.floats(name) {
            let axis = Axis::new(name, &values);
            if values.len() > 1 {
                axes.push(axis);
            } else {
                fixed.push(axis);
            }
        }
    }
    // swept parameters lead so the plot's x axis is the first of them;
    // single values stay as axes too so every trial row records them
    axes.extend(fixed);
    if axes.is_empty() {
        let (name, default) = family.parameters()[0];
        axes.push(Axis::new(name, &[default]));
    }
    let mut spec = GridSpec::new(family, axes, cfg.int_or("trials", 10), cfg.seed);
    spec.solver = Some(solver_config(cfg, family.default_solver()));
    let grid = run_phase_grid(&spec)?;
    Ok(vec![
        ("trials.csv".into(), grid.trials_csv()),
        ("cells.csv".into(), grid.cells_csv()),
        ("phase.svg".into(), grid.svg().into_bytes()),
    ])
}

fn adaptivity(cfg: &RunConfig) -> Result<Artifacts, Failure> {
    let mut ac = AdaptivityConfig::new(
        cfg.require_int("p")?,
        cfg.require_int("degree")?,
        cfg.ints("h").expect("required"),
        cfg.ints("n").expect("required"),
        cfg.int_or("trials", 5),
        cfg.seed,
    );
    ac.strength = cfg.float_or("strength", ac.strength);
    if let Some(l) = cfg.floats("lambdas") {
        ac.lambdas = l;
    }
    if let Some(g) = cfg.floats("gammas") {
        ac.gammas = g;
    }
    ac.solver = solver_config(cfg, ac.solver.clone());
    let report = run_adaptivity(&ac)?;
    Ok(vec![
        ("trials.csv".into(), report.trials_csv()),
        ("summary.csv".into(), report.summary_csv()),
        ("adaptivity.svg".into(), report.svg().into_bytes()),
    ])
}

fn clique(cfg: &RunConfig) -> Result<Artifacts, Failure> {
    let (n, k) = (cfg.require_int("n")?, cfg.require_int("k")?);
    let lambda = cfg.float_or("lambda", 1.0 / (n as f64).sqrt());
    let mut rng = Prng::new(cfg.seed);
    let inst = gen_planted_clique(n, k, &mut rng)?;
    let spec = PlantedCliqueSpec { adjacency: inst.adjacency.clone(), k, lambda };
    let res = solve(&ProblemSpec::PlantedClique(spec), &solver_config(cfg, Family::Clique.default_solver()))?;
    let est = res.clique.clone().unwrap_or_default();
    let overlap = est.iter().filter(|i| inst.clique.contains(i)).count();
    let instance = header(
        cfg,
        Bundle::new().with_matrix("adjacency", inst.adjacency).with_matrix("clique", index_column(&inst.clique)),
        &[("generator", "clique".into()), ("n", n.to_string()), ("k", k.to_string())],
    );
    let summary = format!(
        "n,k,lambda,status,iterations,objective,overlap,recovered\n{n},{k},{},{},{},{},{overlap},{}\n",
        fmt_f64(lambda),
        res.status,
        res.iterations(),
        fmt_f64(res.objective),
        u8::from(est == inst.clique)
    );
    let mut out = vec![("instance.mat".to_string(), instance.to_text().into_bytes())];
    out.extend(solution_artifacts(cfg, &res));
    out.push(("summary.csv".into(), summary.into_bytes()));
    Ok(out)
}
