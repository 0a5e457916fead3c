//! Python bindings. Matrices cross the boundary as lists of row lists;
//! solver results come back as dicts.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use lslab::linalg::{dct_matrix, haar_matrix};
use lslab::solvers::{
    solve, CsLpsSpec, CsMode, GlassoSpec, LvglassoSpec, PlantedCliqueSpec, ProblemSpec, RobustRegressionSpec, RpcaSpec,
    SolveResult, SolverConfig,
};
use lslab::synth::{gen_latent_model, gen_lowrank_sparse, gen_planted_clique, Prng, SamplingOperator};
use lslab::{DenseMatrix, Mask};

fn err(e: lslab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix(rows: Vec<Vec<f64>>) -> PyResult<DenseMatrix> {
    DenseMatrix::from_rows(&rows).map_err(err)
}

fn rows(m: &DenseMatrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn config(rho: Option<f64>, max_iters: Option<usize>, eps_abs: Option<f64>, eps_rel: Option<f64>) -> SolverConfig {
    let d = SolverConfig::default();
    SolverConfig {
        rho: rho.unwrap_or(d.rho),
        max_iters: max_iters.unwrap_or(d.max_iters),
        eps_abs: eps_abs.unwrap_or(d.eps_abs),
        eps_rel: eps_rel.unwrap_or(d.eps_rel),
        ..d
    }
}

fn result<'py>(py: Python<'py>, res: &SolveResult) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for (name, m) in &res.variables {
        d.set_item(name, rows(m))?;
    }
    d.set_item("objective", res.objective)?;
    d.set_item("status", res.status.to_string())?;
    d.set_item("iterations", res.iterations())?;
    let constraints = PyDict::new(py);
    for (name, v) in &res.constraint_report {
        constraints.set_item(name, v)?;
    }
    d.set_item("constraints", constraints)?;
    if let Some(c) = &res.clique {
        d.set_item("clique", c.clone())?;
    }
    Ok(d)
}

fn run<'py>(py: Python<'py>, spec: ProblemSpec, cfg: SolverConfig) -> PyResult<Bound<'py, PyDict>> {
    let res = py.detach(|| solve(&spec, &cfg)).map_err(err)?;
    result(py, &res)
}

#[pyfunction]
#[pyo3(signature = (sigma, lam, penalize_diagonal=false, rho=None, max_iters=None, eps_abs=None, eps_rel=None))]
#[allow(clippy::too_many_arguments)]
fn glasso<'py>(
    py: Python<'py>,
    sigma: Vec<Vec<f64>>,
    lam: f64,
    penalize_diagonal: bool,
    rho: Option<f64>,
    max_iters: Option<usize>,
    eps_abs: Option<f64>,
    eps_rel: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let spec = GlassoSpec { penalize_diagonal, ..GlassoSpec::new(matrix(sigma)?, lam) };
    run(py, ProblemSpec::Glasso(spec), config(rho, max_iters, eps_abs, eps_rel))
}

#[pyfunction]
#[pyo3(signature = (sigma, lam, gamma, penalize_diagonal=false, rho=None, max_iters=None, eps_abs=None, eps_rel=None))]
#[allow(clippy::too_many_arguments)]
fn lvglasso<'py>(
    py: Python<'py>,
    sigma: Vec<Vec<f64>>,
    lam: f64,
    gamma: f64,
    penalize_diagonal: bool,
    rho: Option<f64>,
    max_iters: Option<usize>,
    eps_abs: Option<f64>,
    eps_rel: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let spec = LvglassoSpec { penalize_diagonal, ..LvglassoSpec::new(matrix(sigma)?, lam, gamma) };
    run(py, ProblemSpec::Lvglasso(spec), config(rho, max_iters, eps_abs, eps_rel))
}

/// `mask` holds nonzero entries where `m` is observed; omitted means fully
/// observed. `lam` defaults to `1/sqrt(max(n1, n2))`.
#[pyfunction]
#[pyo3(signature = (m, mask=None, lam=None, rho=None, max_iters=None, eps_abs=None, eps_rel=None))]
#[allow(clippy::too_many_arguments)]
fn rpca<'py>(
    py: Python<'py>,
    m: Vec<Vec<f64>>,
    mask: Option<Vec<Vec<f64>>>,
    lam: Option<f64>,
    rho: Option<f64>,
    max_iters: Option<usize>,
    eps_abs: Option<f64>,
    eps_rel: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let m = matrix(m)?;
    let mask = match mask {
        Some(rows) => Mask::from_matrix(&matrix(rows)?),
        None => Mask::full(m.rows(), m.cols()),
    };
    run(py, ProblemSpec::Rpca(RpcaSpec::new(m, mask, lam)), config(rho, max_iters, eps_abs, eps_rel))
}

#[pyfunction]
#[pyo3(signature = (x, y, lam, rho=None, max_iters=None, eps_abs=None, eps_rel=None))]
#[allow(clippy::too_many_arguments)]
fn robust_regression<'py>(
    py: Python<'py>,
    x: Vec<Vec<f64>>,
    y: Vec<f64>,
    lam: f64,
    rho: Option<f64>,
    max_iters: Option<usize>,
    eps_abs: Option<f64>,
    eps_rel: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let spec = RobustRegressionSpec { x: matrix(x)?, y, lambda: lam };
    run(py, ProblemSpec::RobustRegression(spec), config(rho, max_iters, eps_abs, eps_rel))
}

#[pyfunction]
#[pyo3(signature = (adjacency, k, lam, rho=None, max_iters=None, eps_abs=None, eps_rel=None))]
#[allow(clippy::too_many_arguments)]
fn planted_clique<'py>(
    py: Python<'py>,
    adjacency: Vec<Vec<f64>>,
    k: usize,
    lam: f64,
    rho: Option<f64>,
    max_iters: Option<usize>,
    eps_abs: Option<f64>,
    eps_rel: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let spec = PlantedCliqueSpec { adjacency: matrix(adjacency)?, k, lambda: lam };
    run(py, ProblemSpec::PlantedClique(spec), config(rho, max_iters, eps_abs, eps_rel))
}

fn transform(name: &str, size: usize) -> PyResult<DenseMatrix> {
    match name {
        "haar" => haar_matrix(size).map_err(err),
        "dct" => dct_matrix(size).map_err(err),
        "identity" => Ok(DenseMatrix::identity(size)),
        other => Err(PyValueError::new_err(format!("unknown transform `{other}`"))),
    }
}

/// Entry-sampled compressive recovery of `m` on the entries selected by
/// `mask`; `w` and `f` name the sparsifying transforms.
#[pyfunction]
#[pyo3(signature = (m, lam, mask=None, eps=0.0, mode="single", w="identity", f="identity", max_iters=None))]
#[allow(clippy::too_many_arguments)]
fn cs_lps<'py>(
    py: Python<'py>,
    m: Vec<Vec<f64>>,
    lam: f64,
    mask: Option<Vec<Vec<f64>>>,
    eps: f64,
    mode: &str,
    w: &str,
    f: &str,
    max_iters: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let m = matrix(m)?;
    let mask = match mask {
        Some(rows) => Mask::from_matrix(&matrix(rows)?),
        None => Mask::full(m.rows(), m.cols()),
    };
    let op = SamplingOperator::entries(mask).map_err(err)?;
    let y = op.apply(&m).map_err(err)?;
    let mode: CsMode = mode.parse().map_err(err)?;
    let spec = CsLpsSpec { w: transform(w, m.rows())?, f: transform(f, m.cols())?, op, y, eps, lambda: lam, mode };
    run(py, ProblemSpec::CsLps(spec), config(None, max_iters, None, None))
}

#[pyfunction]
fn soft_threshold(a: Vec<Vec<f64>>, tau: f64) -> PyResult<Vec<Vec<f64>>> {
    lslab::prox::soft_threshold(&matrix(a)?, tau).map(|m| rows(&m)).map_err(err)
}

#[pyfunction]
fn svt(a: Vec<Vec<f64>>, tau: f64) -> PyResult<Vec<Vec<f64>>> {
    lslab::prox::svt(&matrix(a)?, tau).map(|m| rows(&m)).map_err(err)
}

#[pyfunction]
fn prox_neg_logdet(a: Vec<Vec<f64>>, rho: f64) -> PyResult<Vec<Vec<f64>>> {
    lslab::prox::prox_neg_logdet(&matrix(a)?, rho).map(|m| rows(&m)).map_err(err)
}

#[pyfunction]
fn psd_project(a: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
    lslab::prox::psd_project(&matrix(a)?).map(|m| rows(&m)).map_err(err)
}

#[pyfunction]
fn spd_inverse(a: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
    lslab::linalg::spd_inverse(&matrix(a)?).map(|m| rows(&m)).map_err(err)
}

#[pyfunction]
fn nuclear_norm(a: Vec<Vec<f64>>) -> PyResult<f64> {
    Ok(lslab::linalg::nuclear_norm(&matrix(a)?))
}

#[pyfunction]
#[pyo3(signature = (p, h, degree, strength, seed))]
fn latent_model(
    py: Python<'_>,
    p: usize,
    h: usize,
    degree: usize,
    strength: f64,
    seed: u64,
) -> PyResult<Bound<'_, PyDict>> {
    let model = gen_latent_model(p, h, degree, strength, &mut Prng::new(seed)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("sigma", rows(&model.sigma_obs))?;
    d.set_item("s_star", rows(&model.s_star))?;
    d.set_item("l_star", rows(&model.l_star))?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (n1, n2, rank, sparsity, seed))]
fn lowrank_sparse(
    py: Python<'_>,
    n1: usize,
    n2: usize,
    rank: usize,
    sparsity: f64,
    seed: u64,
) -> PyResult<Bound<'_, PyDict>> {
    let inst = gen_lowrank_sparse(n1, n2, rank, sparsity, &mut Prng::new(seed)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("m", rows(&inst.m))?;
    d.set_item("l0", rows(&inst.l0))?;
    d.set_item("s0", rows(&inst.s0))?;
    Ok(d)
}

#[pyfunction]
fn planted_clique_instance(py: Python<'_>, n: usize, k: usize, seed: u64) -> PyResult<Bound<'_, PyDict>> {
    let inst = gen_planted_clique(n, k, &mut Prng::new(seed)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("adjacency", rows(&inst.adjacency))?;
    d.set_item("clique", inst.clique)?;
    Ok(d)
}

#[pymodule]
#[pyo3(name = "lslab")]
fn lslab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("PRNG_ID", lslab::synth::PRNG_ID)?;
    m.add_function(wrap_pyfunction!(glasso, m)?)?;
    m.add_function(wrap_pyfunction!(lvglasso, m)?)?;
    m.add_function(wrap_pyfunction!(rpca, m)?)?;
    m.add_function(wrap_pyfunction!(robust_regression, m)?)?;
    m.add_function(wrap_pyfunction!(planted_clique, m)?)?;
    m.add_function(wrap_pyfunction!(cs_lps, m)?)?;
    m.add_function(wrap_pyfunction!(soft_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(svt, m)?)?;
    m.add_function(wrap_pyfunction!(prox_neg_logdet, m)?)?;
    m.add_function(wrap_pyfunction!(psd_project, m)?)?;
    m.add_function(wrap_pyfunction!(spd_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(nuclear_norm, m)?)?;
    m.add_function(wrap_pyfunction!(latent_model, m)?)?;
    m.add_function(wrap_pyfunction!(lowrank_sparse, m)?)?;
    m.add_function(wrap_pyfunction!(planted_clique_instance, m)?)?;
    Ok(())
}
