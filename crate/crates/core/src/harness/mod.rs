//! Recovery metrics, seeded phase-transition grids and the latent-variable
//! adaptivity experiment.

mod adaptivity;
mod grid;
pub mod svg;

pub use adaptivity::{run_adaptivity, AdaptivityConfig, AdaptivityReport, AdaptivityRow, AdaptivityTrial};
pub use grid::{run_phase_grid, Axis, CellResult, ExperimentGrid, Family, GridSpec};

use crate::error::{Error, Result};
use crate::linalg::numerical_rank;
use crate::matrix::DenseMatrix;

/// Relative Frobenius error counted as exact recovery.
pub const SUCCESS_TOL: f64 = 1e-3;
/// Support threshold relative to the largest truth magnitude.
pub const ZERO_TOL_REL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryScore {
    pub rel_error_f: f64,
    pub support_f1: f64,
    /// Supports agree and the signs match on them.
    pub sign_consistency: bool,
    pub rank_hat: usize,
    pub success: bool,
}

/// F1 of two supports given as boolean slices; two empty supports score 1.
pub fn support_f1(est: &[bool], truth: &[bool]) -> f64 {
    let (mut tp, mut fp, mut fneg) = (0usize, 0usize, 0usize);
    for (&e, &t) in est.iter().zip(truth) {
        match (e, t) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fneg += 1,
            _ => {}
        }
    }
    if tp + fp + fneg == 0 {
        1.0
    } else {
        2.0 * tp as f64 / (2 * tp + fp + fneg) as f64
    }
}

/// Compares an estimate with the truth: relative Frobenius error, support F1
/// and sign agreement with entries counted when `|x| > zero_tol`, numerical
/// rank with singular values above `zero_tol · σ₁`.
pub fn score_recovery(
    est: &DenseMatrix,
    truth: &DenseMatrix,
    zero_tol: f64,
    success_tol: f64,
) -> Result<RecoveryScore> {
    if est.shape() != truth.shape() {
        return Err(Error::DimensionMismatch(format!(
            "estimate is {}x{}, truth is {}x{}",
            est.rows(),
            est.cols(),
            truth.rows(),
            truth.cols()
        )));
    }
    if !(zero_tol > 0.0) || !(success_tol > 0.0) {
        return Err(Error::InvalidParameter("tolerances must be positive".into()));
    }
    let rel_error_f = est.sub(truth)?.frobenius_norm() / truth.frobenius_norm().max(1e-30);
    let se: Vec<bool> = est.as_slice().iter().map(|v| v.abs() > zero_tol).collect();
    let st: Vec<bool> = truth.as_slice().iter().map(|v| v.abs() > zero_tol).collect();
    let sign_consistency = se == st
        && est.as_slice().iter().zip(truth.as_slice()).zip(&st).all(|((a, b), &s)| !s || a.signum() == b.signum());
    Ok(RecoveryScore {
        rel_error_f,
        support_f1: support_f1(&se, &st),
        sign_consistency,
        rank_hat: numerical_rank(est, zero_tol),
        success: rel_error_f <= success_tol,
    })
}

/// Off-diagonal support F1 of a precision estimate against the truth.
pub fn offdiag_f1(est: &DenseMatrix, truth: &DenseMatrix, zero_tol: f64) -> f64 {
    let n = est.cols();
    let keep = |idx: &usize| idx / n != idx % n;
    let se: Vec<bool> = (0..n * n).filter(keep).map(|i| est.as_slice()[i].abs() > zero_tol).collect();
    let st: Vec<bool> = (0..n * n).filter(keep).map(|i| truth.as_slice()[i].abs() > zero_tol).collect();
    support_f1(&se, &st)
}

/// Worker count: `LSLAB_THREADS` when set to a positive integer, otherwise
/// the number of available cores.
pub fn thread_count() -> usize {
    std::env::var("LSLAB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Runs `f` over `0..count` on a pool of `thread_count()` workers and returns
/// results in index order.
pub(crate) fn par_map<T: Send>(count: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    let threads = thread_count();
    if threads <= 1 {
        return (0..count).map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| (0..count).into_par_iter().map(&f).collect()),
        Err(_) => (0..count).map(f).collect(),
    }
}

pub(crate) fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    }
}

pub(crate) fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory write")
}

/// Shortest round-trip decimal.
pub(crate) fn fmt_num(v: f64) -> String {
    format!("{v}")
}
