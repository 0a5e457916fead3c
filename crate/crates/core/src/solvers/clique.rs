//! Planted clique relaxation: `min ‖X‖_* + λ‖X‖₁` over symmetric `X` with
//! `Xᵢⱼ = 0` on non-edges and the entries on edges plus diagonal summing to
//! `k²`.
//!
//! Splitting `X = Z`: `X` takes the nuclear norm (symmetric SVT through an
//! eigendecomposition), `Z` takes the ℓ1 term and the constraints, whose prox
//! is a soft threshold with a scalar shift found by root finding.

use super::admm::{self, Residuals, Splitting};
use super::{check_positive, SolveResult, SolverConfig};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::prox::{shrink, svt_symmetric_with_norm};

#[derive(Debug, Clone)]
pub struct PlantedCliqueSpec {
    /// Symmetric 0/1 adjacency; the diagonal is always treated as allowed.
    pub adjacency: DenseMatrix,
    pub k: usize,
    pub lambda: f64,
}

/// Indices of the `k` largest row sums, ties to the lower index, sorted.
pub fn clique_estimate(x: &DenseMatrix, k: usize) -> Vec<usize> {
    let sums: Vec<f64> = (0..x.rows()).map(|i| x.row(i).iter().sum()).collect();
    let mut order: Vec<usize> = (0..x.rows()).collect();
    order.sort_by(|&a, &b| sums[b].total_cmp(&sums[a]).then(a.cmp(&b)));
    let mut top: Vec<usize> = order.into_iter().take(k).collect();
    top.sort_unstable();
    top
}

/// Shift `ν` with `Σ shrink(vᵢ + ν, τ) = target`. The sum is continuous,
/// nondecreasing and piecewise linear in `ν`; bisection isolates the piece
/// and the linear equation on it is solved exactly.
fn sum_shift(v: &[f64], tau: f64, target: f64) -> f64 {
    let f = |nu: f64| v.iter().map(|&x| shrink(x + nu, tau)).sum::<f64>();
    let vmax = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let vmin = v.iter().copied().fold(f64::INFINITY, f64::min);
    let mut lo = -vmax - tau;
    let mut hi = tau - vmin + target / v.len() as f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mid = 0.5 * (lo + hi);
    let (mut count, mut offset) = (0usize, 0.0);
    for &x in v {
        let a = x + mid;
        if a > tau {
            count += 1;
            offset += x - tau;
        } else if a < -tau {
            count += 1;
            offset += x + tau;
        }
    }
    if count > 0 {
        let exact = (target - offset) / count as f64;
        let slack = 1e-9 * (hi - lo).abs().max(mid.abs()).max(1e-300);
        if exact >= lo - slack && exact <= hi + slack {
            return exact;
        }
    }
    mid
}

struct Clique {
    n: usize,
    allowed: Vec<usize>,
    lambda: f64,
    target: f64,
    x: DenseMatrix,
    nuclear: f64,
    z: DenseMatrix,
    z_prev: DenseMatrix,
    u: DenseMatrix,
}

impl Splitting for Clique {
    fn primal_dim(&self) -> usize {
        self.n * self.n
    }

    fn dual_dim(&self) -> usize {
        self.n * self.n
    }

    fn update_x(&mut self, rho: f64) {
        let v = self.z.zip_map_unchecked(&self.u, |z, u| z - u);
        let (x, nuc) = svt_symmetric_with_norm(&v, 1.0 / rho);
        self.x = x;
        self.nuclear = nuc;
    }

    fn update_z(&mut self, rho: f64) {
        std::mem::swap(&mut self.z, &mut self.z_prev);
        let tau = self.lambda / rho;
        let xs = self.x.as_slice();
        let us = self.u.as_slice();
        let vals: Vec<f64> = self.allowed.iter().map(|&i| xs[i] + us[i]).collect();
        let nu = sum_shift(&vals, tau, self.target);
        let mut z = DenseMatrix::zeros(self.n, self.n);
        let zs = z.as_mut_slice();
        for (&i, &v) in self.allowed.iter().zip(&vals) {
            zs[i] = shrink(v + nu, tau);
        }
        self.z = z;
    }

    fn update_dual(&mut self) -> Residuals {
        let mut primal = 0.0;
        for ((u, x), z) in self.u.as_mut_slice().iter_mut().zip(self.x.as_slice()).zip(self.z.as_slice()) {
            *u += x - z;
            primal += (x - z) * (x - z);
        }
        Residuals {
            primal: primal.sqrt(),
            dual_change: admm::diff_norm_sq(&self.z, &self.z_prev).sqrt(),
            ax_norm: self.x.frobenius_norm(),
            bz_norm: self.z.frobenius_norm(),
            c_norm: 0.0,
            dual_norm: self.u.frobenius_norm(),
        }
    }

    fn scale_dual(&mut self, factor: f64) {
        self.u = self.u.scale(factor);
    }

    fn objective(&self) -> f64 {
        self.nuclear + self.lambda * self.z.l1_norm()
    }
}

pub fn planted_clique_solve(spec: &PlantedCliqueSpec, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate()?;
    check_positive("lambda", spec.lambda)?;
    let a = &spec.adjacency;
    let n = a.rows();
    if !a.is_square() {
        return Err(Error::InvalidShape(format!("{}x{} adjacency", a.rows(), a.cols())));
    }
    if spec.k < 2 || spec.k > n {
        return Err(Error::InvalidK { k: spec.k, n });
    }
    if a.as_slice().iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::InvalidParameter("adjacency entries must be 0 or 1".into()));
    }
    if a.asymmetry() != 0.0 {
        return Err(Error::NotSymmetric(a.asymmetry()));
    }
    let allowed: Vec<usize> = (0..n * n).filter(|&idx| idx / n == idx % n || a.as_slice()[idx] == 1.0).collect();
    let target = (spec.k * spec.k) as f64;
    // Start from the uniform feasible point.
    let mut start = DenseMatrix::zeros(n, n);
    let fill = target / allowed.len() as f64;
    for &i in &allowed {
        start.as_mut_slice()[i] = fill;
    }
    let mut prob = Clique {
        n,
        allowed,
        lambda: spec.lambda,
        target,
        x: start.clone(),
        nuclear: 0.0,
        z: start,
        z_prev: DenseMatrix::zeros(n, n),
        u: DenseMatrix::zeros(n, n),
    };
    let trace = admm::run(&mut prob, cfg);
    let mut out = SolveResult::from_trace("clique", trace);

    let z = prob.z.clone();
    let sum: f64 = z.sum();
    let nonedge = (0..n * n)
        .filter(|&idx| idx / n != idx % n && a.as_slice()[idx] == 0.0)
        .map(|idx| z.as_slice()[idx].abs())
        .fold(0.0, f64::max);
    out.report("sum", (sum - target).abs() / target);
    out.report("nonedge", nonedge);
    out.report("symmetry", z.asymmetry());
    out.objective = crate::linalg::nuclear_norm(&z) + spec.lambda * z.l1_norm();
    out.clique = Some(clique_estimate(&z, spec.k));
    out.push_var("X", z);
    Ok(out)
}
