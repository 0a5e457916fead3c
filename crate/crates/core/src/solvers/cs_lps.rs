//! Compressive low-rank plus sparse recovery from `y = A(M) + z`.
//!
//! Single-matrix mode: `min ‖X‖_* + λ‖WXF‖₁` s.t. `‖A(X) − y‖₂ ≤ ε`.
//! Background/innovation mode: `min λ‖L‖_* + ‖WSF‖₁` s.t. `‖A(L + S) − y‖₂ ≤ ε`.
//!
//! Block one holds one copy per term (SVT, transform prox, ball projection);
//! block two is a least-squares solve that is diagonal in the transform
//! domain because `AAᵀ = I`.

use super::admm::{self, Residuals, Splitting};
use super::{check_nonnegative, check_positive, SolveResult, SolverConfig};
use crate::error::{Error, Result};
use crate::linalg::{ensure_orthogonal, nuclear_norm};
use crate::matrix::{norm2, DenseMatrix};
use crate::prox::{l2ball_project_unchecked, svt_with_norm, transform_l1_prox_unchecked, ORTHOGONALITY_TOL};
use crate::synth::SamplingOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsMode {
    /// One matrix penalized by both norms.
    Single,
    /// `X = L + S` with the nuclear norm on `L` and the transform ℓ1 on `S`.
    BackgroundInnovation,
}

impl std::str::FromStr for CsMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(CsMode::Single),
            "background" => Ok(CsMode::BackgroundInnovation),
            other => Err(Error::Parse(format!("unknown cs mode `{other}`"))),
        }
    }
}

impl std::fmt::Display for CsMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CsMode::Single => "single",
            CsMode::BackgroundInnovation => "background",
        })
    }
}

#[derive(Debug, Clone)]
pub struct CsLpsSpec {
    pub op: SamplingOperator,
    pub y: Vec<f64>,
    pub eps: f64,
    /// Left sparsifying transform (orthogonal).
    pub w: DenseMatrix,
    /// Right sparsifying transform (orthogonal).
    pub f: DenseMatrix,
    pub lambda: f64,
    pub mode: CsMode,
}

fn sub(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    a.zip_map_unchecked(b, |x, y| x - y)
}

fn add(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    a.zip_map_unchecked(b, |x, y| x + y)
}

fn vsub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

struct Ctx<'a> {
    op: &'a SamplingOperator,
    y: &'a [f64],
    eps: f64,
    w: &'a DenseMatrix,
    f: &'a DenseMatrix,
    lambda: f64,
}

impl Ctx<'_> {
    fn a(&self, x: &DenseMatrix) -> Vec<f64> {
        self.op.apply(x).expect("shapes checked")
    }

    fn at(&self, v: &[f64]) -> DenseMatrix {
        self.op.adjoint(v).expect("shapes checked")
    }
}

struct Single<'a> {
    ctx: Ctx<'a>,
    x1: DenseMatrix,
    x2: DenseMatrix,
    z: Vec<f64>,
    nuc: f64,
    l1: f64,
    xt: DenseMatrix,
    axt: Vec<f64>,
    xt_prev: DenseMatrix,
    axt_prev: Vec<f64>,
    u1: DenseMatrix,
    u2: DenseMatrix,
    u3: Vec<f64>,
}

impl Splitting for Single<'_> {
    fn primal_dim(&self) -> usize {
        2 * self.xt.as_slice().len() + self.z.len()
    }

    fn dual_dim(&self) -> usize {
        self.primal_dim()
    }

    fn update_x(&mut self, rho: f64) {
        let (x1, nuc) = svt_with_norm(&sub(&self.xt, &self.u1), 1.0 / rho);
        let (x2, l1) =
            transform_l1_prox_unchecked(&sub(&self.xt, &self.u2), self.ctx.w, self.ctx.f, self.ctx.lambda / rho);
        self.x1 = x1;
        self.x2 = x2;
        self.nuc = nuc;
        self.l1 = l1;
        self.z = l2ball_project_unchecked(&vsub(&self.axt, &self.u3), self.ctx.y, self.ctx.eps);
    }

    fn update_z(&mut self, _rho: f64) {
        std::mem::swap(&mut self.xt, &mut self.xt_prev);
        std::mem::swap(&mut self.axt, &mut self.axt_prev);
        let zu: Vec<f64> = self.z.iter().zip(&self.u3).map(|(a, b)| a + b).collect();
        let v = add(&add(&add(&self.x1, &self.u1), &add(&self.x2, &self.u2)), &self.ctx.at(&zu));
        self.xt = self.ctx.op.solve_shifted(&v, 2.0, 1.0);
        self.axt = self.ctx.a(&self.xt);
    }

    fn update_dual(&mut self) -> Residuals {
        let mut primal = 0.0;
        for (u, x) in [(&mut self.u1, &self.x1), (&mut self.u2, &self.x2)] {
            for ((u, a), b) in u.as_mut_slice().iter_mut().zip(x.as_slice()).zip(self.xt.as_slice()) {
                *u += a - b;
                primal += (a - b) * (a - b);
            }
        }
        for ((u, a), b) in self.u3.iter_mut().zip(&self.z).zip(&self.axt) {
            *u += a - b;
            primal += (a - b) * (a - b);
        }
        let dx = admm::diff_norm_sq(&self.xt, &self.xt_prev);
        let dax: f64 = self.axt.iter().zip(&self.axt_prev).map(|(a, b)| (a - b) * (a - b)).sum();
        let xt_sq = self.xt.as_slice().iter().map(|v| v * v).sum::<f64>();
        Residuals {
            primal: primal.sqrt(),
            dual_change: (2.0 * dx + dax).sqrt(),
            ax_norm: (admm::stacked_norm(&[&self.x1, &self.x2]).powi(2) + admm::vec_norm_sq(&self.z)).sqrt(),
            bz_norm: (2.0 * xt_sq + admm::vec_norm_sq(&self.axt)).sqrt(),
            c_norm: 0.0,
            dual_norm: (admm::stacked_norm(&[&self.u1, &self.u2]).powi(2) + admm::vec_norm_sq(&self.u3)).sqrt(),
        }
    }

    fn scale_dual(&mut self, factor: f64) {
        self.u1 = self.u1.scale(factor);
        self.u2 = self.u2.scale(factor);
        self.u3.iter_mut().for_each(|u| *u *= factor);
    }

    fn objective(&self) -> f64 {
        self.nuc + self.ctx.lambda * self.l1
    }
}

struct Background<'a> {
    ctx: Ctx<'a>,
    l1: DenseMatrix,
    s1: DenseMatrix,
    z: Vec<f64>,
    nuc: f64,
    sparse: f64,
    lt: DenseMatrix,
    st: DenseMatrix,
    asum: Vec<f64>,
    lt_prev: DenseMatrix,
    st_prev: DenseMatrix,
    asum_prev: Vec<f64>,
    ul: DenseMatrix,
    us: DenseMatrix,
    u3: Vec<f64>,
}

impl Splitting for Background<'_> {
    fn primal_dim(&self) -> usize {
        2 * self.lt.as_slice().len() + self.z.len()
    }

    fn dual_dim(&self) -> usize {
        self.primal_dim()
    }

    fn update_x(&mut self, rho: f64) {
        let (l, nuc) = svt_with_norm(&sub(&self.lt, &self.ul), self.ctx.lambda / rho);
        let (s, l1) = transform_l1_prox_unchecked(&sub(&self.st, &self.us), self.ctx.w, self.ctx.f, 1.0 / rho);
        self.l1 = l;
        self.s1 = s;
        self.nuc = nuc;
        self.sparse = l1;
        self.z = l2ball_project_unchecked(&vsub(&self.asum, &self.u3), self.ctx.y, self.ctx.eps);
    }

    fn update_z(&mut self, _rho: f64) {
        std::mem::swap(&mut self.lt, &mut self.lt_prev);
        std::mem::swap(&mut self.st, &mut self.st_prev);
        std::mem::swap(&mut self.asum, &mut self.asum_prev);
        let a = add(&self.l1, &self.ul);
        let b = add(&self.s1, &self.us);
        let c: Vec<f64> = self.z.iter().zip(&self.u3).map(|(x, u)| x + u).collect();
        let rhs = add(&a, &b).zip_map_unchecked(&self.ctx.at(&c), |x, y| x + 2.0 * y);
        let sigma = self.ctx.op.solve_shifted(&rhs, 1.0, 2.0);
        let asig = self.ctx.a(&sigma);
        let g = self.ctx.at(&vsub(&asig, &c));
        self.lt = sub(&a, &g);
        self.st = sub(&b, &g);
        self.asum = self.ctx.a(&add(&self.lt, &self.st));
    }

    fn update_dual(&mut self) -> Residuals {
        let mut primal = 0.0;
        for (u, x, t) in [(&mut self.ul, &self.l1, &self.lt), (&mut self.us, &self.s1, &self.st)] {
            for ((u, a), b) in u.as_mut_slice().iter_mut().zip(x.as_slice()).zip(t.as_slice()) {
                *u += a - b;
                primal += (a - b) * (a - b);
            }
        }
        for ((u, a), b) in self.u3.iter_mut().zip(&self.z).zip(&self.asum) {
            *u += a - b;
            primal += (a - b) * (a - b);
        }
        let change = admm::diff_norm_sq(&self.lt, &self.lt_prev)
            + admm::diff_norm_sq(&self.st, &self.st_prev)
            + self.asum.iter().zip(&self.asum_prev).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        Residuals {
            primal: primal.sqrt(),
            dual_change: change.sqrt(),
            ax_norm: (admm::stacked_norm(&[&self.l1, &self.s1]).powi(2) + admm::vec_norm_sq(&self.z)).sqrt(),
            bz_norm: (admm::stacked_norm(&[&self.lt, &self.st]).powi(2) + admm::vec_norm_sq(&self.asum)).sqrt(),
            c_norm: 0.0,
            dual_norm: (admm::stacked_norm(&[&self.ul, &self.us]).powi(2) + admm::vec_norm_sq(&self.u3)).sqrt(),
        }
    }

    fn scale_dual(&mut self, factor: f64) {
        self.ul = self.ul.scale(factor);
        self.us = self.us.scale(factor);
        self.u3.iter_mut().for_each(|u| *u *= factor);
    }

    fn objective(&self) -> f64 {
        self.ctx.lambda * self.nuc + self.sparse
    }
}

fn transform_l1(x: &DenseMatrix, w: &DenseMatrix, f: &DenseMatrix) -> f64 {
    w.mul_unchecked(x).mul_unchecked(f).l1_norm()
}

/// Moves `x` the minimum distance into the measurement ball. Exact because
/// `A` has orthonormal rows. Returns the size of the move.
fn project_feasible(ctx: &Ctx<'_>, x: &mut DenseMatrix) -> f64 {
    let r = vsub(&ctx.a(x), ctx.y);
    let nr = norm2(&r);
    if nr <= ctx.eps {
        return 0.0;
    }
    let t = 1.0 - ctx.eps / nr;
    let step: Vec<f64> = r.iter().map(|v| v * t).collect();
    *x = sub(x, &ctx.at(&step));
    t * nr
}

pub fn cs_lps_solve(spec: &CsLpsSpec, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate()?;
    check_positive("lambda", spec.lambda)?;
    check_nonnegative("eps", spec.eps)?;
    let (n1, n2) = spec.op.shape();
    ensure_orthogonal(&spec.w, ORTHOGONALITY_TOL)?;
    ensure_orthogonal(&spec.f, ORTHOGONALITY_TOL)?;
    if spec.w.rows() != n1 || spec.f.rows() != n2 {
        return Err(Error::DimensionMismatch(format!(
            "W is {}x{}, F is {}x{}, operator acts on {n1}x{n2}",
            spec.w.rows(),
            spec.w.cols(),
            spec.f.rows(),
            spec.f.cols()
        )));
    }
    if spec.y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotFinite);
    }
    let dist = spec.op.range_distance(&spec.y)?;
    let ynorm = norm2(&spec.y);
    if dist > spec.eps + 1e-12 * ynorm.max(1.0) {
        return Err(Error::InfeasibleRadius { eps: spec.eps, dist });
    }
    let ctx = Ctx { op: &spec.op, y: &spec.y, eps: spec.eps, w: &spec.w, f: &spec.f, lambda: spec.lambda };
    let m = spec.y.len();
    let zero = DenseMatrix::zeros(n1, n2);

    let mut out = match spec.mode {
        CsMode::Single => {
            let mut prob = Single {
                ctx,
                x1: zero.clone(),
                x2: zero.clone(),
                z: vec![0.0; m],
                nuc: 0.0,
                l1: 0.0,
                xt: zero.clone(),
                axt: vec![0.0; m],
                xt_prev: zero.clone(),
                axt_prev: vec![0.0; m],
                u1: zero.clone(),
                u2: zero.clone(),
                u3: vec![0.0; m],
            };
            let trace = admm::run(&mut prob, cfg);
            let mut out = SolveResult::from_trace("cslps", trace);
            let mut x = prob.xt.clone();
            let moved = project_feasible(&prob.ctx, &mut x);
            out.record_correction("feasibility_projection", moved);
            let resid = norm2(&vsub(&prob.ctx.a(&x), &spec.y));
            out.report("ball", (resid - spec.eps) / ynorm.max(1.0));
            out.objective = nuclear_norm(&x) + spec.lambda * transform_l1(&x, &spec.w, &spec.f);
            out.push_var("X", x);
            out
        }
        CsMode::BackgroundInnovation => {
            let mut prob = Background {
                ctx,
                l1: zero.clone(),
                s1: zero.clone(),
                z: vec![0.0; m],
                nuc: 0.0,
                sparse: 0.0,
                lt: zero.clone(),
                st: zero.clone(),
                asum: vec![0.0; m],
                lt_prev: zero.clone(),
                st_prev: zero.clone(),
                asum_prev: vec![0.0; m],
                ul: zero.clone(),
                us: zero.clone(),
                u3: vec![0.0; m],
            };
            let trace = admm::run(&mut prob, cfg);
            let mut out = SolveResult::from_trace("cslps", trace);
            let l = prob.l1.clone();
            // The correction lives in the sampled coefficients and is given
            // to the innovation term.
            let mut x = add(&l, &prob.s1);
            let moved = project_feasible(&prob.ctx, &mut x);
            let s = sub(&x, &l);
            out.record_correction("feasibility_projection", moved);
            let resid = norm2(&vsub(&prob.ctx.a(&x), &spec.y));
            out.report("ball", (resid - spec.eps) / ynorm.max(1.0));
            out.objective = spec.lambda * nuclear_norm(&l) + transform_l1(&s, &spec.w, &spec.f);
            out.push_var("L", l);
            out.push_var("S", s);
            out.push_var("X", x);
            out
        }
    };
    out.problem = "cslps".into();
    Ok(out)
}
