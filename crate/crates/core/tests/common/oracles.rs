//! Brute-force objective oracles for 2×2 / 3×3 / 3-variable instances of
//! each solver: a dense grid over the free scalars of the instance followed
//! by direct-search refinement. Objectives are evaluated with closed forms
//! written here, independent of the library's linear algebra.

use lslab::linalg::haar_matrix;
use lslab::solvers::{
    cs_lps_solve, glasso_solve, lvglasso_solve, planted_clique_solve, robust_regression_solve, rpca_solve, CsLpsSpec,
    CsMode, GlassoSpec, LvglassoSpec, PlantedCliqueSpec, RobustRegressionSpec, RpcaSpec, SolveResult, SolverConfig,
};
use lslab::synth::{Prng, SamplingOperator};
use lslab::{DenseMatrix, Mask};

use super::{grid_then_polish, rel_gap, spd};

#[derive(Debug, Clone)]
pub struct Outcome {
    pub solver: &'static str,
    pub seed: u64,
    /// Objective reported by the solver.
    pub reported: f64,
    /// Objective recomputed here from the returned variables.
    pub recomputed: f64,
    pub oracle: f64,
    pub result: SolveResult,
}

impl Outcome {
    pub fn gap(&self) -> f64 {
        rel_gap(self.reported, self.oracle).max(rel_gap(self.recomputed, self.oracle))
    }
}

fn det2(a: f64, b: f64, d: f64) -> f64 {
    a * d - b * b
}

/// Nuclear norm of a 2×2 matrix: `√(‖A‖_F² + 2|det A|)`.
fn nuc2(m: [f64; 4]) -> f64 {
    let f2: f64 = m.iter().map(|v| v * v).sum();
    let det = m[0] * m[3] - m[1] * m[2];
    (f2 + 2.0 * det.abs()).sqrt()
}

/// Eigenvalues of a symmetric 3×3 matrix by the trigonometric formula.
fn eig3(a: &[[f64; 3]; 3]) -> [f64; 3] {
    let p1 = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
    let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    if p == 0.0 {
        return [q, q, q];
    }
    let b = |i: usize, j: usize| (a[i][j] - if i == j { q } else { 0.0 }) / p;
    let det = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) - b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0))
        + b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    let phi = (det / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
    let e1 = q + 2.0 * p * phi.cos();
    let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    [e1, 3.0 * q - e1 - e3, e3]
}

fn at(m: &DenseMatrix, i: usize, j: usize) -> f64 {
    m.as_slice()[i * m.cols() + j]
}

fn glasso_value(s: [f64; 3], sigma: &DenseMatrix, lambda: f64) -> f64 {
    let det = det2(s[0], s[2], s[1]);
    if s[0] <= 0.0 || det <= 0.0 {
        return f64::INFINITY;
    }
    -det.ln()
        + s[0] * at(sigma, 0, 0)
        + s[1] * at(sigma, 1, 1)
        + 2.0 * s[2] * at(sigma, 0, 1)
        + 2.0 * lambda * s[2].abs()
}

pub fn glasso(seed: u64, cfg: &SolverConfig) -> Outcome {
    let mut rng = Prng::derive(seed, &[1]);
    let sigma = spd(&mut rng, 2, 0.3);
    let lambda = 0.05 + 0.3 * rng.uniform();
    let res = glasso_solve(&GlassoSpec::new(sigma.clone(), lambda), cfg).unwrap();
    let s = res.var("S");
    let recomputed = glasso_value([at(s, 0, 0), at(s, 1, 1), at(s, 0, 1)], &sigma, lambda);
    let bound = 4.0 / (at(&sigma, 0, 0).min(at(&sigma, 1, 1)) * 0.3f64.min(1.0)).max(1e-3);
    let f = |p: &[f64]| glasso_value([p[0], p[1], p[2]], &sigma, lambda);
    let (_, oracle) = grid_then_polish(&f, &[1e-3, 1e-3, -bound], &[bound, bound, bound], 41);
    Outcome { solver: "glasso", seed, reported: res.objective, recomputed, oracle, result: res }
}

/// `R = D Dᵀ`, `L = C Cᵀ` (lower-triangular 2×2 factors), `S = R + L`.
fn lvglasso_value(p: &[f64], sigma: &DenseMatrix, lambda: f64, gamma: f64) -> f64 {
    let r = [p[0] * p[0], p[0] * p[1], p[1] * p[1] + p[2] * p[2]];
    let l = [p[3] * p[3], p[3] * p[4], p[4] * p[4] + p[5] * p[5]];
    let det = det2(r[0], r[1], r[2]);
    if det <= 0.0 {
        return f64::INFINITY;
    }
    let tr_r_sigma = r[0] * at(sigma, 0, 0) + r[2] * at(sigma, 1, 1) + 2.0 * r[1] * at(sigma, 0, 1);
    -det.ln() + tr_r_sigma + 2.0 * lambda * (r[1] + l[1]).abs() + lambda * gamma * (l[0] + l[2])
}

pub fn lvglasso(seed: u64, cfg: &SolverConfig) -> Outcome {
    let mut rng = Prng::derive(seed, &[2]);
    let mut sigma = spd(&mut rng, 2, 0.3);
    // a shared factor pushes the marginal precision toward sparse-minus-low-rank
    let u = [rng.normal(), rng.normal()];
    sigma = sigma.add(&DenseMatrix::outer(&u, &u).scale(0.5)).unwrap();
    let lambda = 0.05 + 0.15 * rng.uniform();
    // with two variables the trace penalty only binds below γ = 1
    let gamma = 0.3 + 0.65 * rng.uniform();
    let res = lvglasso_solve(&LvglassoSpec::new(sigma.clone(), lambda, gamma), cfg).unwrap();
    let (s, l) = (res.var("S"), res.var("L"));
    let recomputed = {
        let r = [at(s, 0, 0) - at(l, 0, 0), at(s, 0, 1) - at(l, 0, 1), at(s, 1, 1) - at(l, 1, 1)];
        let det = det2(r[0], r[1], r[2]);
        -det.ln()
            + r[0] * at(&sigma, 0, 0)
            + r[2] * at(&sigma, 1, 1)
            + 2.0 * r[1] * at(&sigma, 0, 1)
            + 2.0 * lambda * at(s, 0, 1).abs()
            + lambda * gamma * (at(l, 0, 0) + at(l, 1, 1))
    };
    let f = |p: &[f64]| lvglasso_value(p, &sigma, lambda, gamma);
    let b = 3.0;
    let (_, oracle) = grid_then_polish(&f, &[1e-3, -b, 1e-3, -1.5, -1.5, -1.5], &[b, b, b, 1.5, 1.5, 1.5], 8);
    Outcome { solver: "lvglasso", seed, reported: res.objective, recomputed, oracle, result: res }
}

fn rpca_value(l: [f64; 4], m: &[f64; 4], observed: &[bool; 4], lambda: f64) -> f64 {
    nuc2(l) + lambda * (0..4).filter(|&k| observed[k]).map(|k| (m[k] - l[k]).abs()).sum::<f64>()
}

pub fn rpca(seed: u64, cfg: &SolverConfig) -> Outcome {
    let mut rng = Prng::derive(seed, &[3]);
    let m: [f64; 4] = std::array::from_fn(|_| rng.normal());
    let hole = rng.below(4);
    let observed: [bool; 4] = std::array::from_fn(|k| k != hole);
    let lambda = 0.4 + 0.6 * rng.uniform();
    let spec = RpcaSpec::new(
        DenseMatrix::new(2, 2, m.to_vec()).unwrap(),
        Mask::new(2, 2, observed.to_vec()).unwrap(),
        Some(lambda),
    );
    let res = rpca_solve(&spec, cfg).unwrap();
    let l: [f64; 4] = res.var("L").as_slice().try_into().unwrap();
    let recomputed = nuc2(l) + lambda * res.var("S").as_slice().iter().map(|v| v.abs()).sum::<f64>();
    let b = 2.0 * m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let f = |p: &[f64]| rpca_value([p[0], p[1], p[2], p[3]], &m, &observed, lambda);
    let (_, oracle) = grid_then_polish(&f, &[-b; 4], &[b; 4], 21);
    Outcome { solver: "rpca", seed, reported: res.objective, recomputed, oracle, result: res }
}

fn solve3(a: [[f64; 3]; 3], rhs: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(a);
    if d.abs() < 1e-12 {
        return None;
    }
    Some(std::array::from_fn(|c| {
        let mut m = a;
        for r in 0..3 {
            m[r][c] = rhs[r];
        }
        det(m) / d
    }))
}

pub fn regression(seed: u64, cfg: &SolverConfig) -> Outcome {
    let mut rng = Prng::derive(seed, &[4]);
    let x: [[f64; 3]; 2] = std::array::from_fn(|_| std::array::from_fn(|_| rng.normal()));
    let y: [f64; 2] = std::array::from_fn(|_| rng.normal());
    let lambda = 0.5 + 1.5 * rng.uniform();
    let value = |b: &[f64]| {
        let resid: f64 = (0..2).map(|i| (y[i] - (0..3).map(|j| x[i][j] * b[j]).sum::<f64>()).abs()).sum();
        b.iter().map(|v| v.abs()).sum::<f64>() + lambda * resid
    };
    let spec = RobustRegressionSpec {
        x: DenseMatrix::from_rows(&x.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap(),
        y: y.to_vec(),
        lambda,
    };
    let res = robust_regression_solve(&spec, cfg).unwrap();
    let b_hat = res.var("b").as_slice().to_vec();
    let recomputed = value(&b_hat);
    let bound = 2.0 * (y[0].abs() + y[1].abs()) + 1.0;
    let (_, mut oracle) = grid_then_polish(&value, &[-bound; 3], &[bound; 3], 41);
    // the objective is piecewise linear, so its minimum sits on a vertex of
    // the arrangement {b_j = 0} ∪ {(Xb)_i = y_i}; checking every vertex
    // finishes the refinement exactly
    let mut planes: Vec<([f64; 3], f64)> =
        (0..3).map(|j| (std::array::from_fn(|k| (k == j) as u8 as f64), 0.0)).collect();
    planes.extend((0..2).map(|i| (x[i], y[i])));
    for a in 0..5 {
        for b in a + 1..5 {
            for c in b + 1..5 {
                if let Some(v) =
                    solve3([planes[a].0, planes[b].0, planes[c].0], [planes[a].1, planes[b].1, planes[c].1])
                {
                    oracle = oracle.min(value(&v));
                }
            }
        }
    }
    Outcome { solver: "robust_regression", seed, reported: res.objective, recomputed, oracle, result: res }
}

pub fn cs_lps(seed: u64, cfg: &SolverConfig) -> Outcome {
    let mut rng = Prng::derive(seed, &[5]);
    let truth: [f64; 4] = std::array::from_fn(|_| rng.normal());
    let hole = rng.below(4);
    let observed: Vec<usize> = (0..4).filter(|&k| k != hole).collect();
    let y: Vec<f64> = observed.iter().map(|&k| truth[k] + 0.05 * rng.normal()).collect();
    let ynorm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let eps = 0.2 * ynorm;
    let lambda = 0.2 + 0.8 * rng.uniform();
    let th = rng.uniform() * std::f64::consts::PI;
    let w = [th.cos(), -th.sin(), th.sin(), th.cos()];
    let f = haar_matrix(2).unwrap();
    let fv = f.as_slice().to_vec();
    let objective = |x: [f64; 4]| {
        let wx = [
            w[0] * x[0] + w[1] * x[2],
            w[0] * x[1] + w[1] * x[3],
            w[2] * x[0] + w[3] * x[2],
            w[2] * x[1] + w[3] * x[3],
        ];
        let wxf = [
            wx[0] * fv[0] + wx[1] * fv[2],
            wx[0] * fv[1] + wx[1] * fv[3],
            wx[2] * fv[0] + wx[3] * fv[2],
            wx[2] * fv[1] + wx[3] * fv[3],
        ];
        nuc2(x) + lambda * wxf.iter().map(|v| v.abs()).sum::<f64>()
    };
    let spec = CsLpsSpec {
        op: SamplingOperator::entries(Mask::new(2, 2, (0..4).map(|k| k != hole).collect()).unwrap()).unwrap(),
        y: y.clone(),
        eps,
        w: DenseMatrix::new(2, 2, w.to_vec()).unwrap(),
        f,
        lambda,
        mode: CsMode::Single,
    };
    let res = cs_lps_solve(&spec, cfg).unwrap();
    let recomputed = objective(res.var("X").as_slice().try_into().unwrap());
    // free unobserved entry plus a point of the measurement ball
    let value = |p: &[f64]| {
        let n = (p[1] * p[1] + p[2] * p[2] + p[3] * p[3]).sqrt();
        let s = eps / n.max(1.0);
        let mut x = [0.0; 4];
        x[hole] = p[0];
        for (k, &idx) in observed.iter().enumerate() {
            x[idx] = y[k] + s * p[1 + k];
        }
        objective(x)
    };
    let b = 3.0 * ynorm + 1.0;
    let (_, oracle) = grid_then_polish(&value, &[-b, -1.0, -1.0, -1.0], &[b, 1.0, 1.0, 1.0], 21);
    Outcome { solver: "cs_lps", seed, reported: res.objective, recomputed, oracle, result: res }
}

/// Background mode with full sampling and `ε = 0`: `X = M` is forced and the
/// free scalars are the entries of `L`, with `S = M − L`.
pub fn cs_lps_background(seed: u64, cfg: &SolverConfig) -> Outcome {
    let mut rng = Prng::derive(seed, &[7]);
    let m: [f64; 4] = std::array::from_fn(|_| rng.normal());
    let lambda = 0.3 + 1.5 * rng.uniform();
    let th = rng.uniform() * std::f64::consts::PI;
    let w = [th.cos(), -th.sin(), th.sin(), th.cos()];
    let f = haar_matrix(2).unwrap();
    let fv = f.as_slice().to_vec();
    let tl1 = |x: [f64; 4]| {
        let wx = [
            w[0] * x[0] + w[1] * x[2],
            w[0] * x[1] + w[1] * x[3],
            w[2] * x[0] + w[3] * x[2],
            w[2] * x[1] + w[3] * x[3],
        ];
        let wxf = [
            wx[0] * fv[0] + wx[1] * fv[2],
            wx[0] * fv[1] + wx[1] * fv[3],
            wx[2] * fv[0] + wx[3] * fv[2],
            wx[2] * fv[1] + wx[3] * fv[3],
        ];
        wxf.iter().map(|v| v.abs()).sum::<f64>()
    };
    let spec = CsLpsSpec {
        op: SamplingOperator::entries(Mask::full(2, 2)).unwrap(),
        y: m.to_vec(),
        eps: 0.0,
        w: DenseMatrix::new(2, 2, w.to_vec()).unwrap(),
        f,
        lambda,
        mode: CsMode::BackgroundInnovation,
    };
    let res = cs_lps_solve(&spec, cfg).unwrap();
    let l: [f64; 4] = res.var("L").as_slice().try_into().unwrap();
    let s: [f64; 4] = res.var("S").as_slice().try_into().unwrap();
    let recomputed = lambda * nuc2(l) + tl1(s);
    let value = |p: &[f64]| lambda * nuc2([p[0], p[1], p[2], p[3]]) + tl1(std::array::from_fn(|k| m[k] - p[k]));
    let b = 2.0 * m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let (_, oracle) = grid_then_polish(&value, &[-b; 4], &[b; 4], 21);
    Outcome { solver: "cs_lps_background", seed, reported: res.objective, recomputed, oracle, result: res }
}

pub fn clique(seed: u64, cfg: &SolverConfig) -> Outcome {
    let mut rng = Prng::derive(seed, &[6]);
    // 3 vertices, k = 2: a random graph that always keeps edge 0–1
    let pairs = [(0usize, 1usize), (0, 2), (1, 2)];
    let edges: Vec<(usize, usize)> =
        pairs.iter().copied().filter(|&(i, j)| (i, j) == (0, 1) || rng.bernoulli(0.5)).collect();
    let lambda = 0.2 + 0.4 * rng.uniform();
    let k = 2usize;
    let mut adj = DenseMatrix::identity(3);
    for &(i, j) in &edges {
        adj.as_mut_slice()[i * 3 + j] = 1.0;
        adj.as_mut_slice()[j * 3 + i] = 1.0;
    }
    let objective = |x: &[[f64; 3]; 3]| {
        eig3(x).iter().map(|e| e.abs()).sum::<f64>() + lambda * x.iter().flatten().map(|v| v.abs()).sum::<f64>()
    };
    let res = planted_clique_solve(&PlantedCliqueSpec { adjacency: adj, k, lambda }, cfg).unwrap();
    let xs = res.var("X");
    let recomputed = objective(&std::array::from_fn(|i| std::array::from_fn(|j| at(xs, i, j))));
    // free scalars: x00, x11, one per edge; x22 closes the sum constraint
    let value = |p: &[f64]| {
        let mut x = [[0.0; 3]; 3];
        x[0][0] = p[0];
        x[1][1] = p[1];
        let mut total = p[0] + p[1];
        for (e, &(i, j)) in edges.iter().enumerate() {
            x[i][j] = p[2 + e];
            x[j][i] = p[2 + e];
            total += 2.0 * p[2 + e];
        }
        x[2][2] = (k * k) as f64 - total;
        objective(&x)
    };
    let d = 2 + edges.len();
    let points = if d == 5 { 11 } else { 17 };
    let (_, oracle) = grid_then_polish(&value, &vec![-1.0; d], &vec![3.0; d], points);
    Outcome { solver: "planted_clique", seed, reported: res.objective, recomputed, oracle, result: res }
}

pub fn all(seed: u64, cfg: &SolverConfig) -> Vec<Outcome> {
    vec![
        glasso(seed, cfg),
        lvglasso(seed, cfg),
        rpca(seed, cfg),
        regression(seed, cfg),
        cs_lps(seed, cfg),
        cs_lps_background(seed, cfg),
        clique(seed, cfg),
    ]
}
