//! Helpers shared by the integration tests: random inputs and independent
//! derivative-free minimizers used as oracles.

#![allow(dead_code)]

use lslab::synth::Prng;
use lslab::DenseMatrix;

pub fn gaussian(rng: &mut Prng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.normal())
}

pub fn symmetric(rng: &mut Prng, n: usize) -> DenseMatrix {
    let g = gaussian(rng, n, n);
    DenseMatrix::from_fn(n, n, |i, j| 0.5 * (g[(i, j)] + g[(j, i)]))
}

/// `G Gᵀ / n + shift·I`.
pub fn spd(rng: &mut Prng, n: usize, shift: f64) -> DenseMatrix {
    let g = gaussian(rng, n, n);
    DenseMatrix::from_fn(n, n, |i, j| {
        let d: f64 = (0..n).map(|k| g[(i, k)] * g[(j, k)]).sum();
        d / n as f64 + if i == j { shift } else { 0.0 }
    })
}

/// Random orthogonal matrix by modified Gram–Schmidt on a Gaussian matrix.
pub fn orthogonal(rng: &mut Prng, n: usize) -> DenseMatrix {
    let g = gaussian(rng, n, n);
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for j in 0..n {
        let mut v = g.col(j);
        for _ in 0..2 {
            for q in &cols {
                let d: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= d * y;
                }
            }
        }
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|x| x / nv).collect());
    }
    DenseMatrix::from_fn(n, n, |i, j| cols[j][i])
}

pub fn max_abs_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn frob_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

pub fn matmul(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    assert_eq!(a.cols(), b.rows());
    DenseMatrix::from_fn(a.rows(), b.cols(), |i, j| (0..a.cols()).map(|k| a[(i, k)] * b[(k, j)]).sum())
}

/// Root of a monotone scalar function on `[lo, hi]` by bisection.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    assert!(flo * f(hi) <= 0.0, "bracket does not straddle a root");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) <= 0.0) == (flo <= 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Nelder–Mead from `x0` with initial simplex edge `step`, until the simplex
/// spread in value and size collapses.
pub fn nelder_mead(f: &dyn Fn(&[f64]) -> f64, x0: &[f64], step: f64, max_evals: usize) -> (Vec<f64>, f64) {
    let d = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..d {
        let mut x = x0.to_vec();
        x[i] += step;
        simplex.push(x);
    }
    let mut vals: Vec<f64> = simplex.iter().map(|x| f(x)).collect();
    let mut evals = d + 1;
    while evals < max_evals {
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        let size = simplex[1..]
            .iter()
            .map(|x| x.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if size < 1e-14 || (vals[d] - vals[0]).abs() <= 1e-16 * vals[0].abs().max(1.0) && size < 1e-10 {
            break;
        }
        let centroid: Vec<f64> = (0..d).map(|k| simplex[..d].iter().map(|x| x[k]).sum::<f64>() / d as f64).collect();
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&simplex[d]).map(|(c, w)| c + t * (c - w)).collect() };
        let xr = along(1.0);
        let fr = f(&xr);
        evals += 1;
        if fr < vals[0] {
            let xe = along(2.0);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                simplex[d] = xe;
                vals[d] = fe;
            } else {
                simplex[d] = xr;
                vals[d] = fr;
            }
        } else if fr < vals[d - 1] {
            simplex[d] = xr;
            vals[d] = fr;
        } else {
            let (xc, fc) = if fr < vals[d] {
                let x = along(0.5);
                let v = f(&x);
                (x, v)
            } else {
                let x = along(-0.5);
                let v = f(&x);
                (x, v)
            };
            evals += 1;
            if fc < vals[d].min(fr) {
                simplex[d] = xc;
                vals[d] = fc;
            } else {
                for i in 1..=d {
                    let x: Vec<f64> = simplex[i].iter().zip(&simplex[0]).map(|(a, b)| b + 0.5 * (a - b)).collect();
                    vals[i] = f(&x);
                    simplex[i] = x;
                }
                evals += d;
            }
        }
    }
    let best = (0..=d).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    (simplex[best].clone(), vals[best])
}

/// Repeated Nelder–Mead restarts with shrinking simplex, stopping when a
/// full sweep no longer improves the value.
pub fn polish(f: &dyn Fn(&[f64]) -> f64, x0: &[f64], scale: f64) -> (Vec<f64>, f64) {
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    for _ in 0..30 {
        let before = fx;
        let mut step = scale;
        while step > 1e-9 * scale {
            let (y, fy) = nelder_mead(f, &x, step, 20_000);
            if fy < fx {
                x = y;
                fx = fy;
            }
            step *= 0.2;
        }
        if before - fx <= 1e-15 * fx.abs().max(1.0) {
            break;
        }
    }
    (x, fx)
}

/// Dense grid over the box `[lo, hi]^d` with `points` per axis, followed by
/// [`polish`] from the best few grid points.
pub fn grid_then_polish(f: &dyn Fn(&[f64]) -> f64, lo: &[f64], hi: &[f64], points: usize) -> (Vec<f64>, f64) {
    let d = lo.len();
    let total = points.pow(d as u32);
    let mut scored: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut x = vec![0.0; d];
    for idx in 0..total {
        let mut rem = idx;
        for k in 0..d {
            let t = (rem % points) as f64 / (points - 1) as f64;
            rem /= points;
            x[k] = lo[k] + t * (hi[k] - lo[k]);
        }
        let v = f(&x);
        if v.is_finite() {
            scored.push((v, x.clone()));
        }
    }
    assert!(!scored.is_empty(), "grid contains no finite point");
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let scale = lo.iter().zip(hi).map(|(a, b)| (b - a) / points as f64).fold(0.0, f64::max);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for (_, start) in scored.iter().take(4) {
        let (y, fy) = polish(f, start, scale);
        if best.as_ref().is_none_or(|b| fy < b.1) {
            best = Some((y, fy));
        }
    }
    best.unwrap()
}

pub fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

pub mod oracles;
pub mod prox_suite;
