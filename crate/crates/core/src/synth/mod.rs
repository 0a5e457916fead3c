//! Seeded generators for every synthetic instance family, each returned
//! together with its ground truth.

mod prng;
mod sampling;

pub use prng::{mix64, Prng, PRNG_ID};
pub use sampling::{gen_sampling_operator, SamplingOperator};

use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, spd_inverse, svd, Cholesky};
use crate::mask::Mask;
use crate::matrix::DenseMatrix;

/// Gaussian model with `h` hidden variables marginalized out of `p` observed
/// ones. `s_star − l_star` is the marginal concentration of the observed block.
#[derive(Debug, Clone)]
pub struct LatentModel {
    pub p: usize,
    pub h: usize,
    pub k_full: DenseMatrix,
    /// Conditional concentration of the observed variables given the hidden.
    pub s_star: DenseMatrix,
    /// `K_OH K_H⁻¹ K_HO`, PSD with rank at most `h`.
    pub l_star: DenseMatrix,
    pub sigma_obs: DenseMatrix,
}

/// Builds the joint precision matrix
///
/// ```text
///          ⎡ I + E     B ⎤
/// K_full = ⎢             ⎥ + c·I
///          ⎣   Bᵀ      I ⎦
/// ```
///
/// where `E` is symmetric with entries `±strength/degree` on a random graph of
/// maximum degree `degree`, `B` is `p × h` Gaussian scaled by `strength/√h`,
/// and `c` is the smallest multiple of `0.1` giving `λ_min(K_full) ≥ 1e-3`.
pub fn gen_latent_model(p: usize, h: usize, degree: usize, strength: f64, rng: &mut Prng) -> Result<LatentModel> {
    if p < 2 || 4 * h > p || degree == 0 || degree >= p {
        return Err(Error::InvalidShape(format!("latent model p={p}, h={h}, degree={degree}")));
    }
    if !(strength > 0.0 && strength < 1.0) {
        return Err(Error::InvalidParameter(format!("strength must lie in (0,1), got {strength}")));
    }
    let mut pairs: Vec<(usize, usize)> = (0..p).flat_map(|i| ((i + 1)..p).map(move |j| (i, j))).collect();
    rng.shuffle(&mut pairs);
    let mut deg = vec![0usize; p];
    let mut k_obs = DenseMatrix::identity(p);
    let mag = strength / degree as f64;
    for (i, j) in pairs {
        if deg[i] < degree && deg[j] < degree {
            deg[i] += 1;
            deg[j] += 1;
            let v = rng.sign() * mag;
            k_obs[(i, j)] = v;
            k_obs[(j, i)] = v;
        }
    }
    let q = p + h;
    let mut k_full = DenseMatrix::identity(q);
    for i in 0..p {
        for j in 0..p {
            k_full[(i, j)] = k_obs[(i, j)];
        }
    }
    if h > 0 {
        let scale = strength / (h as f64).sqrt();
        for i in 0..p {
            for j in 0..h {
                let v = rng.normal() * scale;
                k_full[(i, p + j)] = v;
                k_full[(p + j, i)] = v;
            }
        }
    }
    let base_min = min_eigenvalue(&k_full);
    let mut steps = 0u32;
    while base_min + 0.1 * f64::from(steps) < 1e-3 {
        steps += 1;
    }
    let c = 0.1 * f64::from(steps);
    for i in 0..q {
        k_full[(i, i)] += c;
    }

    let s_star = DenseMatrix::from_fn(p, p, |i, j| k_full[(i, j)]);
    let l_star = if h == 0 {
        DenseMatrix::zeros(p, p)
    } else {
        let b = DenseMatrix::from_fn(p, h, |i, j| k_full[(i, p + j)]);
        let k_h = DenseMatrix::from_fn(h, h, |i, j| k_full[(p + i, p + j)]);
        let chol = Cholesky::new(&k_h)?;
        // B K_H⁻¹ Bᵀ
        let mut kinv_bt = DenseMatrix::zeros(h, p);
        for i in 0..p {
            let x = chol.solve(b.row(i));
            for (r, v) in x.into_iter().enumerate() {
                kinv_bt[(r, i)] = v;
            }
        }
        b.matmul(&kinv_bt)?.symmetrize()
    };
    let full_inv = spd_inverse(&k_full)?;
    let sigma_obs = DenseMatrix::from_fn(p, p, |i, j| full_inv[(i, j)]);
    Ok(LatentModel { p, h, k_full, s_star, l_star, sigma_obs })
}

/// Empirical covariance `(1/n) Σ xᵢxᵢᵀ` of `n` zero-mean Gaussian draws with
/// covariance `sigma`.
pub fn sample_empirical_cov(sigma: &DenseMatrix, n: usize, rng: &mut Prng) -> Result<DenseMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    let chol = Cholesky::new(sigma)?;
    let l = chol.factor();
    let p = sigma.rows();
    let mut acc = DenseMatrix::zeros(p, p);
    let mut z = vec![0.0; p];
    let mut x = vec![0.0; p];
    for _ in 0..n {
        for zi in z.iter_mut() {
            *zi = rng.normal();
        }
        for i in 0..p {
            x[i] = (0..=i).map(|k| l[(i, k)] * z[k]).sum();
        }
        for i in 0..p {
            let xi = x[i];
            let row = acc.row_mut(i);
            for j in i..p {
                row[j] += xi * x[j];
            }
        }
    }
    let inv_n = 1.0 / n as f64;
    for i in 0..p {
        for j in i..p {
            let v = acc[(i, j)] * inv_n;
            acc[(i, j)] = v;
            acc[(j, i)] = v;
        }
    }
    Ok(acc)
}

/// Low-rank plus sparse observation model `M = L0 + S0`.
#[derive(Debug, Clone)]
pub struct LowRankSparse {
    pub l0: DenseMatrix,
    pub s0: DenseMatrix,
    pub m: DenseMatrix,
    pub mask: Mask,
}

/// `L0 = U Vᵀ` from Gaussian factors, normalized to unit spectral norm;
/// `S0` has i.i.d. support of density `sparsity` with entries `±‖L0‖_max`.
pub fn gen_lowrank_sparse(n1: usize, n2: usize, r: usize, sparsity: f64, rng: &mut Prng) -> Result<LowRankSparse> {
    if n1 == 0 || n2 == 0 || r == 0 || r > n1.min(n2) {
        return Err(Error::InvalidShape(format!("{n1}x{n2} matrix of rank {r}")));
    }
    if !(0.0..1.0).contains(&sparsity) {
        return Err(Error::InvalidParameter(format!("sparsity must lie in [0,1), got {sparsity}")));
    }
    let u = DenseMatrix::from_fn(n1, r, |_, _| rng.normal());
    let v = DenseMatrix::from_fn(n2, r, |_, _| rng.normal());
    let prod = u.mul_tr(&v);
    let top = svd(&prod)?.singular_values[0];
    let l0 = prod.scale(1.0 / top);
    let mag = l0.max_abs();
    let mut s0 = DenseMatrix::zeros(n1, n2);
    for x in s0.as_mut_slice() {
        if rng.bernoulli(sparsity) {
            *x = rng.sign() * mag;
        }
    }
    let m = l0.add(&s0)?;
    Ok(LowRankSparse { l0, s0, m, mask: Mask::full(n1, n2) })
}

/// Random graph with a planted clique.
#[derive(Debug, Clone)]
pub struct PlantedCliqueInstance {
    /// Symmetric 0/1 adjacency with unit diagonal.
    pub adjacency: DenseMatrix,
    /// Sorted vertex indices of the planted clique.
    pub clique: Vec<usize>,
}

/// `G(n, 1/2)` with a uniformly placed `k`-clique.
pub fn gen_planted_clique(n: usize, k: usize, rng: &mut Prng) -> Result<PlantedCliqueInstance> {
    if k < 2 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let clique = rng.subset(n, k);
    let mut member = vec![false; n];
    for &c in &clique {
        member[c] = true;
    }
    let mut a = DenseMatrix::identity(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let edge = if member[i] && member[j] { true } else { rng.next_u64() >> 63 == 1 };
            if edge {
                a[(i, j)] = 1.0;
                a[(j, i)] = 1.0;
            }
        }
    }
    Ok(PlantedCliqueInstance { adjacency: a, clique })
}

/// Static rank-one background plus an innovation that is sparse in the
/// `(W, F)` transform domain: `S0 = Wᵀ C Fᵀ` with `C` of the given density.
#[derive(Debug, Clone)]
pub struct BackgroundInnovation {
    pub l0: DenseMatrix,
    pub s0: DenseMatrix,
    /// Transform-domain coefficients of `s0`.
    pub coeffs: DenseMatrix,
}

pub fn gen_background_innovation(
    w: &DenseMatrix,
    f: &DenseMatrix,
    density: f64,
    rng: &mut Prng,
) -> Result<BackgroundInnovation> {
    let (n1, n2) = (w.rows(), f.rows());
    if !w.is_square() || !f.is_square() {
        return Err(Error::InvalidShape("transforms must be square".into()));
    }
    if !(0.0..1.0).contains(&density) {
        return Err(Error::InvalidParameter(format!("density must lie in [0,1), got {density}")));
    }
    let image: Vec<f64> = (0..n1).map(|_| 1.0 + 0.5 * rng.normal()).collect();
    let frames = vec![1.0; n2];
    let l0 = DenseMatrix::outer(&image, &frames);
    let scale = l0.max_abs();
    let mut coeffs = DenseMatrix::zeros(n1, n2);
    for x in coeffs.as_mut_slice() {
        if rng.bernoulli(density) {
            *x = rng.sign() * scale * (0.5 + 0.5 * rng.uniform());
        }
    }
    let s0 = w.tr_mul(&coeffs).mul_tr(f);
    Ok(BackgroundInnovation { l0, s0, coeffs })
}
