//! Symmetric eigendecomposition: Householder reduction to tridiagonal form
//! followed by the implicit QL iteration.
//!
//! Both phases operate on the transpose of the usual column-oriented working
//! matrix, so every inner loop walks a contiguous row. For symmetric input the
//! transpose is the matrix itself, and on exit row `i` of the working matrix is
//! the eigenvector for `d[i]`.

use crate::error::Result;
use crate::matrix::DenseMatrix;

/// Eigenpairs of a symmetric matrix, eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub eigenvalues: Vec<f64>,
    /// Columns are the unit eigenvectors, in the order of `eigenvalues`.
    pub eigenvectors: DenseMatrix,
}

impl SymEigen {
    /// `Q · diag(f(λ)) · Qᵀ`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> DenseMatrix {
        let n = self.eigenvalues.len();
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        spectral_sum(&self.eigenvectors, &weights, n)
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        self.reconstruct_with(|l| l)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// `Σ_k w_k q_k q_kᵀ` over the columns `q_k` of `q` with nonzero weight.
pub(crate) fn spectral_sum(q: &DenseMatrix, weights: &[f64], n: usize) -> DenseMatrix {
    let active: Vec<usize> = (0..weights.len()).filter(|&k| weights[k] != 0.0).collect();
    let mut out = DenseMatrix::zeros(n, n);
    if active.is_empty() {
        return out;
    }
    // Gather the active columns once as contiguous rows.
    let cols: Vec<Vec<f64>> = active.iter().map(|&k| q.col(k)).collect();
    for i in 0..n {
        let row = out.row_mut(i);
        for (c, &k) in cols.iter().zip(&active) {
            let s = weights[k] * c[i];
            if s == 0.0 {
                continue;
            }
            for j in i..n {
                row[j] += s * c[j];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            out[(i, j)] = out[(j, i)];
        }
    }
    out
}

/// Eigendecomposition of a symmetric matrix.
///
/// Input must be square, finite and symmetric to `1e-10` relative; it is
/// symmetrized before factoring. Output is deterministic: eigenvalues are
/// sorted descending (stable on ties) and each eigenvector has its first
/// nonzero entry positive.
pub fn sym_eig(a: &DenseMatrix) -> Result<SymEigen> {
    let a = a.checked_symmetric()?;
    Ok(sym_eig_unchecked(&a))
}

pub(crate) fn sym_eig_unchecked(a: &DenseMatrix) -> SymEigen {
    let n = a.rows();
    let mut w = a.as_slice().to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut w, &mut d, &mut e, n);
    ql_implicit(&mut w, &mut d, &mut e, n);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut q = DenseMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let v = &w[src * n..(src + 1) * n];
        let flip = v.iter().find(|x| **x != 0.0).is_some_and(|x| *x < 0.0);
        for (i, &x) in v.iter().enumerate() {
            q[(i, col)] = if flip { -x } else { x };
        }
    }
    SymEigen { eigenvalues, eigenvectors: q }
}

#[inline]
fn at(w: &[f64], n: usize, r: usize, c: usize) -> f64 {
    w[r * n + c]
}

/// Householder tridiagonalization with accumulation of the transforms.
/// `w` holds `Vᵀ` of the column-oriented formulation.
fn tridiagonalize(w: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize) {
    // V[r][c] == w[c * n + r]
    for j in 0..n {
        d[j] = at(w, n, j, n - 1);
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = at(w, n, j, i - 1);
                w[j * n + i] = 0.0;
                w[i * n + j] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                w[i * n + j] = f;
                g = e[j] + at(w, n, j, j) * f;
                let row_j = &w[j * n..j * n + i];
                for k in (j + 1)..i {
                    let v = row_j[k];
                    g += v * d[k];
                    e[k] += v * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let f = d[j];
                let g = e[j];
                let row_j = &mut w[j * n..j * n + i];
                for k in j..i {
                    row_j[k] -= f * e[k] + g * d[k];
                }
                d[j] = at(w, n, j, i - 1);
                w[j * n + i] = 0.0;
            }
        }
        d[i] = h;
    }

    // Accumulate transformations.
    for i in 0..n.saturating_sub(1) {
        w[i * n + (n - 1)] = at(w, n, i, i);
        w[i * n + i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            let (head, tail) = w.split_at_mut((i + 1) * n);
            let u = &tail[..=i];
            for k in 0..=i {
                d[k] = u[k] / h;
            }
            for j in 0..=i {
                let row_j = &mut head[j * n..j * n + i + 1];
                let g: f64 = u.iter().zip(row_j.iter()).map(|(a, b)| a * b).sum();
                for (x, dk) in row_j.iter_mut().zip(d.iter()) {
                    *x -= g * dk;
                }
            }
        }
        for k in 0..=i {
            w[(i + 1) * n + k] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = at(w, n, j, n - 1);
        w[j * n + (n - 1)] = 0.0;
    }
    w[(n - 1) * n + (n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL on the tridiagonal `(d, e)`, rotating the rows of `w`.
fn ql_implicit(w: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize) {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    let (lo, hi) = w.split_at_mut((i + 1) * n);
                    let vi = &mut lo[i * n..];
                    let vi1 = &mut hi[..n];
                    for (a, b) in vi.iter_mut().zip(vi1.iter_mut()) {
                        let hb = *b;
                        *b = s * *a + c * hb;
                        *a = c * *a - s * hb;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 || iter >= 64 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn max_dev_from_identity(m: &DenseMatrix) -> f64 {
        let n = m.rows();
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let t = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((m[(i, j)] - t).abs());
            }
        }
        dev
    }

    #[test]
    fn identity_spectrum() {
        let eig = sym_eig(&DenseMatrix::identity(3)).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 1.0, 1.0]);
        assert!((eig.reconstruct().sub(&DenseMatrix::identity(3)).unwrap()).max_abs() < 1e-15);
    }

    #[test]
    fn diagonal_spectrum() {
        let eig = sym_eig(&DenseMatrix::diag(&[5.0, -2.0])).unwrap();
        assert_eq!(eig.eigenvalues, vec![5.0, -2.0]);
        let q = &eig.eigenvectors;
        assert!((q[(0, 0)].abs() - 1.0).abs() < 1e-15 && q[(1, 0)].abs() < 1e-15);
        assert!((q[(1, 1)].abs() - 1.0).abs() < 1e-15 && q[(0, 1)].abs() < 1e-15);
    }

    #[test]
    fn two_by_two_closed_form() {
        let a = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let eig = sym_eig(&a).unwrap();
        assert!((eig.eigenvalues[0] - 3.0).abs() < 1e-14);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-14);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let q = &eig.eigenvectors;
        assert!((q[(0, 0)] - r).abs() < 1e-14 && (q[(1, 0)] - r).abs() < 1e-14);
        // first nonzero entry positive
        assert!((q[(0, 1)] - r).abs() < 1e-14 && (q[(1, 1)] + r).abs() < 1e-14);
    }

    #[test]
    fn orthogonality_and_reconstruction() {
        let n = 40;
        let a = DenseMatrix::from_fn(n, n, |i, j| {
            let (i, j) = (i.min(j) as f64, i.max(j) as f64);
            ((i * 1.3 + j * 0.7).sin() * 3.0).round() / 2.0
        });
        let eig = sym_eig(&a).unwrap();
        let q = &eig.eigenvectors;
        assert!(max_dev_from_identity(&q.tr_mul(q)) <= 1e-10);
        let err = eig.reconstruct().sub(&a).unwrap().frobenius_norm();
        assert!(err <= 1e-8 * a.frobenius_norm().max(1.0));
        assert!(eig.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn rejects_bad_input() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(sym_eig(&a), Err(Error::NotSymmetric(_))));
        let mut b = DenseMatrix::identity(2);
        b[(0, 0)] = f64::INFINITY;
        assert_eq!(sym_eig(&b).unwrap_err(), Error::NotFinite);
    }

    #[test]
    fn one_by_one() {
        let eig = sym_eig(&DenseMatrix::diag(&[-4.0])).unwrap();
        assert_eq!(eig.eigenvalues, vec![-4.0]);
        assert_eq!(eig.eigenvectors[(0, 0)], 1.0);
    }
}
