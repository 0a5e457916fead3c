//! Thin singular value decomposition by Householder bidiagonalization and
//! implicit-shift QR on the bidiagonal (Golub–Kahan–Reinsch).
//!
//! The working arrays hold transposes (`at = Aᵀ`, `ut = Uᵀ`, `vt = Vᵀ`) so the
//! column sweeps of the classical formulation run along contiguous rows.

use crate::error::Result;
use crate::matrix::DenseMatrix;

#[derive(Debug, Clone)]
pub struct Svd {
    /// `m × r` with orthonormal columns, `r = min(m, n)`.
    pub u: DenseMatrix,
    /// Descending, nonnegative.
    pub singular_values: Vec<f64>,
    /// `n × r` with orthonormal columns.
    pub v: DenseMatrix,
}

impl Svd {
    /// `U · diag(f(σ)) · Vᵀ`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> DenseMatrix {
        let (m, n) = (self.u.rows(), self.v.rows());
        let mut out = DenseMatrix::zeros(m, n);
        for (k, &s) in self.singular_values.iter().enumerate() {
            let w = f(s);
            if w == 0.0 {
                continue;
            }
            let vk = self.v.col(k);
            for i in 0..m {
                let a = w * self.u[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out.row_mut(i).iter_mut().zip(&vk) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        self.reconstruct_with(|s| s)
    }

    pub fn nuclear_norm(&self) -> f64 {
        self.singular_values.iter().sum()
    }

    /// Number of singular values above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.singular_values.iter().filter(|&&s| s > tol).count()
    }
}

/// Thin SVD of a finite matrix. Each right singular vector is oriented so its
/// first nonzero entry is positive.
pub fn svd(a: &DenseMatrix) -> Result<Svd> {
    a.ensure_finite()?;
    Ok(svd_unchecked(a))
}

pub(crate) fn svd_unchecked(a: &DenseMatrix) -> Svd {
    let (m, n) = a.shape();
    let (mut out, transposed) = if m >= n {
        (golub_kahan(a.transpose().as_slice(), m, n), false)
    } else {
        (golub_kahan(a.as_slice(), n, m), true)
    };
    if transposed {
        std::mem::swap(&mut out.0, &mut out.2);
    }
    let (u_rows, s, v_rows) = out;
    // u_rows: r rows of length m; v_rows: r rows of length n
    let r = s.len();
    let mut u = DenseMatrix::zeros(m, r);
    let mut v = DenseMatrix::zeros(n, r);
    for k in 0..r {
        let vk = &v_rows[k];
        let flip = vk.iter().find(|x| **x != 0.0).is_some_and(|x| *x < 0.0);
        let sign = if flip { -1.0 } else { 1.0 };
        for i in 0..n {
            v[(i, k)] = sign * vk[i];
        }
        for i in 0..m {
            u[(i, k)] = sign * u_rows[k][i];
        }
    }
    Svd { u, singular_values: s, v }
}

/// Core routine for an `m × n` matrix with `m ≥ n`, given its transpose
/// row-major (`n` rows of length `m`). Returns `(Uᵀ rows, σ, Vᵀ rows)`.
#[allow(clippy::many_single_char_names)]
fn golub_kahan(at_in: &[f64], m: usize, n: usize) -> (Vec<Vec<f64>>, Vec<f64>, Vec<Vec<f64>>) {
    debug_assert!(m >= n);
    let mut at: Vec<Vec<f64>> = at_in.chunks(m).map(<[f64]>::to_vec).collect();
    let nu = n;
    let mut s = vec![0.0f64; (m + 1).min(n)];
    let mut ut = vec![vec![0.0; m]; nu];
    let mut vt = vec![vec![0.0; n]; n];
    let mut e = vec![0.0f64; n];
    let mut work = vec![0.0; m];

    let nct = (m - 1).min(n);
    let nrt = n.saturating_sub(2).min(m);
    for k in 0..nct.max(nrt) {
        if k < nct {
            s[k] = 0.0;
            for i in k..m {
                s[k] = s[k].hypot(at[k][i]);
            }
            if s[k] != 0.0 {
                if at[k][k] < 0.0 {
                    s[k] = -s[k];
                }
                let sk = s[k];
                for x in &mut at[k][k..m] {
                    *x /= sk;
                }
                at[k][k] += 1.0;
            }
            s[k] = -s[k];
        }
        for j in (k + 1)..n {
            if k < nct && s[k] != 0.0 {
                let (head, tail) = at.split_at_mut(j);
                let colk = &head[k];
                let colj = &mut tail[0];
                let mut t = 0.0;
                for i in k..m {
                    t += colk[i] * colj[i];
                }
                t = -t / colk[k];
                for i in k..m {
                    colj[i] += t * colk[i];
                }
            }
            e[j] = at[j][k];
        }
        if k < nct {
            ut[k][k..m].copy_from_slice(&at[k][k..m]);
        }
        if k < nrt {
            e[k] = 0.0;
            for i in (k + 1)..n {
                e[k] = e[k].hypot(e[i]);
            }
            if e[k] != 0.0 {
                if e[k + 1] < 0.0 {
                    e[k] = -e[k];
                }
                let ek = e[k];
                for x in &mut e[(k + 1)..n] {
                    *x /= ek;
                }
                e[k + 1] += 1.0;
            }
            e[k] = -e[k];
            if k + 1 < m && e[k] != 0.0 {
                for w in &mut work[(k + 1)..m] {
                    *w = 0.0;
                }
                for j in (k + 1)..n {
                    let ej = e[j];
                    for (w, &a) in work[(k + 1)..m].iter_mut().zip(&at[j][(k + 1)..m]) {
                        *w += ej * a;
                    }
                }
                for j in (k + 1)..n {
                    let t = -e[j] / e[k + 1];
                    for (a, &w) in at[j][(k + 1)..m].iter_mut().zip(&work[(k + 1)..m]) {
                        *a += t * w;
                    }
                }
            }
            vt[k][(k + 1)..n].copy_from_slice(&e[(k + 1)..n]);
        }
    }

    let mut p = n.min(m + 1);
    if nct < n {
        s[nct] = at[nct][nct];
    }
    if m < p {
        s[p - 1] = 0.0;
    }
    if nrt + 1 < p {
        e[nrt] = at[p - 1][nrt];
    }
    e[p - 1] = 0.0;

    // Generate U.
    for j in nct..nu {
        for x in ut[j].iter_mut() {
            *x = 0.0;
        }
        ut[j][j] = 1.0;
    }
    for k in (0..nct).rev() {
        if s[k] != 0.0 {
            for j in (k + 1)..nu {
                let (head, tail) = ut.split_at_mut(j);
                let uk = &head[k];
                let uj = &mut tail[0];
                let mut t = 0.0;
                for i in k..m {
                    t += uk[i] * uj[i];
                }
                t = -t / uk[k];
                for i in k..m {
                    uj[i] += t * uk[i];
                }
            }
            let uk = &mut ut[k];
            for x in &mut uk[k..m] {
                *x = -*x;
            }
            uk[k] += 1.0;
            for x in &mut uk[..k] {
                *x = 0.0;
            }
        } else {
            for x in ut[k].iter_mut() {
                *x = 0.0;
            }
            ut[k][k] = 1.0;
        }
    }

    // Generate V.
    for k in (0..n).rev() {
        if k < nrt && e[k] != 0.0 {
            for j in (k + 1)..nu {
                let (head, tail) = vt.split_at_mut(j);
                let vk = &head[k];
                let vj = &mut tail[0];
                let mut t = 0.0;
                for i in (k + 1)..n {
                    t += vk[i] * vj[i];
                }
                t = -t / vk[k + 1];
                for i in (k + 1)..n {
                    vj[i] += t * vk[i];
                }
            }
        }
        for x in vt[k].iter_mut() {
            *x = 0.0;
        }
        vt[k][k] = 1.0;
    }

    // Iterate on the bidiagonal.
    let pp = p - 1;
    let eps = f64::EPSILON;
    let tiny = 2.0f64.powi(-966);
    let mut guard = 0usize;
    while p > 0 {
        guard += 1;
        if guard > 75 * n.max(1) * 10 {
            break;
        }
        let mut k: isize = p as isize - 2;
        while k >= 0 {
            let ku = k as usize;
            if e[ku].abs() <= tiny + eps * (s[ku].abs() + s[ku + 1].abs()) {
                e[ku] = 0.0;
                break;
            }
            k -= 1;
        }
        let kase;
        if k == p as isize - 2 {
            kase = 4;
        } else {
            let mut ks: isize = p as isize - 1;
            while ks > k {
                let ksu = ks as usize;
                let t = (if ks != p as isize { e[ksu].abs() } else { 0.0 })
                    + (if ks != k + 1 { e[ksu - 1].abs() } else { 0.0 });
                if s[ksu].abs() <= tiny + eps * t {
                    s[ksu] = 0.0;
                    break;
                }
                ks -= 1;
            }
            if ks == k {
                kase = 3;
            } else if ks == p as isize - 1 {
                kase = 1;
            } else {
                kase = 2;
                k = ks;
            }
        }
        let k = (k + 1) as usize;

        match kase {
            // Deflate negligible s(p).
            1 => {
                let mut f = e[p - 2];
                e[p - 2] = 0.0;
                for j in (k..=(p - 2)).rev() {
                    let t = s[j].hypot(f);
                    let cs = s[j] / t;
                    let sn = f / t;
                    s[j] = t;
                    if j != k {
                        f = -sn * e[j - 1];
                        e[j - 1] *= cs;
                    }
                    rotate_rows(&mut vt, j, p - 1, cs, sn);
                }
            }
            // Split at negligible s(k).
            2 => {
                let mut f = e[k - 1];
                e[k - 1] = 0.0;
                for j in k..p {
                    let t = s[j].hypot(f);
                    let cs = s[j] / t;
                    let sn = f / t;
                    s[j] = t;
                    f = -sn * e[j];
                    e[j] *= cs;
                    rotate_rows(&mut ut, j, k - 1, cs, sn);
                }
            }
            // One QR step.
            3 => {
                let scale = s[p - 1].abs().max(s[p - 2].abs()).max(e[p - 2].abs()).max(s[k].abs()).max(e[k].abs());
                let sp = s[p - 1] / scale;
                let spm1 = s[p - 2] / scale;
                let epm1 = e[p - 2] / scale;
                let sk = s[k] / scale;
                let ek = e[k] / scale;
                let b = ((spm1 + sp) * (spm1 - sp) + epm1 * epm1) / 2.0;
                let c = (sp * epm1) * (sp * epm1);
                let mut shift = 0.0;
                if b != 0.0 || c != 0.0 {
                    shift = (b * b + c).sqrt();
                    if b < 0.0 {
                        shift = -shift;
                    }
                    shift = c / (b + shift);
                }
                let mut f = (sk + sp) * (sk - sp) + shift;
                let mut g = sk * ek;
                for j in k..(p - 1) {
                    let mut t = f.hypot(g);
                    let mut cs = f / t;
                    let mut sn = g / t;
                    if j != k {
                        e[j - 1] = t;
                    }
                    f = cs * s[j] + sn * e[j];
                    e[j] = cs * e[j] - sn * s[j];
                    g = sn * s[j + 1];
                    s[j + 1] *= cs;
                    rotate_rows(&mut vt, j, j + 1, cs, sn);
                    t = f.hypot(g);
                    cs = f / t;
                    sn = g / t;
                    s[j] = t;
                    f = cs * e[j] + sn * s[j + 1];
                    s[j + 1] = -sn * e[j] + cs * s[j + 1];
                    g = sn * e[j + 1];
                    e[j + 1] *= cs;
                    if j < m - 1 {
                        rotate_rows(&mut ut, j, j + 1, cs, sn);
                    }
                }
                e[p - 2] = f;
            }
            // Convergence.
            _ => {
                let mut k = k;
                if s[k] <= 0.0 {
                    s[k] = if s[k] < 0.0 { -s[k] } else { 0.0 };
                    for x in vt[k].iter_mut().take(pp + 1) {
                        *x = -*x;
                    }
                }
                while k < pp {
                    if s[k] >= s[k + 1] {
                        break;
                    }
                    s.swap(k, k + 1);
                    if k < n - 1 {
                        vt.swap(k, k + 1);
                    }
                    if k < m - 1 {
                        ut.swap(k, k + 1);
                    }
                    k += 1;
                }
                p -= 1;
            }
        }
    }
    s.truncate(n);
    (ut, s, vt)
}

/// Applies `(x, y) ← (c·x + s·y, −s·x + c·y)` to rows `a` (x) and `b` (y).
fn rotate_rows(rows: &mut [Vec<f64>], a: usize, b: usize, cs: f64, sn: f64) {
    let (ra, rb) = if a < b {
        let (lo, hi) = rows.split_at_mut(b);
        (&mut lo[a], &mut hi[0])
    } else {
        let (lo, hi) = rows.split_at_mut(a);
        (&mut hi[0], &mut lo[b])
    };
    for (x, y) in ra.iter_mut().zip(rb.iter_mut()) {
        let t = cs * *x + sn * *y;
        *y = -sn * *x + cs * *y;
        *x = t;
    }
}
