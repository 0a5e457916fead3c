use lslab::linalg::{svd, sym_eig};
use lslab::DenseMatrix;
use std::time::Instant;

fn main() {
    for &n in &[100usize, 200, 400] {
        let a = DenseMatrix::from_fn(n, n, |i, j| {
            (((i * 31 + j * 17) % 97) as f64 / 97.0 - 0.5) + (((j * 31 + i * 17) % 97) as f64 / 97.0 - 0.5)
        });
        let t = Instant::now();
        let e = sym_eig(&a).unwrap();
        let el = t.elapsed();
        let err = e.reconstruct().sub(&a).unwrap().frobenius_norm();
        let t = Instant::now();
        let s = svd(&a).unwrap();
        let sl = t.elapsed();
        let serr = s.reconstruct().sub(&a).unwrap().frobenius_norm();
        println!("n={n} eig {el:?} err {err:.2e}  svd {sl:?} err {serr:.2e}");
    }
}
