//! Closed-form prox examples and the nonexpansiveness sweep. Each check
//! returns a list of failure descriptions; empty means pass.

use lslab::linalg::{dct_matrix, haar_matrix};
use lslab::prox::{
    l2ball_project, prox_neg_logdet, prox_trace_psd, psd_project, soft_threshold, svt, transform_l1_prox,
};
use lslab::synth::Prng;
use lslab::DenseMatrix;

use super::{bisect, frob_diff, gaussian, max_abs_diff, spd, symmetric};

const TOL: f64 = 1e-12;

fn m(rows: &[&[f64]]) -> DenseMatrix {
    DenseMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

fn check(fails: &mut Vec<String>, name: &str, got: &DenseMatrix, want: &DenseMatrix, tol: f64) {
    let d = max_abs_diff(got, want);
    if !(d <= tol) {
        fails.push(format!("{name}: max deviation {d:e}"));
    }
}

/// Positive root of `ρx² − ρa·x − 1 = 0`, the stationarity condition of
/// `−ln x + (ρ/2)(x − a)²`, by bisection.
fn scalar_logdet_prox(a: f64, rho: f64) -> f64 {
    bisect(|x| rho * x * x - rho * a * x - 1.0, 1e-12, a.abs() + 2.0 / rho.sqrt() + 1.0)
}

pub fn examples() -> Vec<String> {
    let mut f = Vec::new();
    let one = |v: f64| m(&[&[v]]);

    check(&mut f, "soft 3 tau 1", &soft_threshold(&one(3.0), 1.0).unwrap(), &one(2.0), TOL);
    check(&mut f, "soft -0.5 tau 1", &soft_threshold(&one(-0.5), 1.0).unwrap(), &one(0.0), TOL);
    check(
        &mut f,
        "soft 2x2",
        &soft_threshold(&m(&[&[2.0, -3.0], &[0.1, 0.0]]), 0.5).unwrap(),
        &m(&[&[1.5, -2.5], &[0.0, 0.0]]),
        TOL,
    );

    check(
        &mut f,
        "svt diag",
        &svt(&DenseMatrix::diag(&[5.0, 2.0, 0.5]), 1.0).unwrap(),
        &DenseMatrix::diag(&[4.0, 1.0, 0.0]),
        TOL,
    );
    check(&mut f, "svt zero", &svt(&DenseMatrix::zeros(3, 2), 1.0).unwrap(), &DenseMatrix::zeros(3, 2), TOL);
    let u = [1.0 / 3.0, 2.0 / 3.0, -2.0 / 3.0];
    let v = [0.6, 0.0, 0.8, 0.0];
    let r1 = DenseMatrix::outer(&u, &v).scale(10.0);
    check(&mut f, "svt rank-1", &svt(&r1, 3.0).unwrap(), &DenseMatrix::outer(&u, &v).scale(7.0), TOL);

    check(&mut f, "logdet 0 rho 1", &prox_neg_logdet(&one(0.0), 1.0).unwrap(), &one(1.0), TOL);
    let want = scalar_logdet_prox(3.0, 1.0);
    check(&mut f, "logdet 3 rho 1", &prox_neg_logdet(&one(3.0), 1.0).unwrap(), &one(want), TOL);
    if (want - (3.0 + 13f64.sqrt()) / 2.0).abs() > TOL {
        f.push("logdet 3 rho 1: bisection disagrees with the quadratic root".into());
    }
    let want = scalar_logdet_prox(1.0, 4.0);
    check(
        &mut f,
        "logdet I rho 4",
        &prox_neg_logdet(&DenseMatrix::identity(3), 4.0).unwrap(),
        &DenseMatrix::identity(3).scale(want),
        TOL,
    );
    if (want - 1.2071067811865475).abs() > 1e-12 {
        f.push(format!("logdet I rho 4: bisection gives {want}"));
    }

    check(
        &mut f,
        "trace diag",
        &prox_trace_psd(&DenseMatrix::diag(&[2.0, -1.0]), 0.5).unwrap(),
        &DenseMatrix::diag(&[1.5, 0.0]),
        TOL,
    );
    check(
        &mut f,
        "trace zero",
        &prox_trace_psd(&DenseMatrix::zeros(3, 3), 0.5).unwrap(),
        &DenseMatrix::zeros(3, 3),
        TOL,
    );
    check(
        &mut f,
        "trace full shrink",
        &prox_trace_psd(&DenseMatrix::identity(2), 2.0).unwrap(),
        &DenseMatrix::zeros(2, 2),
        TOL,
    );

    check(
        &mut f,
        "psd diag",
        &psd_project(&DenseMatrix::diag(&[2.0, -1.0])).unwrap(),
        &DenseMatrix::diag(&[2.0, 0.0]),
        TOL,
    );
    let mut rng = Prng::new(11);
    let p = spd(&mut rng, 4, 0.5);
    check(&mut f, "psd idempotent", &psd_project(&p).unwrap(), &p, TOL);
    check(
        &mut f,
        "psd -I",
        &psd_project(&DenseMatrix::identity(3).scale(-1.0)).unwrap(),
        &DenseMatrix::zeros(3, 3),
        TOL,
    );

    let col = |v: Vec<f64>| DenseMatrix::column(&v);
    check(
        &mut f,
        "ball outside",
        &col(l2ball_project(&[3.0, 0.0], &[0.0, 0.0], 1.0).unwrap()),
        &col(vec![1.0, 0.0]),
        TOL,
    );
    check(
        &mut f,
        "ball inside",
        &col(l2ball_project(&[0.3, -0.4], &[0.0, 0.0], 1.0).unwrap()),
        &col(vec![0.3, -0.4]),
        TOL,
    );
    check(
        &mut f,
        "ball radius 0",
        &col(l2ball_project(&[3.0, 5.0], &[1.0, -1.0], 0.0).unwrap()),
        &col(vec![1.0, -1.0]),
        TOL,
    );

    let vm = gaussian(&mut rng, 3, 4);
    check(
        &mut f,
        "transform identity",
        &transform_l1_prox(&vm, &DenseMatrix::identity(3), &DenseMatrix::identity(4), 0.4).unwrap(),
        &soft_threshold(&vm, 0.4).unwrap(),
        TOL,
    );
    check(
        &mut f,
        "transform zero",
        &transform_l1_prox(&DenseMatrix::zeros(4, 4), &haar_matrix(4).unwrap(), &dct_matrix(4).unwrap(), 0.4).unwrap(),
        &DenseMatrix::zeros(4, 4),
        TOL,
    );
    f
}

/// `‖prox(a) − prox(b)‖ ≤ ‖a − b‖` on `pairs` random pairs per operator.
pub fn nonexpansive(pairs: usize, seed: u64) -> Vec<String> {
    let haar = haar_matrix(4).unwrap();
    let dct = dct_matrix(4).unwrap();
    type Op<'a> = Box<dyn Fn(&DenseMatrix) -> DenseMatrix + 'a>;
    let ops: Vec<(&str, bool, Op)> = vec![
        ("soft_threshold", false, Box::new(|a| soft_threshold(a, 0.3).unwrap())),
        ("svt", false, Box::new(|a| svt(a, 0.5).unwrap())),
        ("prox_neg_logdet", true, Box::new(|a| prox_neg_logdet(a, 0.7).unwrap())),
        ("prox_trace_psd", true, Box::new(|a| prox_trace_psd(a, 0.4).unwrap())),
        ("psd_project", true, Box::new(|a| psd_project(a).unwrap())),
        ("transform_l1_prox", false, Box::new(|a| transform_l1_prox(a, &haar, &dct, 0.3).unwrap())),
        (
            "l2ball_project",
            false,
            Box::new(|a| DenseMatrix::column(&l2ball_project(a.as_slice(), &[0.5, -0.5, 0.0, 1.0], 1.0).unwrap())),
        ),
    ];
    let mut fails = Vec::new();
    for (k, (name, sym, op)) in ops.iter().enumerate() {
        let mut rng = Prng::derive(seed, &[k as u64]);
        let mut worst = 0.0f64;
        for _ in 0..pairs {
            let (a, b) = match (*sym, *name) {
                (true, _) => (symmetric(&mut rng, 4), symmetric(&mut rng, 4)),
                (false, "l2ball_project") => (gaussian(&mut rng, 4, 1).scale(2.0), gaussian(&mut rng, 4, 1).scale(2.0)),
                (false, "svt") => (gaussian(&mut rng, 4, 3), gaussian(&mut rng, 4, 3)),
                _ => (gaussian(&mut rng, 4, 4), gaussian(&mut rng, 4, 4)),
            };
            let ratio = frob_diff(&op(&a), &op(&b)) / frob_diff(&a, &b);
            worst = worst.max(ratio);
        }
        if worst > 1.0 + 1e-12 {
            fails.push(format!("{name}: expansion ratio {worst}"));
        }
    }
    fails
}
