#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use schrodinger_maxwell::linalg::{ComplexMatrix, C64};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn rand_c(r: &mut StdRng) -> C64 {
    C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

pub fn rand_vec(r: &mut StdRng, n: usize) -> Vec<C64> {
    (0..n).map(|_| rand_c(r)).collect()
}

pub fn rand_matrix(r: &mut StdRng, rows: usize, cols: usize) -> ComplexMatrix {
    let rows_v: Vec<Vec<C64>> = (0..rows).map(|_| rand_vec(r, cols)).collect();
    ComplexMatrix::from_rows(&rows_v)
}

pub fn rand_hermitian(r: &mut StdRng, n: usize) -> ComplexMatrix {
    let a = rand_matrix(r, n, n);
    a.add(&a.adjoint()).unwrap().scale(C64::new(0.5, 0.0))
}

/// Random `A` whose Hermitian part is negative definite, so `e^{At}` contracts.
pub fn rand_stable(r: &mut StdRng, n: usize, damping: f64) -> ComplexMatrix {
    let a = rand_matrix(r, n, n);
    let skew = a.sub(&a.adjoint()).unwrap().scale(C64::new(0.5, 0.0));
    let b = rand_matrix(r, n, n);
    let neg = b.matmul(&b.adjoint()).unwrap().scale(C64::new(-0.5 / n as f64, 0.0));
    skew.add(&neg).unwrap().add(&ComplexMatrix::identity(n).scale(C64::new(-damping, 0.0))).unwrap()
}

pub fn dense_rows(m: &ComplexMatrix) -> Vec<Vec<C64>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect()).collect()
}

/// Naive dense product, independent of the library's matmul.
pub fn naive_matvec(m: &[Vec<C64>], x: &[C64]) -> Vec<C64> {
    m.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

/// Classic RK4 for `du/dt = f(t, u)` with a fixed step.
pub fn rk4(f: impl Fn(f64, &[C64]) -> Vec<C64>, u0: &[C64], t: f64, dt: f64) -> Vec<C64> {
    let steps = (t / dt).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let mut u = u0.to_vec();
    let axpy = |u: &[C64], k: &[C64], s: f64| -> Vec<C64> { u.iter().zip(k).map(|(a, b)| a + b * s).collect() };
    for n in 0..steps {
        let t0 = n as f64 * h;
        let k1 = f(t0, &u);
        let k2 = f(t0 + h / 2.0, &axpy(&u, &k1, h / 2.0));
        let k3 = f(t0 + h / 2.0, &axpy(&u, &k2, h / 2.0));
        let k4 = f(t0 + h, &axpy(&u, &k3, h));
        for i in 0..u.len() {
            u[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
        }
    }
    u
}

/// RK4 for `du/dt = A u + b(t)` on dense rows.
pub fn rk4_linear(a: &ComplexMatrix, b: impl Fn(f64) -> Vec<C64>, u0: &[C64], t: f64, dt: f64) -> Vec<C64> {
    let rows = dense_rows(a);
    rk4(
        |t, u| naive_matvec(&rows, u).into_iter().zip(b(t)).map(|(x, y)| x + y).collect(),
        u0,
        t,
        dt,
    )
}

pub fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn rel_diff(a: &[C64], b: &[C64]) -> f64 {
    let d: Vec<C64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&d) / norm(b).max(1e-300)
}

/// Least-squares slope of `ln e` against `ln h`.
pub fn slope(h: &[f64], e: &[f64]) -> f64 {
    let n = h.len() as f64;
    let xs: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
