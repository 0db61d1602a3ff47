//! Reference implementations used as test oracles. They are deliberately
//! naive and share no code with the library.

#![allow(dead_code)]

use mvsumm_core::{Matrix, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

pub fn unit_columns(mut m: Matrix) -> Matrix {
    for mut c in m.column_iter_mut() {
        let n = c.norm();
        c /= n;
    }
    m
}

/// `d x n` matrix with orthonormal rows, by Gram-Schmidt on Gaussian rows.
pub fn orthonormal_rows(d: usize, n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    while rows.len() < d {
        let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        for _ in 0..2 {
            for r in &rows {
                let dot: f64 = v.iter().zip(r).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(r).for_each(|(a, b)| *a -= dot * b);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            rows.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    Matrix::from_fn(d, n, |i, j| rows[i][j])
}

/// Random symmetric PSD graph Laplacian on `n` nodes with density `p`.
pub fn random_laplacian(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Matrix {
    let mut w = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                let v = rng.random::<f64>();
                w[(i, j)] = v;
                w[(j, i)] = v;
            }
        }
    }
    let mut l = -w.clone();
    for i in 0..n {
        l[(i, i)] = w.row(i).sum();
    }
    l
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
#[allow(clippy::needless_range_loop)]
pub fn jacobi_eigenvalues(m: &Matrix) -> Vec<f64> {
    let n = m.nrows();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| m[(i, j)]).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn soft(x: f64, t: f64) -> f64 {
    x.signum() * (x.abs() - t).max(0.0)
}

/// Exact lasso `min ||t - D c||^2 + lambda ||c||_1` by cyclic coordinate
/// descent, with atom `exclude` pinned to zero.
pub fn cd_lasso(dict: &Matrix, target: &Vector, lambda: f64, exclude: Option<usize>) -> Vector {
    let n = dict.ncols();
    let mut c = Vector::zeros(n);
    let mut r = target.clone();
    let sq: Vec<f64> = (0..n).map(|j| dict.column(j).norm_squared()).collect();
    for _ in 0..100_000 {
        let mut max_change: f64 = 0.0;
        for j in 0..n {
            if Some(j) == exclude || sq[j] == 0.0 {
                continue;
            }
            let old = c[j];
            let rho = dict.column(j).dot(&r) + sq[j] * old;
            let new = soft(rho, lambda / 2.0) / sq[j];
            if new != old {
                r.axpy(old - new, &dict.column(j), 1.0);
                c[j] = new;
                max_change = max_change.max((new - old).abs());
            }
        }
        if max_change < 1e-15 {
            break;
        }
    }
    c
}

/// Exact `min ||Y - Y Z||_F^2 + lambda sum_i ||z^i||` by accelerated
/// proximal gradient with row-wise shrinkage.
pub fn group_lasso(y: &Matrix, lambda: f64, iters: usize) -> Matrix {
    let n = y.ncols();
    let g = y.transpose() * y;
    let lip = 2.0 * jacobi_eigenvalues(&g).last().copied().unwrap_or(0.0).max(1e-12);
    let step = 1.0 / lip;
    let mut z = Matrix::zeros(n, n);
    let mut v = z.clone();
    let mut t = 1.0_f64;
    let id = Matrix::identity(n, n);
    for _ in 0..iters {
        let grad = 2.0 * &g * (&v - &id);
        let mut next = &v - step * grad;
        for mut row in next.row_iter_mut() {
            let norm = row.norm();
            let scale = if norm > 0.0 { (1.0 - step * lambda / norm).max(0.0) } else { 0.0 };
            row *= scale;
        }
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        v = &next + ((t - 1.0) / t_next) * (&next - &z);
        z = next;
        t = t_next;
    }
    z
}

pub fn group_lasso_objective(y: &Matrix, z: &Matrix, lambda: f64) -> f64 {
    let l21: f64 = z.row_iter().map(|r| r.norm()).sum();
    (y - y * z).norm_squared() + lambda * l21
}
