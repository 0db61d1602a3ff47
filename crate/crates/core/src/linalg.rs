//! Dense kernels shared by the solvers and the embedding.

use alloc::vec::Vec;

use nalgebra::{Cholesky, Dyn, SymmetricEigen};

use crate::{Error, Matrix, Result, Vector};

/// Entries below this magnitude are ignored when fixing eigenvector signs.
const SIGN_TOL: f64 = 1e-10;

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub(crate) fn all_finite(m: &Matrix) -> bool {
    m.iter().all(|v| v.is_finite())
}

pub(crate) fn cholesky(a: Matrix) -> Result<Cholesky<f64, Dyn>> {
    Cholesky::new(a).ok_or(Error::NotPositiveDefinite)
}

/// Eigenpairs of a symmetric matrix sorted by ascending eigenvalue.
///
/// Column `k` of the returned matrix is the eigenvector for `values[k]`,
/// with its first significant entry made nonnegative. Ties keep the order
/// produced by the decomposition, which is deterministic for a given input.
pub(crate) fn sym_eigen_ascending(m: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let n = m.nrows();
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 0).ok_or(Error::EigenFailure)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));

    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col: Vector = eig.eigenvectors.column(src).into_owned();
        fix_sign(col.as_mut_slice());
        vectors.set_column(dst, &col);
    }
    Ok((values, vectors))
}

/// Flip `v` so that its first entry above `SIGN_TOL` in magnitude is positive.
pub(crate) fn fix_sign(v: &mut [f64]) {
    if let Some(first) = v.iter().copied().find(|x| x.abs() > SIGN_TOL) {
        if first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

pub(crate) fn row_norm(m: &Matrix, i: usize) -> f64 {
    sqrt(m.row(i).iter().map(|v| v * v).sum())
}
