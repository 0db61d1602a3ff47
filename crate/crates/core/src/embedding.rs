//! Spectral embeddings with orthonormal rows.

use alloc::format;
use alloc::vec::Vec;

use crate::linalg::sym_eigen_ascending;
use crate::{Error, Matrix, Result};

/// `d × N` coordinates, one column per shot, with `Y Y^T = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub y: Matrix,
    /// Eigenvalues belonging to the rows of `y`, ascending.
    pub eigenvalues: Vec<f64>,
}

impl Embedding {
    pub fn dim(&self) -> usize {
        self.y.nrows()
    }

    /// `tr(Y M Y^T)`.
    pub fn trace_with(&self, m: &Matrix) -> f64 {
        (&self.y * m * self.y.transpose()).trace()
    }
}

fn rows_from_columns(vectors: &Matrix, picks: &[usize]) -> Matrix {
    let n = vectors.nrows();
    Matrix::from_fn(picks.len(), n, |r, c| vectors[(c, picks[r])])
}

fn check_square_symmetric(m: &Matrix, what: &str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch(format!("{what} must be square")));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("embedding input"));
    }
    Ok(())
}

/// Laplacian eigenmap: rows are the eigenvectors of `laplacian` for the `d`
/// smallest eigenvalues exceeding `zero_tol * lambda_max`.
pub fn initial_embedding(laplacian: &Matrix, d: usize, zero_tol: f64) -> Result<Embedding> {
    check_square_symmetric(laplacian, "Laplacian")?;
    let n = laplacian.nrows();
    if d == 0 || d >= n {
        return Err(Error::InvalidArgument(format!("embedding dimension {d} must be in 1..{n}")));
    }
    let sym = (laplacian + laplacian.transpose()) * 0.5;
    let (values, vectors) = sym_eigen_ascending(&sym)?;
    let lambda_max = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let cutoff = zero_tol * lambda_max;
    let picks: Vec<usize> = (0..n).filter(|&k| values[k] > cutoff).take(d).collect();
    if picks.len() < d {
        return Err(Error::InsufficientSpectrum {
            requested: d,
            available: picks.len(),
        });
    }
    Ok(Embedding {
        y: rows_from_columns(&vectors, &picks),
        eigenvalues: picks.iter().map(|&k| values[k]).collect(),
    })
}

/// `L + alpha (I - Z - Z^T + Z Z^T)`, i.e. `L + alpha (I - Z)(I - Z)^T`,
/// symmetrized.
pub fn y_step_matrix(laplacian: &Matrix, z: &Matrix, alpha: f64) -> Matrix {
    let n = z.nrows();
    let ident = Matrix::identity(n, n);
    let resid = &ident - z;
    let m = laplacian + (&resid * resid.transpose()) * alpha;
    (&m + m.transpose()) * 0.5
}

/// Minimizes `tr(Y L Y^T) + alpha ||Y - Y Z||_F^2` over `Y Y^T = I`: the rows
/// are the eigenvectors of the `d` smallest eigenvalues of
/// [`y_step_matrix`], zero eigenvalues included.
pub fn y_step(laplacian: &Matrix, z: &Matrix, alpha: f64, d: usize) -> Result<Embedding> {
    check_square_symmetric(laplacian, "Laplacian")?;
    if z.shape() != laplacian.shape() {
        return Err(Error::ShapeMismatch("Z and L must have the same shape".into()));
    }
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    eigen_bottom(&y_step_matrix(laplacian, z, alpha), d)
}

/// Rows are the eigenvectors for the `d` smallest eigenvalues of the
/// symmetric matrix `m`.
pub fn eigen_bottom(m: &Matrix, d: usize) -> Result<Embedding> {
    check_square_symmetric(m, "matrix")?;
    let n = m.nrows();
    if d == 0 || d > n {
        return Err(Error::InvalidArgument(format!("embedding dimension {d} must be in 1..={n}")));
    }
    let (values, vectors) = sym_eigen_ascending(m)?;
    let picks: Vec<usize> = (0..d).collect();
    Ok(Embedding {
        y: rows_from_columns(&vectors, &picks),
        eigenvalues: values[..d].to_vec(),
    })
}
