//! Half-quadratic solvers for the smoothed l1 and l2,1 problems.
//!
//! Both penalties are smoothed with `phi(x) = sqrt(x^2 + eps)` and minimized
//! by repeatedly majorizing `phi` with a quadratic whose curvature is the
//! auxiliary weight `1 / (2 phi(x))`. Every reweighted step solves a
//! symmetric positive definite system exactly, so the smoothed objective
//! never increases.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{all_finite, cholesky, row_norm, sqrt};
use crate::{Error, Matrix, Result, Vector};

/// Settings of the reweighting loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Smoothing constant of `sqrt(x^2 + eps)`.
    pub epsilon: f64,
    pub max_iters: usize,
    /// Stop once the relative decrease of the objective falls below this.
    pub rel_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon: 1e-8,
            max_iters: 100,
            rel_tol: 1e-6,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be at least 1".into()));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidArgument(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        Ok(())
    }
}

/// Result of one smoothed-l1 coding problem.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Solution {
    /// Code over the full dictionary; an excluded atom has coefficient 0.
    pub coef: Vector,
    /// Smoothed objective after the ridge start and after every reweighting.
    pub objectives: Vec<f64>,
    pub converged: bool,
}

/// `||target - dictionary * coef||^2 + lambda * sum_j sqrt(coef_j^2 + eps)`,
/// with the excluded atom (if any) left out of the penalty.
pub fn smoothed_l1_objective(
    dictionary: &Matrix,
    target: &Vector,
    coef: &Vector,
    lambda: f64,
    epsilon: f64,
    exclude: Option<usize>,
) -> f64 {
    let residual = target - dictionary * coef;
    let penalty: f64 = coef
        .iter()
        .enumerate()
        .filter(|(j, _)| Some(*j) != exclude)
        .map(|(_, c)| sqrt(c * c + epsilon))
        .sum();
    residual.norm_squared() + lambda * penalty
}

fn smoothed_penalty(coef: &[f64], epsilon: f64) -> f64 {
    coef.iter().map(|c| sqrt(c * c + epsilon)).sum()
}

/// Codes a single target over the dictionary.
///
/// `exclude` removes one atom from the problem entirely (its coefficient is
/// pinned to zero), which is how self-representation is forbidden.
pub fn solve_l1_column(
    dictionary: &Matrix,
    target: &Vector,
    lambda: f64,
    exclude: Option<usize>,
    cfg: &SolverConfig,
) -> Result<L1Solution> {
    cfg.validate()?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda must be positive, got {lambda}")));
    }
    if dictionary.nrows() != target.len() {
        return Err(Error::ShapeMismatch(format!(
            "dictionary has {} rows, target has {}",
            dictionary.nrows(),
            target.len()
        )));
    }
    let gram = dictionary.transpose() * dictionary;
    let rhs = dictionary.transpose() * target;
    Ok(solve_column_prepared(&gram, &rhs, target.norm_squared(), lambda, exclude, cfg))
}

/// Reweighting loop on precomputed `G = D^T D`, `b = D^T t`, `t^T t`.
fn solve_column_prepared(
    gram: &Matrix,
    rhs: &Vector,
    target_sq: f64,
    lambda: f64,
    exclude: Option<usize>,
    cfg: &SolverConfig,
) -> L1Solution {
    let n = gram.nrows();
    let active: Vec<usize> = (0..n).filter(|&j| Some(j) != exclude).collect();
    let m = active.len();
    let mut full = Vector::zeros(n);
    if m == 0 {
        return L1Solution {
            coef: full,
            objectives: vec![target_sq],
            converged: true,
        };
    }
    let g = Matrix::from_fn(m, m, |a, b| gram[(active[a], active[b])]);
    let b = Vector::from_iterator(m, active.iter().map(|&j| rhs[j]));

    // ||t - Dc||^2 = t't - 2 b'c + c'Gc
    let objective = |c: &Vector| -> f64 {
        let fit = target_sq - 2.0 * b.dot(c) + c.dot(&(&g * c));
        fit.max(0.0) + lambda * smoothed_penalty(c.as_slice(), cfg.epsilon)
    };
    let solve = |weights: &[f64]| -> Option<Vector> {
        let mut sys = g.clone();
        for (i, w) in weights.iter().enumerate() {
            sys[(i, i)] += lambda * w;
        }
        cholesky(sys).ok().map(|ch| ch.solve(&b))
    };

    // Ridge start: all auxiliary weights equal to one.
    let mut coef = match solve(&vec![1.0; m]) {
        Some(c) => c,
        None => Vector::zeros(m),
    };
    let mut objectives = vec![objective(&coef)];
    let mut converged = false;
    for _ in 0..cfg.max_iters {
        let weights: Vec<f64> = coef.iter().map(|c| 0.5 / sqrt(c * c + cfg.epsilon)).collect();
        let Some(next) = solve(&weights) else { break };
        let prev = *objectives.last().unwrap();
        let cur = objective(&next);
        coef = next;
        objectives.push(cur);
        if (prev - cur).abs() <= cfg.rel_tol * prev.abs().max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
    }

    for (a, &j) in active.iter().enumerate() {
        full[j] = coef[a];
    }
    L1Solution {
        coef: full,
        objectives,
        converged,
    }
}

fn check_coding_inputs(dictionary: &Matrix, targets: &Matrix, zero_diagonal: bool) -> Result<()> {
    if dictionary.nrows() != targets.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "dictionary dimension {} differs from target dimension {}",
            dictionary.nrows(),
            targets.nrows()
        )));
    }
    if !all_finite(dictionary) || !all_finite(targets) {
        return Err(Error::NonFinite("sparse coding input"));
    }
    if zero_diagonal && dictionary.ncols() != targets.ncols() {
        return Err(Error::ShapeMismatch(
            "zero-diagonal coding needs as many targets as dictionary atoms".into(),
        ));
    }
    Ok(())
}

/// Codes every column of `targets` over `dictionary` with a shared penalty.
///
/// Approximately minimizes `||targets - dictionary * C||_F^2 + lambda *
/// sum_ij sqrt(c_ij^2 + eps)` column by column. With `zero_diagonal`, column
/// `j` may not use atom `j`, so `C` has an exactly zero diagonal.
pub fn solve_l1_selfexpress(
    dictionary: &Matrix,
    targets: &Matrix,
    lambda: f64,
    zero_diagonal: bool,
    cfg: &SolverConfig,
) -> Result<Matrix> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda must be positive, got {lambda}")));
    }
    let lambdas = vec![lambda; targets.ncols()];
    solve_l1_columns(dictionary, targets, &lambdas, zero_diagonal, cfg)
}

/// Like [`solve_l1_selfexpress`] with a separate penalty per target column.
/// A zero penalty entry yields an all-zero code for that column.
pub fn solve_l1_columns(
    dictionary: &Matrix,
    targets: &Matrix,
    lambdas: &[f64],
    zero_diagonal: bool,
    cfg: &SolverConfig,
) -> Result<Matrix> {
    cfg.validate()?;
    check_coding_inputs(dictionary, targets, zero_diagonal)?;
    if lambdas.len() != targets.ncols() || lambdas.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
        return Err(Error::InvalidArgument("one nonnegative penalty per target is required".into()));
    }
    let gram = dictionary.transpose() * dictionary;
    let rhs = dictionary.transpose() * targets;
    let n_atoms = dictionary.ncols();

    let solve_one = |j: usize| -> Vector {
        if lambdas[j] == 0.0 {
            return Vector::zeros(n_atoms);
        }
        let b = rhs.column(j).into_owned();
        let exclude = zero_diagonal.then_some(j);
        let t_sq = targets.column(j).norm_squared();
        solve_column_prepared(&gram, &b, t_sq, lambdas[j], exclude, cfg).coef
    };

    #[cfg(feature = "parallel")]
    let columns: Vec<Vector> = {
        use rayon::prelude::*;
        (0..targets.ncols()).into_par_iter().map(solve_one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let columns: Vec<Vector> = (0..targets.ncols()).map(solve_one).collect();

    let mut out = Matrix::zeros(n_atoms, targets.ncols());
    for (j, c) in columns.iter().enumerate() {
        out.set_column(j, c);
    }
    Ok(out)
}

/// Sum of the Euclidean norms of the rows.
pub fn l21_norm(z: &Matrix) -> f64 {
    (0..z.nrows()).map(|i| row_norm(z, i)).sum()
}

/// `sum_i sqrt(q_i^2 ||z^i||^2 + eps)`, with `q = 1` when no weights are given.
pub fn smoothed_l21(z: &Matrix, epsilon: f64, row_weights: Option<&[f64]>) -> f64 {
    (0..z.nrows())
        .map(|i| {
            let q = row_weights.map_or(1.0, |w| w[i]);
            let r = q * row_norm(z, i);
            sqrt(r * r + epsilon)
        })
        .sum()
}

/// `||Q z||_{2,1} = sum_i q_i ||z^i||`, or the plain l2,1 norm without weights.
pub fn weighted_l21(z: &Matrix, row_weights: Option<&[f64]>) -> f64 {
    (0..z.nrows())
        .map(|i| row_weights.map_or(1.0, |w| w[i]) * row_norm(z, i))
        .sum()
}

/// Half-quadratic weights for the (optionally row-weighted) l2,1 penalty:
/// `P_ii = 1 / (2 sqrt(||z^i||^2 + eps))`, or with weights
/// `P_ii = q_i^2 / (2 sqrt(q_i^2 ||z^i||^2 + eps))`.
pub fn update_p(z: &Matrix, epsilon: f64, row_weights: Option<&[f64]>) -> Vector {
    Vector::from_iterator(
        z.nrows(),
        (0..z.nrows()).map(|i| {
            let q = row_weights.map_or(1.0, |w| w[i]);
            let r = row_norm(z, i);
            q * q / (2.0 * sqrt(q * q * r * r + epsilon))
        }),
    )
}

/// Solves `(Y^T Y + lambda diag(p)) Z = Y^T Y` by Cholesky factorization.
pub fn z_step(y: &Matrix, p: &Vector, lambda: f64) -> Result<Matrix> {
    let n = y.ncols();
    if p.len() != n {
        return Err(Error::ShapeMismatch(format!("P has {} entries for {n} shots", p.len())));
    }
    if !(lambda > 0.0) || p.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::NotPositiveDefinite);
    }
    let gram = y.transpose() * y;
    let mut sys = gram.clone();
    for i in 0..n {
        sys[(i, i)] += lambda * p[i];
    }
    Ok(cholesky(sys)?.solve(&gram))
}
