//! Joint embedding and row-sparse representative selection.
//!
//! Minimizes
//!
//! ```text
//! tr(Y L Y^T) + alpha (||Y - Y Z||_F^2 + lambda ||Q Z||_{2,1})   s.t. Y Y^T = I
//! ```
//!
//! through its half-quadratic augmentation, where the l2,1 term becomes
//! `lambda tr(Z^T P Z)` with diagonal `P`. Each iteration solves exactly for
//! `Z` (a linear system), then `Y` (a symmetric eigenproblem), then refreshes
//! `P` from the new `Z`. With `P` refreshed from the previous `Z`, each
//! `Z`-step is a majorize-minimize step on the smoothed penalty
//! `sum_i sqrt(q_i^2 ||z^i||^2 + eps)`, so the smoothed objective reported in
//! the trace is non-increasing.
//!
//! `Q` is the identity unless shot weights are configured.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::QR;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::embedding::{initial_embedding, y_step, Embedding};
use crate::linalg::{fix_sign, row_norm};
use crate::sparse_solvers::{smoothed_l21, update_p, weighted_l21, z_step};
use crate::{Error, Matrix, Result, Vector};

#[derive(Debug, Clone, PartialEq)]
pub struct JointConfig {
    /// Weight of the self-representation term against the embedding term.
    pub alpha: f64,
    /// `lambda = lambda0 / rho`.
    pub rho: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    pub rel_tol: f64,
    /// Embedding dimension `d`.
    pub dim: usize,
    /// Relative threshold below which Laplacian eigenvalues count as zero in
    /// the initial embedding.
    pub zero_tol: f64,
    /// Per-shot penalty weights `q` (weighted l2,1 mode). `None` for the
    /// plain l2,1 penalty.
    pub shot_weights: Option<Vec<f64>>,
    /// Extra runs from randomly perturbed initial embeddings; the run with
    /// the lowest final objective wins.
    pub restarts: usize,
    pub restart_scale: f64,
    pub seed: u64,
}

impl JointConfig {
    pub fn with_dim(dim: usize) -> Self {
        JointConfig {
            alpha: 0.05,
            rho: 10.0,
            epsilon: 1e-8,
            max_iters: 25,
            rel_tol: 1e-6,
            dim,
            zero_tol: 1e-8,
            shot_weights: None,
            restarts: 0,
            restart_scale: 0.1,
            seed: 0,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |msg: alloc::string::String| Err(Error::InvalidArgument(msg));
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.rho > 1.0 && self.rho.is_finite()) {
            return bad(format!("rho must exceed 1, got {}", self.rho));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1".into());
        }
        if !(self.rel_tol > 0.0) {
            return bad(format!("rel_tol must be positive, got {}", self.rel_tol));
        }
        if let Some(q) = &self.shot_weights {
            if q.len() != n {
                return bad(format!("{} shot weights for {n} shots", q.len()));
            }
            if q.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return bad("shot weights must be positive".into());
            }
        }
        Ok(())
    }
}

/// One row of the optimizer trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    /// Objective with the smoothed l2,1 penalty.
    pub augmented: f64,
    /// Objective with the exact l2,1 penalty.
    pub objective: f64,
    pub delta_z: f64,
    pub delta_y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerTrace {
    pub records: Vec<IterationRecord>,
    pub converged: bool,
    pub lambda0: f64,
    pub lambda: f64,
}

impl OptimizerTrace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    /// True when the augmented objective never rises by more than
    /// `slack * max(1, |previous|)`.
    pub fn is_monotone(&self, slack: f64) -> bool {
        self.records
            .windows(2)
            .all(|w| w[1].augmented <= w[0].augmented + slack * w[0].augmented.abs().max(1.0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointSolution {
    pub embedding: Embedding,
    pub z: Matrix,
    pub p: Vector,
    pub trace: OptimizerTrace,
}

/// Objective values at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Objective {
    pub augmented: f64,
    pub true_obj: f64,
}

/// `2 max_i ||(Y^T Y)_i||`: the smallest `lambda` for which `Z = 0` solves
/// `min ||Y - YZ||^2 + lambda ||Z||_{2,1}`.
pub fn compute_lambda0(y: &Matrix) -> f64 {
    let gram = y.transpose() * y;
    let max = (0..gram.nrows()).map(|i| row_norm(&gram, i)).fold(0.0, f64::max);
    2.0 * max
}

pub fn compute_objective(
    y: &Matrix,
    z: &Matrix,
    laplacian: &Matrix,
    alpha: f64,
    lambda: f64,
    epsilon: f64,
    shot_weights: Option<&[f64]>,
) -> Objective {
    let embed = (y * laplacian * y.transpose()).trace();
    let recon = (y - y * z).norm_squared();
    Objective {
        augmented: embed + alpha * (recon + lambda * smoothed_l21(z, epsilon, shot_weights)),
        true_obj: embed + alpha * (recon + lambda * weighted_l21(z, shot_weights)),
    }
}

/// Iterate of the alternating scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    pub y: Matrix,
    pub z: Matrix,
    pub p: Vector,
}

impl JointState {
    /// Starting point: the given embedding, `Z = 0` and `P = I`.
    pub fn start(y: Matrix) -> Self {
        let n = y.ncols();
        JointState {
            y,
            z: Matrix::zeros(n, n),
            p: Vector::from_element(n, 1.0),
        }
    }
}

/// One Z-step, Y-step, P-step sweep.
pub fn iterate(
    laplacian: &Matrix,
    state: &JointState,
    lambda: f64,
    cfg: &JointConfig,
) -> Result<(JointState, Embedding, Objective)> {
    let z = z_step(&state.y, &state.p, lambda)?;
    let embedding = y_step(laplacian, &z, cfg.alpha, cfg.dim)?;
    let q = cfg.shot_weights.as_deref();
    let p = update_p(&z, cfg.epsilon, q);
    let obj = compute_objective(&embedding.y, &z, laplacian, cfg.alpha, lambda, cfg.epsilon, q);
    let next = JointState {
        y: embedding.y.clone(),
        z,
        p,
    };
    Ok((next, embedding, obj))
}

fn run_from(laplacian: &Matrix, y0: Matrix, lambda0: f64, cfg: &JointConfig) -> Result<JointSolution> {
    let lambda = lambda0 / cfg.rho;
    let mut state = JointState::start(y0);
    let mut records: Vec<IterationRecord> = Vec::with_capacity(cfg.max_iters);
    let mut best: Option<(f64, JointState, Embedding)> = None;
    let mut converged = false;

    for _ in 0..cfg.max_iters {
        let (next, embedding, obj) = iterate(laplacian, &state, lambda, cfg)?;
        records.push(IterationRecord {
            augmented: obj.augmented,
            objective: obj.true_obj,
            delta_z: (&next.z - &state.z).norm(),
            delta_y: (&next.y - &state.y).norm(),
        });
        if best.as_ref().is_none_or(|(b, _, _)| obj.augmented <= *b) {
            best = Some((obj.augmented, next.clone(), embedding));
        }
        state = next;
        if let [.., prev, cur] = records.as_slice() {
            if (prev.augmented - cur.augmented).abs() < cfg.rel_tol * prev.augmented.abs().max(f64::MIN_POSITIVE) {
                converged = true;
                break;
            }
        }
    }

    let (_, state, embedding) = best.expect("max_iters >= 1");
    Ok(JointSolution {
        embedding,
        z: state.z,
        p: state.p,
        trace: OptimizerTrace {
            records,
            converged,
            lambda0,
            lambda,
        },
    })
}

/// Random perturbation of `y` re-orthonormalized through a QR factorization.
fn perturbed(y: &Matrix, scale: f64, rng: &mut ChaCha8Rng) -> Matrix {
    let noisy = Matrix::from_fn(y.nrows(), y.ncols(), |i, j| {
        let g: f64 = StandardNormal.sample(rng);
        y[(i, j)] + scale * g
    });
    let q = QR::new(noisy.transpose()).q();
    let mut out = q.transpose();
    for mut row in out.row_iter_mut() {
        let mut v: Vec<f64> = row.iter().copied().collect();
        fix_sign(&mut v);
        row.copy_from_slice(&v);
    }
    out
}

/// Runs the alternating minimization from the Laplacian eigenmap of
/// `laplacian` (plus any configured restarts).
///
/// `lambda0` is computed once from the initial embedding and stays fixed, so
/// every iteration decreases the same function. Hitting `max_iters` is not
/// an error; the trace then reports `converged = false`.
pub fn optimize(laplacian: &Matrix, cfg: &JointConfig) -> Result<JointSolution> {
    let n = laplacian.nrows();
    cfg.validate(n)?;
    let init = initial_embedding(laplacian, cfg.dim, cfg.zero_tol)?;
    let lambda0 = compute_lambda0(&init.y);
    if !(lambda0 > 0.0) {
        return Err(Error::InvalidArgument("initial embedding is zero".into()));
    }

    let mut best = run_from(laplacian, init.y.clone(), lambda0, cfg)?;
    if cfg.restarts > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for _ in 0..cfg.restarts {
            let y0 = perturbed(&init.y, cfg.restart_scale, &mut rng);
            let candidate = run_from(laplacian, y0, lambda0, cfg)?;
            let final_obj = |s: &JointSolution| s.trace.records.last().map_or(f64::INFINITY, |r| r.augmented);
            if final_obj(&candidate) < final_obj(&best) {
                best = candidate;
            }
        }
    }
    Ok(best)
}
