//! Multi-view shot summarization.
//!
//! Shots from several overlapping camera views are linked through sparse
//! self-expressive codes (within a view) and sparse cross-codes (between
//! views). The resulting similarity graph drives a Laplacian embedding that
//! is optimized jointly with a row-sparse self-representation of the
//! embedded shots. Row norms of that representation rank the shots, and
//! summaries of any requested length are read off the ranking without
//! re-running the optimizer.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. File formats and the command-line driver live in the companion
//! `mvsumm` crate.
//!
//! ```text
//! descriptors ──► similarity_graph ──► embedding ──┐
//!                  (l1 codes, W, L)    (Y0)         ├─► joint_optimizer ──► summarizer ──► evaluator
//!                                                   │   (Z, Y, P loop)      (curve, peaks)  (P/R/F)
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;
mod linalg;

pub mod dataset;
pub mod embedding;
pub mod evaluator;
pub mod joint_optimizer;
pub mod pipeline;
pub mod segmentation;
pub mod similarity_graph;
pub mod sparse_solvers;
pub mod summarizer;
pub mod synthetic;

pub use error::{Error, Result};

pub use dataset::{Event, GroundTruth, MultiViewDataset, ShotRecord};
pub use embedding::Embedding;
pub use evaluator::{Assignment, Metrics, ScoringMode};
pub use joint_optimizer::{JointConfig, JointSolution, OptimizerTrace};
pub use pipeline::{Analysis, PipelineConfig};
pub use similarity_graph::{BlockIndex, GraphConfig, LaplacianKind, SimilarityGraph};
pub use sparse_solvers::SolverConfig;
pub use summarizer::{Summary, SummaryEntry, WeightCurve};

/// Dense column-major matrix used throughout the crate.
pub type Matrix = nalgebra::DMatrix<f64>;
/// Dense column vector.
pub type Vector = nalgebra::DVector<f64>;
