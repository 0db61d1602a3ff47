//! End-to-end analysis: graph, joint optimization and weight curve, computed
//! once. Summaries of any length are then read from the stored ranking.

use alloc::vec::Vec;

use crate::dataset::{MultiViewDataset, ShotRecord};
use crate::joint_optimizer::{optimize, JointConfig, JointSolution};
use crate::similarity_graph::{build_graph, GraphConfig, SimilarityGraph};
use crate::summarizer::{local_maxima, rank_candidates, select_summary, weight_curve, Summary, WeightCurve};
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub graph: GraphConfig,
    /// `joint.dim` is ignored when `dim` is `None`.
    pub joint: JointConfig,
    /// Embedding dimension; `None` picks `2 * K`.
    pub dim: Option<usize>,
    /// Penalize long shots: row weights are the shot durations divided by
    /// their mean.
    pub weighted: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            graph: GraphConfig::default(),
            joint: JointConfig::with_dim(0),
            dim: None,
            weighted: false,
        }
    }
}

impl PipelineConfig {
    /// The optimizer settings actually used for `dataset`.
    pub fn resolve_joint(&self, dataset: &MultiViewDataset) -> JointConfig {
        let mut joint = self.joint.clone();
        joint.dim = self.dim.unwrap_or(2 * dataset.num_views());
        if self.weighted {
            joint.shot_weights = Some(duration_weights(&dataset.durations()));
        }
        joint
    }
}

/// Durations scaled to unit mean.
pub fn duration_weights(durations: &[f64]) -> Vec<f64> {
    let mean = durations.iter().sum::<f64>() / durations.len() as f64;
    durations.iter().map(|d| d / mean).collect()
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub graph: SimilarityGraph,
    pub joint: JointConfig,
    pub solution: JointSolution,
    pub curve: WeightCurve,
    /// Local maxima of the weight curve, flat indices.
    pub candidates: Vec<usize>,
    pub shots: Vec<ShotRecord>,
}

impl Analysis {
    /// Runs the similarity graph and the joint optimizer on a (normalized)
    /// dataset.
    pub fn run(dataset: &MultiViewDataset, cfg: &PipelineConfig) -> Result<Self> {
        let graph = build_graph(dataset, &cfg.graph)?;
        let joint = cfg.resolve_joint(dataset);
        let solution = optimize(&graph.laplacian, &joint)?;
        let curve = weight_curve(&solution.z);
        let candidates = local_maxima(&curve, &graph.block_index);
        Ok(Analysis {
            graph,
            joint,
            solution,
            curve,
            candidates,
            shots: dataset.shots().to_vec(),
        })
    }

    pub fn summary(&self, length: usize, coverage: bool) -> Summary {
        select_summary(&self.candidates, &self.curve, &self.shots, length, coverage)
    }

    /// Candidates ordered best first.
    pub fn ranking(&self) -> Vec<usize> {
        rank_candidates(&self.candidates, &self.curve, &self.shots)
    }
}
