//! Planted-prototype multi-view datasets for testing and demos.

use alloc::format;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dataset::{Event, GroundTruth, MultiViewDataset, ShotRecord};
use crate::linalg::sqrt;
use crate::{Error, Matrix, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub num_views: usize,
    pub prototypes: usize,
    pub copies_per_prototype: usize,
    pub dim: usize,
    /// Expected norm of the additive noise relative to the unit-norm
    /// prototypes.
    pub noise_sigma: f64,
    /// Frames per shot.
    pub shot_len: usize,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            num_views: 2,
            prototypes: 3,
            copies_per_prototype: 2,
            dim: 16,
            noise_sigma: 0.01,
            shot_len: 48,
            seed: 0,
        }
    }
}

/// Planted dataset together with the prototype each shot was drawn from.
#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub dataset: MultiViewDataset,
    pub ground_truth: GroundTruth,
    /// Prototype index (0-based) of every shot, flat order.
    pub labels: Vec<usize>,
    /// The orthonormal prototypes, one per column.
    pub prototypes: Matrix,
}

/// Draws `prototypes` mutually orthonormal directions and, in every view,
/// `copies_per_prototype` noisy unit-norm copies of each.
///
/// Shots inside a view are laid out prototype by prototype on a shared
/// timeline of `shot_len`-frame shots, so prototype `j` occupies the same
/// frame interval in every view. The ground truth has one event per
/// prototype spanning that interval in all views.
pub fn generate_synthetic(cfg: &SyntheticConfig) -> Result<SyntheticData> {
    let SyntheticConfig {
        num_views,
        prototypes: m,
        copies_per_prototype: copies,
        dim,
        noise_sigma,
        shot_len,
        seed,
    } = *cfg;
    if m == 0 || copies == 0 || num_views == 0 || shot_len == 0 {
        return Err(Error::InvalidArgument(
            "views, prototypes, copies and shot length must all be positive".into(),
        ));
    }
    if dim < m {
        return Err(Error::InvalidArgument(format!(
            "dimension {dim} cannot hold {m} orthogonal prototypes"
        )));
    }
    if !(noise_sigma.is_finite() && noise_sigma >= 0.0) {
        return Err(Error::InvalidArgument(format!("bad noise sigma {noise_sigma}")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gaussian = || -> f64 { StandardNormal.sample(&mut rng) };

    // Modified Gram-Schmidt on Gaussian draws.
    let mut protos = Matrix::zeros(dim, m);
    let mut j = 0;
    while j < m {
        let mut v: Vec<f64> = (0..dim).map(|_| gaussian()).collect();
        for _ in 0..2 {
            for p in 0..j {
                let dot: f64 = (0..dim).map(|i| protos[(i, p)] * v[i]).sum();
                for (i, vi) in v.iter_mut().enumerate() {
                    *vi -= dot * protos[(i, p)];
                }
            }
        }
        let norm = sqrt(v.iter().map(|x| x * x).sum());
        if norm < 1e-6 {
            continue;
        }
        for (i, vi) in v.iter().enumerate() {
            protos[(i, j)] = vi / norm;
        }
        j += 1;
    }

    let per_view = m * copies;
    let entry_sigma = noise_sigma / sqrt(dim as f64);
    let mut views = Vec::with_capacity(num_views);
    let mut shots = Vec::with_capacity(num_views * per_view);
    let mut labels = Vec::with_capacity(num_views * per_view);
    for k in 0..num_views {
        let mut x = Matrix::zeros(dim, per_view);
        for col in 0..per_view {
            let proto = col / copies;
            for i in 0..dim {
                x[(i, col)] = protos[(i, proto)] + entry_sigma * gaussian();
            }
            let start = col * shot_len + 1;
            shots.push(ShotRecord::new(k + 1, col + 1, start, start + shot_len - 1));
            labels.push(proto);
        }
        views.push(x);
    }

    let events = (0..m)
        .map(|j| Event {
            id: j as u64 + 1,
            frame_start: j * copies * shot_len + 1,
            frame_end: (j + 1) * copies * shot_len,
            views: None,
        })
        .collect();

    let mut dataset = MultiViewDataset::new(views, shots)?;
    dataset.normalize_columns()?;
    Ok(SyntheticData {
        dataset,
        ground_truth: GroundTruth::new(events)?,
        labels,
        prototypes: protos,
    })
}
