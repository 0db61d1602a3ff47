//! Multi-view shot collections and ground-truth events.
//!
//! View ids, shot indices and frame numbers are 1-based, matching the file
//! formats. Flat shot indices (rows/columns of the N×N matrices) are 0-based
//! and run view by view.

use alloc::format;
use alloc::vec::Vec;

use crate::linalg::{all_finite, sqrt};
use crate::similarity_graph::BlockIndex;
use crate::{Error, Matrix, Result};

/// Metadata of one shot: which view it belongs to and which frames it spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShotRecord {
    pub view: usize,
    pub shot: usize,
    pub frame_start: usize,
    pub frame_end: usize,
}

impl ShotRecord {
    pub fn new(view: usize, shot: usize, frame_start: usize, frame_end: usize) -> Self {
        ShotRecord {
            view,
            shot,
            frame_start,
            frame_end,
        }
    }

    /// Length of the shot in frames.
    pub fn duration(&self) -> usize {
        self.frame_end + 1 - self.frame_start
    }
}

/// Per-view feature matrices (`D × N_k`, one column per shot) with aligned
/// shot metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiViewDataset {
    views: Vec<Matrix>,
    shots: Vec<ShotRecord>,
    index: BlockIndex,
}

impl MultiViewDataset {
    /// Validates and assembles a dataset.
    ///
    /// `shots` must list every shot of view 1 first, then view 2, and so on,
    /// with shot indices `1..=N_k` inside each view and non-overlapping,
    /// increasing frame ranges.
    pub fn new(views: Vec<Matrix>, shots: Vec<ShotRecord>) -> Result<Self> {
        if views.is_empty() {
            return Err(Error::InvalidArgument("dataset has no views".into()));
        }
        let dim = views[0].nrows();
        for (k, x) in views.iter().enumerate() {
            if x.nrows() != dim {
                return Err(Error::DimensionMismatch {
                    view: k + 1,
                    expected: dim,
                    found: x.nrows(),
                });
            }
            if !all_finite(x) {
                return Err(Error::NonFinite("feature matrix"));
            }
        }
        if dim == 0 {
            return Err(Error::InvalidArgument("feature dimension is zero".into()));
        }

        let sizes: Vec<usize> = views.iter().map(|x| x.ncols()).collect();
        let mut cursor = 0;
        for (k, &n_k) in sizes.iter().enumerate() {
            let view = k + 1;
            let listed = shots[cursor..].iter().take_while(|s| s.view == view).count();
            if listed != n_k {
                return Err(Error::ShotCountMismatch {
                    view,
                    metadata: listed,
                    columns: n_k,
                });
            }
            let block = &shots[cursor..cursor + n_k];
            for (j, s) in block.iter().enumerate() {
                if s.shot != j + 1 {
                    return Err(Error::InvalidShots(format!(
                        "view {view}: expected shot index {}, found {}",
                        j + 1,
                        s.shot
                    )));
                }
                if s.frame_start == 0 || s.frame_start > s.frame_end {
                    return Err(Error::InvalidShots(format!(
                        "view {view} shot {}: bad frame range [{}, {}]",
                        s.shot, s.frame_start, s.frame_end
                    )));
                }
                if j > 0 && block[j - 1].frame_end >= s.frame_start {
                    return Err(Error::InvalidShots(format!(
                        "view {view} shot {}: frame range overlaps the previous shot",
                        s.shot
                    )));
                }
            }
            cursor += n_k;
        }
        if cursor != shots.len() {
            return Err(Error::InvalidShots(format!(
                "{} metadata records do not belong to any view",
                shots.len() - cursor
            )));
        }

        Ok(MultiViewDataset {
            views,
            shots,
            index: BlockIndex::new(&sizes),
        })
    }

    /// Scales every descriptor to unit Euclidean norm.
    pub fn normalize_columns(&mut self) -> Result<()> {
        for (k, x) in self.views.iter_mut().enumerate() {
            for (j, mut col) in x.column_iter_mut().enumerate() {
                let norm = sqrt(col.iter().map(|v| v * v).sum());
                if norm == 0.0 {
                    return Err(Error::ZeroNormDescriptor {
                        view: k + 1,
                        shot: j + 1,
                    });
                }
                col /= norm;
            }
        }
        Ok(())
    }

    pub fn num_views(&self) -> usize {
        self.views.len()
    }

    pub fn num_shots(&self) -> usize {
        self.shots.len()
    }

    pub fn dim(&self) -> usize {
        self.views[0].nrows()
    }

    pub fn views(&self) -> &[Matrix] {
        &self.views
    }

    pub fn view(&self, k: usize) -> &Matrix {
        &self.views[k - 1]
    }

    /// Shot metadata in flat order.
    pub fn shots(&self) -> &[ShotRecord] {
        &self.shots
    }

    pub fn block_index(&self) -> &BlockIndex {
        &self.index
    }

    /// Shot durations in flat order.
    pub fn durations(&self) -> Vec<f64> {
        self.shots.iter().map(|s| s.duration() as f64).collect()
    }

    /// All descriptors side by side, `D × N`, in flat order.
    pub fn stacked(&self) -> Matrix {
        let n = self.num_shots();
        let mut out = Matrix::zeros(self.dim(), n);
        let mut col = 0;
        for x in &self.views {
            out.columns_mut(col, x.ncols()).copy_from(x);
            col += x.ncols();
        }
        out
    }
}

/// An annotated event: a frame interval and the views in which it counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub id: u64,
    pub frame_start: usize,
    pub frame_end: usize,
    /// `None` means the event is visible in every view.
    pub views: Option<Vec<usize>>,
}

impl Event {
    pub fn applies_to(&self, view: usize) -> bool {
        self.views.as_ref().is_none_or(|vs| vs.contains(&view))
    }

    pub fn duration(&self) -> usize {
        self.frame_end + 1 - self.frame_start
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroundTruth {
    pub events: Vec<Event>,
}

impl GroundTruth {
    pub fn new(events: Vec<Event>) -> Result<Self> {
        for (i, e) in events.iter().enumerate() {
            if e.frame_start > e.frame_end {
                return Err(Error::InvalidGroundTruth(format!(
                    "event {}: frame_start {} after frame_end {}",
                    e.id, e.frame_start, e.frame_end
                )));
            }
            if events[..i].iter().any(|o| o.id == e.id) {
                return Err(Error::InvalidGroundTruth(format!("duplicate event id {}", e.id)));
            }
        }
        Ok(GroundTruth { events })
    }
}
