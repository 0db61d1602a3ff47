//! Weight curves and length-scalable summaries.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::dataset::ShotRecord;
use crate::linalg::row_norm;
use crate::similarity_graph::BlockIndex;
use crate::Matrix;

/// Importance of every shot, flat order: the row norms of `Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightCurve {
    pub weights: Vec<f64>,
}

pub fn weight_curve(z: &Matrix) -> WeightCurve {
    WeightCurve {
        weights: (0..z.nrows()).map(|i| row_norm(z, i)).collect(),
    }
}

/// Candidate representatives: per view, shots whose weight is positive and
/// at least that of each temporal neighbour. The first shot of a plateau is
/// the only one kept. Flat indices are returned in ascending order.
pub fn local_maxima(curve: &WeightCurve, index: &BlockIndex) -> Vec<usize> {
    let w = &curve.weights;
    let mut out = Vec::new();
    for view in 1..=index.num_views() {
        let range = index.view_range(view);
        for i in range.clone() {
            if !(w[i] > 0.0) {
                continue;
            }
            let left_ok = i == range.start || w[i] > w[i - 1];
            let right_ok = i + 1 == range.end || w[i] >= w[i + 1];
            if left_ok && right_ok {
                out.push(i);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryEntry {
    pub flat_index: usize,
    pub view: usize,
    pub shot: usize,
    pub frame_start: usize,
    pub frame_end: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    /// Selected shots, best first.
    pub entries: Vec<SummaryEntry>,
    pub requested_length: usize,
}

impl Summary {
    pub fn flat_indices(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.flat_index).collect()
    }
}

/// Higher weight first, then earlier start frame, then lower view id.
fn rank_order(a: usize, b: usize, w: &[f64], shots: &[ShotRecord]) -> Ordering {
    w[b].total_cmp(&w[a])
        .then(shots[a].frame_start.cmp(&shots[b].frame_start))
        .then(shots[a].view.cmp(&shots[b].view))
        .then(a.cmp(&b))
}

/// All candidates with positive weight, best first.
pub fn rank_candidates(candidates: &[usize], curve: &WeightCurve, shots: &[ShotRecord]) -> Vec<usize> {
    let w = &curve.weights;
    let mut ranked: Vec<usize> = candidates.iter().copied().filter(|&i| w[i] > 0.0).collect();
    ranked.sort_by(|&a, &b| rank_order(a, b, w, shots));
    ranked.dedup();
    ranked
}

/// Picks up to `length` shots among `candidates`.
///
/// Without coverage this is the top of the candidate ranking, so a shorter
/// summary is always a prefix of a longer one. With coverage the frame
/// timeline spanned by all shots is cut into `length` equal bins (by start
/// frame), the best candidate of every non-empty bin is taken, and any slots
/// left are filled from the global ranking. Zero-weight shots are never
/// selected, so the result can be shorter than requested.
pub fn select_summary(
    candidates: &[usize],
    curve: &WeightCurve,
    shots: &[ShotRecord],
    length: usize,
    coverage: bool,
) -> Summary {
    let ranked = rank_candidates(candidates, curve, shots);
    let chosen: Vec<usize> = if !coverage || length == 0 || ranked.is_empty() {
        ranked.iter().copied().take(length).collect()
    } else {
        let first = shots.iter().map(|s| s.frame_start).min().unwrap_or(1);
        let last = shots.iter().map(|s| s.frame_end).max().unwrap_or(first);
        let span = (last + 1 - first) as f64;
        let bin_of = |i: usize| {
            let pos = (shots[i].frame_start - first) as f64 / span;
            ((pos * length as f64) as usize).min(length - 1)
        };
        let mut picked: Vec<usize> = Vec::new();
        let mut filled = alloc::vec![false; length];
        for &i in &ranked {
            let b = bin_of(i);
            if !filled[b] {
                filled[b] = true;
                picked.push(i);
            }
        }
        for &i in &ranked {
            if picked.len() >= length {
                break;
            }
            if !picked.contains(&i) {
                picked.push(i);
            }
        }
        picked.sort_by(|&a, &b| rank_order(a, b, &curve.weights, shots));
        picked.truncate(length);
        picked
    };

    Summary {
        entries: chosen
            .into_iter()
            .map(|i| SummaryEntry {
                flat_index: i,
                view: shots[i].view,
                shot: shots[i].shot,
                frame_start: shots[i].frame_start,
                frame_end: shots[i].frame_end,
                weight: curve.weights[i],
            })
            .collect(),
        requested_length: length,
    }
}
