//! Shot boundary detection on per-frame descriptor streams, and temporal
//! mean pooling of frame descriptors into shot descriptors.
//!
//! Frame numbers are 1-based and ranges are inclusive.

use alloc::format;
use alloc::vec::Vec;

use crate::linalg::sqrt;
use crate::{Error, Matrix, Result};

/// Parameters of the change-based shot splitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentConfig {
    /// A boundary fires when the inter-frame change exceeds this fraction of
    /// the largest change seen so far in the current shot.
    pub change_fraction: f64,
    pub min_len: usize,
    pub max_len: usize,
}

impl Default for SegmentConfig {
    fn default() -> Self {
        SegmentConfig {
            change_fraction: 0.75,
            min_len: 32,
            max_len: 96,
        }
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// Splits a frame sequence into shots.
///
/// The change at frame `t` is the Euclidean distance between the descriptors
/// of frames `t - 1` and `t`. A boundary (new shot starting at `t`) fires
/// when that change is larger than `change_fraction` times the largest
/// change observed inside the current shot, provided the current shot
/// already has `min_len` frames. A shot reaching `max_len` frames is cut
/// unconditionally. A trailing shot shorter than `min_len` is merged into its
/// predecessor and, if that makes it too long, the merged run is split into
/// two halves.
///
/// Every returned shot has a length in `[min_len, max_len]`. The tail fix-up
/// only works when `max_len >= 2 * min_len - 1`, so narrower windows are
/// rejected.
pub fn segment_shots(frames: &[Vec<f64>], cfg: &SegmentConfig) -> Result<Vec<(usize, usize)>> {
    let SegmentConfig {
        change_fraction,
        min_len,
        max_len,
    } = *cfg;
    if min_len == 0 || min_len > max_len {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= min_len <= max_len, got min_len={min_len}, max_len={max_len}"
        )));
    }
    if max_len + 1 < 2 * min_len {
        return Err(Error::InvalidArgument(format!(
            "max_len={max_len} must be at least 2*min_len-1={} to tile arbitrary sequences",
            2 * min_len - 1
        )));
    }
    if !(change_fraction.is_finite() && change_fraction >= 0.0) {
        return Err(Error::InvalidArgument(format!("bad change_fraction {change_fraction}")));
    }
    let total = frames.len();
    if total == 0 || total < min_len {
        return Err(Error::SequenceTooShort { len: total, min_len });
    }
    let dim = frames[0].len();
    if frames.iter().any(|f| f.len() != dim) {
        return Err(Error::ShapeMismatch("frame descriptors differ in length".into()));
    }
    if frames.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("frame descriptors"));
    }

    let mut shots = Vec::new();
    let mut start = 1;
    let mut running_max = 0.0_f64;
    for t in 2..=total {
        let change = distance(&frames[t - 2], &frames[t - 1]);
        let len = t - start;
        let fires = change > change_fraction * running_max && len >= min_len;
        if fires || len == max_len {
            shots.push((start, t - 1));
            start = t;
            running_max = 0.0;
        } else {
            running_max = running_max.max(change);
        }
    }
    shots.push((start, total));

    if shots.len() > 1 {
        let (tail_start, tail_end) = shots[shots.len() - 1];
        if tail_end + 1 - tail_start < min_len {
            shots.pop();
            let (prev_start, _) = shots.pop().unwrap();
            let merged = tail_end + 1 - prev_start;
            if merged > max_len {
                let first = merged.div_ceil(2);
                shots.push((prev_start, prev_start + first - 1));
                shots.push((prev_start + first, tail_end));
            } else {
                shots.push((prev_start, tail_end));
            }
        }
    }
    Ok(shots)
}

/// Averages frame descriptors over each shot and scales the means to unit
/// norm. Column `j` of the result describes shot `j`.
pub fn pool_shot_features(frames: &[Vec<f64>], shots: &[(usize, usize)]) -> Result<Matrix> {
    if frames.is_empty() {
        return Err(Error::InvalidArgument("no frames to pool".into()));
    }
    let dim = frames[0].len();
    if frames.iter().any(|f| f.len() != dim) {
        return Err(Error::ShapeMismatch("frame descriptors differ in length".into()));
    }
    let mut expected = 1;
    for &(start, end) in shots {
        if start > end {
            return Err(Error::EmptyShot { start, end });
        }
        if start != expected || end > frames.len() {
            return Err(Error::InvalidArgument(format!(
                "shot [{start}, {end}] does not continue the tiling at frame {expected}"
            )));
        }
        expected = end + 1;
    }
    if expected != frames.len() + 1 {
        return Err(Error::InvalidArgument(format!(
            "shots cover frames 1..{} but the stream has {} frames",
            expected - 1,
            frames.len()
        )));
    }

    let mut out = Matrix::zeros(dim, shots.len());
    for (j, &(start, end)) in shots.iter().enumerate() {
        let mut col = out.column_mut(j);
        for f in &frames[start - 1..end] {
            for (c, v) in col.iter_mut().zip(f) {
                *c += v;
            }
        }
        col /= (end + 1 - start) as f64;
        let norm = col.norm();
        if !(norm > 0.0) {
            return Err(Error::ZeroNormDescriptor { view: 0, shot: j + 1 });
        }
        col /= norm;
    }
    Ok(out)
}
