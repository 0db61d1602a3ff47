//! Event-level (and frame-level) scoring of summaries.
//!
//! A summary shot detects an event when its frame range overlaps the event
//! and its view is one the event applies to. The first shot detecting an
//! event is a hit; any further shot detecting the same event, typically the
//! same moment seen from another camera, is redundant and counts against
//! precision just like a shot that detects nothing.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::dataset::GroundTruth;
use crate::summarizer::{Summary, SummaryEntry};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoringMode {
    #[default]
    Event,
    Frame,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShotMatch {
    Hit(u64),
    Redundant(u64),
    Unmatched,
}

/// Outcome for every summary entry, in summary order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub matches: Vec<ShotMatch>,
}

impl Assignment {
    pub fn matched_events(&self) -> Vec<u64> {
        let mut ids: Vec<u64> = self
            .matches
            .iter()
            .filter_map(|m| match m {
                ShotMatch::Hit(id) => Some(*id),
                _ => None,
            })
            .collect();
        ids.sort_unstable();
        ids
    }

    pub fn redundant_count(&self) -> usize {
        self.matches.iter().filter(|m| matches!(m, ShotMatch::Redundant(_))).count()
    }

    pub fn unmatched_count(&self) -> usize {
        self.matches.iter().filter(|m| matches!(m, ShotMatch::Unmatched)).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub matched_events: Vec<u64>,
    pub redundant: usize,
    pub unmatched: usize,
}

/// Harmonic mean of precision and recall; zero when both are zero.
pub fn f_measure(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

fn overlap(a: (usize, usize), b: (usize, usize)) -> usize {
    let lo = a.0.max(b.0);
    let hi = a.1.min(b.1);
    if hi >= lo {
        hi + 1 - lo
    } else {
        0
    }
}

/// Assigns each summary shot to at most one event: the one it overlaps most,
/// ties going to the lowest event id.
pub fn match_events(summary: &Summary, gt: &GroundTruth) -> Assignment {
    let mut detected: BTreeSet<u64> = BTreeSet::new();
    let matches = summary
        .entries
        .iter()
        .map(|shot| {
            let best = gt
                .events
                .iter()
                .filter(|e| e.applies_to(shot.view))
                .map(|e| (overlap((shot.frame_start, shot.frame_end), (e.frame_start, e.frame_end)), e.id))
                .filter(|(ov, _)| *ov > 0)
                .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
            match best {
                None => ShotMatch::Unmatched,
                Some((_, id)) if detected.insert(id) => ShotMatch::Hit(id),
                Some((_, id)) => ShotMatch::Redundant(id),
            }
        })
        .collect();
    Assignment { matches }
}

/// Recall over ground-truth events, precision over all summary shots.
pub fn precision_recall_f(assignment: &Assignment, gt: &GroundTruth, summary_size: usize) -> Result<Metrics> {
    if gt.events.is_empty() {
        return Err(Error::EmptyGroundTruth);
    }
    let matched = assignment.matched_events();
    let hits = matched.len() as f64;
    let precision = if summary_size > 0 { hits / summary_size as f64 } else { 0.0 };
    let recall = hits / gt.events.len() as f64;
    Ok(Metrics {
        precision,
        recall,
        f_measure: f_measure(precision, recall),
        matched_events: matched,
        redundant: assignment.redundant_count(),
        unmatched: assignment.unmatched_count(),
    })
}

/// Frame-level variant. Relevant frames are the union of all event
/// intervals. A summary frame seen in view `v` covers frame `f` when some
/// event containing `f` applies to `v`. Recall is the covered share of the
/// relevant frames; precision divides the covered frames by all summary
/// frames, so frames shown twice (from two views) or irrelevant frames
/// lower it.
pub fn frame_scores(entries: &[SummaryEntry], gt: &GroundTruth) -> Result<Metrics> {
    if gt.events.is_empty() {
        return Err(Error::EmptyGroundTruth);
    }
    let relevant: BTreeSet<usize> = gt.events.iter().flat_map(|e| e.frame_start..=e.frame_end).collect();
    let mut covered: BTreeSet<usize> = BTreeSet::new();
    let mut matched: BTreeSet<u64> = BTreeSet::new();
    let mut redundant = 0;
    let mut unmatched = 0;
    let mut total = 0;
    for shot in entries {
        for f in shot.frame_start..=shot.frame_end {
            total += 1;
            let mut hit = false;
            for e in gt.events.iter().filter(|e| e.applies_to(shot.view)) {
                if (e.frame_start..=e.frame_end).contains(&f) {
                    hit = true;
                    matched.insert(e.id);
                }
            }
            if !hit {
                unmatched += 1;
            } else if !covered.insert(f) {
                redundant += 1;
            }
        }
    }
    let precision = if total > 0 { covered.len() as f64 / total as f64 } else { 0.0 };
    let recall = covered.len() as f64 / relevant.len() as f64;
    Ok(Metrics {
        precision,
        recall,
        f_measure: f_measure(precision, recall),
        matched_events: matched.into_iter().collect(),
        redundant,
        unmatched,
    })
}

/// Scores `summary` against `gt` in the requested mode.
pub fn evaluate(summary: &Summary, gt: &GroundTruth, mode: ScoringMode) -> Result<Metrics> {
    match mode {
        ScoringMode::Event => precision_recall_f(&match_events(summary, gt), gt, summary.entries.len()),
        ScoringMode::Frame => frame_scores(&summary.entries, gt),
    }
}
