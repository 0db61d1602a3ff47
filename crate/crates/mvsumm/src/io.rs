//! Text file formats.
//!
//! A dataset directory holds one feature file per view (`view_1.csv`,
//! `view_2.csv`, ...) and `shots.json`; `ground_truth.json` sits next to them
//! when annotations exist.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use mvsumm_core::evaluator::Metrics;
use mvsumm_core::joint_optimizer::OptimizerTrace;
use mvsumm_core::{Event, GroundTruth, Matrix, MultiViewDataset, ShotRecord, Summary, SummaryEntry, WeightCurve};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const SHOTS_FILE: &str = "shots.json";
pub const GROUND_TRUTH_FILE: &str = "ground_truth.json";

pub fn view_file_name(view: usize) -> String {
    format!("view_{view}.csv")
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn parse_floats(line: &str, path: &Path, line_no: usize) -> Result<Vec<f64>> {
    line.split(',')
        .map(|field| {
            let field = field.trim();
            field
                .parse::<f64>()
                .map_err(|_| CliError::parse(path, format!("line {line_no}: not a number: {field:?}")))
        })
        .collect()
}

fn header_field(header: &str, key: &str, path: &Path) -> Result<usize> {
    let prefix = format!("{key}=");
    header
        .split_whitespace()
        .find_map(|tok| tok.strip_prefix(prefix.as_str()))
        .ok_or_else(|| CliError::parse(path, format!("header lacks {key}=")))?
        .parse()
        .map_err(|_| CliError::parse(path, format!("header field {key} is not a count")))
}

/// Parses a feature file: header `# view=<k> dim=<D> shots=<N>`, then `D`
/// rows of `N` comma-separated values.
pub fn parse_view_csv(text: &str, path: &Path) -> Result<(usize, Matrix)> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| CliError::parse(path, "empty file"))?;
    let header = header
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| CliError::parse(path, "first line must be the `# view=.. dim=.. shots=..` header"))?;
    let view = header_field(header, "view", path)?;
    let dim = header_field(header, "dim", path)?;
    let shots = header_field(header, "shots", path)?;

    let mut data = Vec::with_capacity(dim * shots);
    let mut rows = 0;
    for (i, line) in lines {
        let values = parse_floats(line, path, i + 1)?;
        if values.len() != shots {
            return Err(CliError::parse(
                path,
                format!("line {}: {} values, header says shots={shots}", i + 1, values.len()),
            ));
        }
        data.extend(values);
        rows += 1;
    }
    if rows != dim {
        return Err(CliError::parse(path, format!("{rows} rows, header says dim={dim}")));
    }
    Ok((view, Matrix::from_row_slice(dim, shots, &data)))
}

pub fn format_view_csv(view: usize, x: &Matrix) -> String {
    let mut out = format!("# view={view} dim={} shots={}\n", x.nrows(), x.ncols());
    out.push_str(&format_matrix_csv(x));
    out
}

/// Plain comma-separated rows, shortest round-trip formatting.
pub fn format_matrix_csv(x: &Matrix) -> String {
    let mut out = String::new();
    for row in x.row_iter() {
        let fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotJson {
    pub view: usize,
    pub shot: usize,
    pub frame_start: usize,
    pub frame_end: usize,
}

impl From<&ShotRecord> for ShotJson {
    fn from(s: &ShotRecord) -> Self {
        ShotJson {
            view: s.view,
            shot: s.shot,
            frame_start: s.frame_start,
            frame_end: s.frame_end,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventJson {
    pub event_id: u64,
    pub frame_start: usize,
    pub frame_end: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub views: Option<Vec<usize>>,
}

fn from_json<T: for<'de> Deserialize<'de>>(text: &str, path: &Path) -> Result<T> {
    serde_json::from_str(text).map_err(|e| CliError::parse(path, e.to_string()))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data always serializes");
    s.push('\n');
    s
}

pub fn read_shots(path: &Path) -> Result<Vec<ShotRecord>> {
    let raw: Vec<ShotJson> = from_json(&read_text(path)?, path)?;
    Ok(raw
        .into_iter()
        .map(|s| ShotRecord::new(s.view, s.shot, s.frame_start, s.frame_end))
        .collect())
}

pub fn format_shots(shots: &[ShotRecord]) -> String {
    to_json(&shots.iter().map(ShotJson::from).collect::<Vec<_>>())
}

pub fn read_ground_truth(path: &Path) -> Result<GroundTruth> {
    let raw: Vec<EventJson> = from_json(&read_text(path)?, path)?;
    let mut events = Vec::with_capacity(raw.len());
    for e in raw {
        if e.views.as_ref().is_some_and(|v| v.is_empty()) {
            return Err(CliError::parse(path, format!("event {} lists no views", e.event_id)));
        }
        events.push(Event {
            id: e.event_id,
            frame_start: e.frame_start,
            frame_end: e.frame_end,
            views: e.views,
        });
    }
    Ok(GroundTruth::new(events)?)
}

pub fn format_ground_truth(gt: &GroundTruth) -> String {
    let raw: Vec<EventJson> = gt
        .events
        .iter()
        .map(|e| EventJson {
            event_id: e.id,
            frame_start: e.frame_start,
            frame_end: e.frame_end,
            views: e.views.clone(),
        })
        .collect();
    to_json(&raw)
}

/// Loads `view_*.csv` and `shots.json` from `dir` and normalizes every
/// descriptor to unit length.
pub fn load_dataset(dir: &Path) -> Result<MultiViewDataset> {
    let mut views = Vec::new();
    loop {
        let k = views.len() + 1;
        let path = dir.join(view_file_name(k));
        if !path.exists() {
            break;
        }
        let (header_view, x) = parse_view_csv(&read_text(&path)?, &path)?;
        if header_view != k {
            return Err(CliError::parse(&path, format!("header says view={header_view}, expected {k}")));
        }
        views.push(x);
    }
    if views.is_empty() {
        return Err(CliError::io(
            dir.join(view_file_name(1)),
            std::io::Error::new(std::io::ErrorKind::NotFound, "no view files found"),
        ));
    }
    let shots = read_shots(&dir.join(SHOTS_FILE))?;
    let mut ds = MultiViewDataset::new(views, shots)?;
    ds.normalize_columns()?;
    Ok(ds)
}

/// Writes the feature files and shot metadata; returns the written paths.
pub fn write_dataset(dir: &Path, ds: &MultiViewDataset) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::new();
    for (k, x) in ds.views().iter().enumerate() {
        let path = dir.join(view_file_name(k + 1));
        write_text(&path, &format_view_csv(k + 1, x))?;
        written.push(path);
    }
    let path = dir.join(SHOTS_FILE);
    write_text(&path, &format_shots(ds.shots()))?;
    written.push(path);
    Ok(written)
}

/// Per-frame descriptors: one comma-separated row per frame. Blank lines and
/// lines starting with `#` are skipped.
pub fn parse_frames_csv(text: &str, path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut frames: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let row = parse_floats(t, path, i + 1)?;
        if let Some(first) = frames.first() {
            if first.len() != row.len() {
                return Err(CliError::parse(
                    path,
                    format!("line {}: {} values, earlier frames have {}", i + 1, row.len(), first.len()),
                ));
            }
        }
        frames.push(row);
    }
    Ok(frames)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryShotJson {
    pub rank: usize,
    pub flat_index: usize,
    pub view: usize,
    pub shot: usize,
    pub frame_start: usize,
    pub frame_end: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryJson {
    pub requested_length: usize,
    pub shots: Vec<SummaryShotJson>,
}

pub fn format_summary(summary: &Summary) -> String {
    let doc = SummaryJson {
        requested_length: summary.requested_length,
        shots: summary
            .entries
            .iter()
            .enumerate()
            .map(|(r, e)| SummaryShotJson {
                rank: r + 1,
                flat_index: e.flat_index,
                view: e.view,
                shot: e.shot,
                frame_start: e.frame_start,
                frame_end: e.frame_end,
                weight: e.weight,
            })
            .collect(),
    };
    to_json(&doc)
}

pub fn read_summary(path: &Path) -> Result<Summary> {
    let doc: SummaryJson = from_json(&read_text(path)?, path)?;
    let mut shots = doc.shots;
    shots.sort_by_key(|s| s.rank);
    Ok(Summary {
        entries: shots
            .into_iter()
            .map(|s| SummaryEntry {
                flat_index: s.flat_index,
                view: s.view,
                shot: s.shot,
                frame_start: s.frame_start,
                frame_end: s.frame_end,
                weight: s.weight,
            })
            .collect(),
        requested_length: doc.requested_length,
    })
}

pub fn format_curve(curve: &WeightCurve, shots: &[ShotRecord]) -> String {
    let mut out = String::from("flat_index,view,shot,weight\n");
    for (i, (w, s)) in curve.weights.iter().zip(shots).enumerate() {
        let _ = writeln!(out, "{i},{},{},{w}", s.view, s.shot);
    }
    out
}

pub fn format_trace(trace: &OptimizerTrace) -> String {
    let mut out = String::from("iteration,augmented_obj,true_obj,dZ,dY\n");
    for (i, r) in trace.records.iter().enumerate() {
        let _ = writeln!(out, "{},{},{},{},{}", i + 1, r.augmented, r.objective, r.delta_z, r.delta_y);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsJson {
    pub mode: String,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    /// Number of detected events.
    pub matched: usize,
    pub matched_events: Vec<u64>,
    pub redundant: usize,
    pub unmatched: usize,
}

pub fn metrics_json(m: &Metrics, mode: &str) -> MetricsJson {
    MetricsJson {
        mode: mode.to_string(),
        precision: m.precision,
        recall: m.recall,
        f_measure: m.f_measure,
        matched: m.matched_events.len(),
        matched_events: m.matched_events.clone(),
        redundant: m.redundant,
        unmatched: m.unmatched,
    }
}

pub fn format_metrics(m: &MetricsJson) -> String {
    to_json(m)
}

pub fn format_manifest<T: Serialize>(manifest: &T) -> String {
    to_json(manifest)
}
