//! Trace, summary and trajectory files.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::agent::TraceEvent;

use super::batch::{BatchSummary, EpisodeRecord};

#[derive(Debug, Serialize)]
struct EpisodeLine<'a> {
    episode: usize,
    #[serde(flatten)]
    event: &'a TraceEvent,
}

fn csv_error(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::other(format!("{other:?}")),
    }
}

/// Writes one trace as JSONL.
pub fn write_trace<W: Write>(out: W, trace: &[TraceEvent]) -> io::Result<()> {
    let mut out = BufWriter::new(out);
    for ev in trace {
        serde_json::to_writer(&mut out, ev)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// All traces in one JSONL stream, each line tagged with its episode index.
pub fn write_concatenated_traces<W: Write>(out: W, records: &[EpisodeRecord]) -> io::Result<()> {
    let mut out = BufWriter::new(out);
    for rec in records {
        for event in &rec.trace {
            serde_json::to_writer(&mut out, &EpisodeLine { episode: rec.index, event })?;
            out.write_all(b"\n")?;
        }
    }
    out.flush()
}

/// `traces.jsonl` -> `traces.3.jsonl` for episode 3.
pub fn split_trace_path(path: &Path, index: usize) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{index}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{index}"),
    };
    path.with_file_name(name)
}

pub fn write_traces(path: &Path, records: &[EpisodeRecord], split: bool) -> io::Result<()> {
    if split {
        for rec in records {
            write_trace(File::create(split_trace_path(path, rec.index))?, &rec.trace)?;
        }
        Ok(())
    } else {
        write_concatenated_traces(File::create(path)?, records)
    }
}

pub const SUMMARY_HEADER: [&str; 9] = [
    "episodes",
    "solve_rate",
    "abandon_rate",
    "stepcap_rate",
    "mean_steps",
    "mean_plan_changes",
    "mean_corrections",
    "mean_final_valence",
    "mean_final_frustration",
];

pub fn write_summary<W: Write>(out: W, s: &BatchSummary) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER).map_err(csv_error)?;
    w.write_record([
        s.episodes.to_string(),
        s.solve_rate.to_string(),
        s.abandon_rate.to_string(),
        s.stepcap_rate.to_string(),
        s.mean_steps.to_string(),
        s.mean_plan_changes.to_string(),
        s.mean_corrections.to_string(),
        s.mean_final_valence.to_string(),
        s.mean_final_frustration.to_string(),
    ])
    .map_err(csv_error)?;
    w.flush()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub step: usize,
    pub mean_valence: f64,
    pub mean_frustration: f64,
    pub n_active: usize,
}

/// Per-step means over the episodes still running at that step.
pub fn trajectory(records: &[EpisodeRecord]) -> Vec<TrajectoryRow> {
    let longest = records.iter().map(|r| r.trace.len()).max().unwrap_or(0);
    (0..longest)
        .map(|step| {
            let active: Vec<&TraceEvent> = records.iter().filter_map(|r| r.trace.get(step)).collect();
            let n = active.len() as f64;
            TrajectoryRow {
                step,
                mean_valence: active.iter().map(|e| e.valence).sum::<f64>() / n,
                mean_frustration: active.iter().map(|e| e.frustration).sum::<f64>() / n,
                n_active: active.len(),
            }
        })
        .collect()
}

pub fn write_trajectory<W: Write>(out: W, rows: &[TrajectoryRow]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "mean_valence", "mean_frustration", "n_active"]).map_err(csv_error)?;
    for r in rows {
        w.write_record([
            r.step.to_string(),
            r.mean_valence.to_string(),
            r.mean_frustration.to_string(),
            r.n_active.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()
}

pub struct OutputPaths<'a> {
    pub summary: &'a Path,
    pub traces: &'a Path,
    pub trajectories: &'a Path,
    pub split_traces: bool,
}

pub fn write_outputs(summary: &BatchSummary, records: &[EpisodeRecord], paths: &OutputPaths<'_>) -> io::Result<()> {
    write_traces(paths.traces, records, paths.split_traces)?;
    write_summary(File::create(paths.summary)?, summary)?;
    write_trajectory(File::create(paths.trajectories)?, &trajectory(records))
}
