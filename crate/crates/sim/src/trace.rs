//! JSON-lines decode traces and their analysis.
//!
//! Every line is one unit update:
//!
//! ```json
//! {"scheduler":"dyn-pebp","es_n0_db":-1.8,"trial":0,"ordinal":0,"iteration":0,"unit":3,
//!  "key":0.12,"p_before":0.12,"p_after":0.05,"updates":1,"max_residual":2.4}
//! ```
//!
//! Consecutive lines with the same `(scheduler, es_n0_db, trial)` belong to
//! one decode.

use std::io::{BufRead, Write};

use dynsched_core::schedule::TraceEvent;
use dynsched_core::SchedulerKind;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceLine {
    pub scheduler: SchedulerKind,
    pub es_n0_db: Option<f64>,
    pub trial: u64,
    #[serde(flatten)]
    pub event: TraceEvent,
}

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("trace line {line}: {source}")]
    Malformed { line: usize, source: serde_json::Error },
    #[error("trace line {line}: unit {unit} outside 0..{units}")]
    UnitRange { line: usize, unit: usize, units: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn write_trace<W: Write>(
    out: &mut W,
    scheduler: SchedulerKind,
    es_n0_db: Option<f64>,
    trial: u64,
    events: &[TraceEvent],
) -> std::io::Result<()> {
    for event in events {
        let line = TraceLine {
            scheduler,
            es_n0_db,
            trial,
            event: event.clone(),
        };
        serde_json::to_writer(&mut *out, &line)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TraceReport {
    pub events: u64,
    pub decodes: u64,
    /// Back-to-back updates of the same unit within a decode.
    pub immediate_repeats: u64,
    /// The subset of immediate repeats that straddle an iteration boundary.
    pub boundary_repeats: u64,
    /// Updates per unit, summed over decodes.
    pub histogram: Vec<u64>,
    /// Largest max-minus-min of per-unit update counts seen at any point of
    /// any decode.
    pub max_spread: u64,
}

struct Decode {
    key: (SchedulerKind, Option<u64>, u64),
    last: Option<(usize, u32)>,
    counts: Vec<u64>,
}

impl Decode {
    fn spread(&self) -> u64 {
        let max = self.counts.iter().copied().max().unwrap_or(0);
        let min = self.counts.iter().copied().min().unwrap_or(0);
        max - min
    }
}

/// Reads a trace and reports repeats and update balance. `units` fixes the
/// number of units per decode; otherwise it is taken as one more than the
/// largest unit id in the trace, and the spread is computed after reading.
pub fn analyze_trace<R: BufRead>(input: R, units: Option<usize>) -> Result<TraceReport, TraceError> {
    let mut lines = Vec::new();
    for (i, raw) in input.lines().enumerate() {
        let raw = raw?;
        if raw.trim().is_empty() {
            continue;
        }
        let line: TraceLine =
            serde_json::from_str(&raw).map_err(|source| TraceError::Malformed { line: i + 1, source })?;
        if let Some(u) = units {
            if line.event.unit >= u {
                return Err(TraceError::UnitRange {
                    line: i + 1,
                    unit: line.event.unit,
                    units: u,
                });
            }
        }
        lines.push(line);
    }
    let units = units.unwrap_or_else(|| lines.iter().map(|l| l.event.unit + 1).max().unwrap_or(0));

    let mut report = TraceReport {
        histogram: vec![0; units],
        ..Default::default()
    };
    let mut current: Option<Decode> = None;
    for line in &lines {
        let key = (line.scheduler, line.es_n0_db.map(f64::to_bits), line.trial);
        let fresh = current.as_ref().is_none_or(|d| d.key != key);
        if fresh {
            report.decodes += 1;
            current = Some(Decode {
                key,
                last: None,
                counts: vec![0; units],
            });
        }
        let d = current.as_mut().expect("set above");
        let (unit, iteration) = (line.event.unit, line.event.iteration);
        if let Some((prev_unit, prev_iter)) = d.last {
            if prev_unit == unit {
                report.immediate_repeats += 1;
                report.boundary_repeats += (prev_iter != iteration) as u64;
            }
        }
        d.last = Some((unit, iteration));
        d.counts[unit] += 1;
        report.histogram[unit] += 1;
        report.events += 1;
        report.max_spread = report.max_spread.max(d.spread());
    }
    Ok(report)
}
