//! Text format for QC base graphs.
//!
//! ```text
//! # comment
//! rows cols
//! row col shift
//! row col shift
//! ...
//! ```
//!
//! Indices are 0-based. Fields may be separated by whitespace, commas or
//! tabs, and `#` starts a comment.

use std::fmt::Write as _;

use dynsched_core::graph::BaseEntry;
use dynsched_core::BaseGraph;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("base graph line {line}: {message}")]
pub struct BaseGraphError {
    pub line: usize,
    pub message: String,
}

fn fields(raw: &str) -> impl Iterator<Item = &str> {
    let body = raw.split('#').next().unwrap_or("");
    body.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
}

fn parse_row(line: usize, raw: &str, want: usize) -> Result<Vec<usize>, BaseGraphError> {
    let nums = fields(raw)
        .map(|t| {
            t.parse::<usize>().map_err(|_| BaseGraphError {
                line,
                message: format!("expected a non-negative integer, found {t:?}"),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    if nums.len() != want {
        return Err(BaseGraphError {
            line,
            message: format!("expected {want} fields, found {}", nums.len()),
        });
    }
    Ok(nums)
}

pub fn parse_base_graph(text: &str) -> Result<BaseGraph, BaseGraphError> {
    let mut dims = None;
    let mut entries = Vec::new();
    let mut seen = std::collections::HashMap::new();
    let mut last = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last = line;
        if fields(raw).next().is_none() {
            continue;
        }
        let Some((rows, cols)) = dims else {
            let d = parse_row(line, raw, 2)?;
            dims = Some((d[0], d[1]));
            continue;
        };
        let v = parse_row(line, raw, 3)?;
        let (row, col, shift) = (v[0], v[1], v[2]);
        if row >= rows || col >= cols {
            return Err(BaseGraphError {
                line,
                message: format!("entry ({row}, {col}) outside a {rows}x{cols} base graph"),
            });
        }
        if let Some(first) = seen.insert((row, col), line) {
            return Err(BaseGraphError {
                line,
                message: format!("entry ({row}, {col}) already given on line {first}"),
            });
        }
        entries.push(BaseEntry { row, col, shift });
    }
    let (rows, cols) = dims.ok_or(BaseGraphError {
        line: last + 1,
        message: "missing \"rows cols\" header".into(),
    })?;
    BaseGraph::new(rows, cols, entries).map_err(|e| BaseGraphError {
        line: 1,
        message: e.to_string(),
    })
}

pub fn write_base_graph(base: &BaseGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", base.rows(), base.cols());
    for e in base.entries() {
        let _ = writeln!(out, "{} {} {}", e.row, e.col, e.shift);
    }
    out
}
