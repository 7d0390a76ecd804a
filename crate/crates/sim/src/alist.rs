//! MacKay's alist format for sparse parity-check matrices.
//!
//! ```text
//! N M
//! max_var_degree max_check_degree
//! var degrees (N numbers)
//! check degrees (M numbers)
//! N lines: 1-based check indices of each variable, zero padded
//! M lines: 1-based variable indices of each check, zero padded
//! ```

use std::fmt::Write as _;

use dynsched_core::TannerGraph;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("alist line {line}: {message}")]
pub struct AlistError {
    /// 1-based line number in the input.
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> AlistError {
    AlistError {
        line,
        message: message.into(),
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next non-blank line as numbers, with its line number.
    fn numbers(&mut self, what: &str) -> Result<(usize, Vec<usize>), AlistError> {
        for (i, raw) in self.inner.by_ref() {
            self.last = i + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let nums = raw
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| err(i + 1, format!("expected a non-negative integer, found {t:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            return Ok((i + 1, nums));
        }
        Err(err(self.last + 1, format!("unexpected end of input, expected {what}")))
    }

    fn exactly(&mut self, what: &str, count: usize) -> Result<(usize, Vec<usize>), AlistError> {
        let (line, nums) = self.numbers(what)?;
        if nums.len() != count {
            return Err(err(
                line,
                format!("expected {count} values for {what}, found {}", nums.len()),
            ));
        }
        Ok((line, nums))
    }
}

/// Reads one neighbor list: nonzero 1-based indices, then zero padding.
fn neighbor_list(
    lines: &mut Lines<'_>,
    what: &str,
    degree: usize,
    bound: usize,
) -> Result<(usize, Vec<usize>), AlistError> {
    let (line, nums) = lines.numbers(what)?;
    let listed: Vec<usize> = nums.iter().copied().filter(|&x| x != 0).collect();
    if listed.len() != degree {
        return Err(err(
            line,
            format!("{what} declares degree {degree} but lists {} neighbors", listed.len()),
        ));
    }
    if let Some(&bad) = listed.iter().find(|&&x| x > bound) {
        return Err(err(line, format!("index {bad} out of range 1..={bound}")));
    }
    Ok((line, listed.into_iter().map(|x| x - 1).collect()))
}

pub fn parse_alist(text: &str) -> Result<TannerGraph, AlistError> {
    let mut lines = Lines::new(text);
    let (_, header) = lines.exactly("the header \"N M\"", 2)?;
    let (n, m) = (header[0], header[1]);
    let (max_line, maxima) = lines.exactly("the maximum degrees", 2)?;
    let (var_line, var_deg) = lines.exactly("the variable degrees", n)?;
    let (check_line, check_deg) = lines.exactly("the check degrees", m)?;
    if var_deg.iter().any(|&d| d > maxima[0]) {
        return Err(err(var_line, "variable degree exceeds the declared maximum"));
    }
    if check_deg.iter().any(|&d| d > maxima[1]) {
        return Err(err(check_line, "check degree exceeds the declared maximum"));
    }
    if var_deg.iter().sum::<usize>() != check_deg.iter().sum::<usize>() {
        return Err(err(max_line, "variable and check degrees disagree on the edge count"));
    }
    let mut var_lists = Vec::with_capacity(n);
    for (j, &d) in var_deg.iter().enumerate() {
        var_lists.push(neighbor_list(&mut lines, &format!("variable {}", j + 1), d, m)?);
    }
    let mut check_lists = Vec::with_capacity(m);
    for (i, &d) in check_deg.iter().enumerate() {
        let (line, mut list) = neighbor_list(&mut lines, &format!("check {}", i + 1), d, n)?;
        let mut sorted = list.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != list.len() {
            return Err(err(line, format!("check {} lists a variable twice", i + 1)));
        }
        list.sort_unstable();
        check_lists.push(list);
    }
    // Both halves must describe the same edges.
    for (j, (line, checks)) in var_lists.iter().enumerate() {
        for &i in checks {
            if check_lists[i].binary_search(&j).is_err() {
                return Err(err(
                    *line,
                    format!("variable {} lists check {} but not the reverse", j + 1, i + 1),
                ));
            }
        }
    }
    TannerGraph::from_check_lists(n, &check_lists).map_err(|e| err(check_line, e.to_string()))
}

pub fn write_alist(graph: &TannerGraph) -> String {
    let (n, m) = (graph.num_vars(), graph.num_checks());
    let var_deg: Vec<usize> = (0..n).map(|j| graph.var_degree(j)).collect();
    let check_deg: Vec<usize> = (0..m).map(|i| graph.check_degree(i)).collect();
    let max_v = var_deg.iter().copied().max().unwrap_or(0);
    let max_c = check_deg.iter().copied().max().unwrap_or(0);
    // Rows keep at least one entry so that an isolated node is not a blank line.
    let (width_v, width_c) = (max_v.max(1), max_c.max(1));
    let join = |it: &mut dyn Iterator<Item = usize>| it.map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let mut out = String::new();
    let _ = writeln!(out, "{n} {m}");
    let _ = writeln!(out, "{max_v} {max_c}");
    let _ = writeln!(out, "{}", join(&mut var_deg.iter().copied()));
    let _ = writeln!(out, "{}", join(&mut check_deg.iter().copied()));
    for j in 0..n {
        let mut row: Vec<usize> = graph.var_neighbors(j).map(|i| i + 1).collect();
        row.resize(width_v, 0);
        let _ = writeln!(out, "{}", join(&mut row.into_iter()));
    }
    for i in 0..m {
        let mut row: Vec<usize> = graph.check_neighbors(i).iter().map(|&j| j + 1).collect();
        row.resize(width_c, 0);
        let _ = writeln!(out, "{}", join(&mut row.into_iter()));
    }
    out
}
