//! Tanner graphs, quasi-cyclic base graphs and their layer structure.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("{what} index {index} out of range (bound {bound})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },
    #[error("duplicate edge between check {check} and variable {var}")]
    DuplicateEdge { check: usize, var: usize },
    #[error("lifting size must be at least 1")]
    ZeroLifting,
    #[error("punctured set is empty")]
    NoPunctured,
    #[error("no check touches exactly one punctured variable; fall back to pure priority order")]
    NoFirstCheck,
    #[error("layer map covers {got} checks, graph has {expected}")]
    LayerMismatch { expected: usize, got: usize },
}

/// Sparse bipartite code graph.
///
/// Edges are numbered by their position on the check side, so the edges of
/// check `i` form the contiguous range [`TannerGraph::check_edges`]. Each
/// variable keeps the list of its edge ids, ordered by ascending check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TannerGraph {
    num_vars: usize,
    check_offsets: Vec<usize>,
    edge_var: Vec<usize>,
    edge_check: Vec<usize>,
    var_offsets: Vec<usize>,
    var_edge_ids: Vec<usize>,
}

impl TannerGraph {
    /// Builds a graph from the neighbor list of every check. Neighbor order
    /// inside a check is preserved.
    pub fn from_check_lists<L: AsRef<[usize]>>(num_vars: usize, checks: &[L]) -> Result<Self, GraphError> {
        let mut check_offsets = Vec::with_capacity(checks.len() + 1);
        let mut edge_var = Vec::new();
        let mut edge_check = Vec::new();
        let mut seen = vec![usize::MAX; num_vars];
        check_offsets.push(0);
        for (i, list) in checks.iter().enumerate() {
            for &v in list.as_ref() {
                if v >= num_vars {
                    return Err(GraphError::IndexOutOfRange {
                        what: "variable",
                        index: v,
                        bound: num_vars,
                    });
                }
                if seen[v] == i {
                    return Err(GraphError::DuplicateEdge { check: i, var: v });
                }
                seen[v] = i;
                edge_var.push(v);
                edge_check.push(i);
            }
            check_offsets.push(edge_var.len());
        }

        let mut var_offsets = vec![0usize; num_vars + 1];
        for &v in &edge_var {
            var_offsets[v + 1] += 1;
        }
        for j in 0..num_vars {
            var_offsets[j + 1] += var_offsets[j];
        }
        let mut fill = var_offsets.clone();
        let mut var_edge_ids = vec![0usize; edge_var.len()];
        // Edges are visited in check order, so every variable list ends up
        // sorted by check index.
        for (e, &v) in edge_var.iter().enumerate() {
            var_edge_ids[fill[v]] = e;
            fill[v] += 1;
        }

        Ok(Self {
            num_vars,
            check_offsets,
            edge_var,
            edge_check,
            var_offsets,
            var_edge_ids,
        })
    }

    /// Builds a graph from a dense 0/1 parity-check matrix (rows are checks).
    pub fn from_dense<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self, GraphError> {
        let num_vars = rows.first().map_or(0, |r| r.as_ref().len());
        let mut checks = Vec::with_capacity(rows.len());
        for row in rows {
            let row = row.as_ref();
            if row.len() != num_vars {
                return Err(GraphError::IndexOutOfRange {
                    what: "row length",
                    index: row.len(),
                    bound: num_vars,
                });
            }
            checks.push(
                row.iter()
                    .enumerate()
                    .filter(|(_, &b)| b != 0)
                    .map(|(j, _)| j)
                    .collect::<Vec<_>>(),
            );
        }
        Self::from_check_lists(num_vars, &checks)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_checks(&self) -> usize {
        self.check_offsets.len() - 1
    }

    pub fn num_edges(&self) -> usize {
        self.edge_var.len()
    }

    /// Edge ids of check `i`.
    #[inline]
    pub fn check_edges(&self, i: usize) -> Range<usize> {
        self.check_offsets[i]..self.check_offsets[i + 1]
    }

    /// Variables adjacent to check `i`, in edge order.
    #[inline]
    pub fn check_neighbors(&self, i: usize) -> &[usize] {
        &self.edge_var[self.check_edges(i)]
    }

    #[inline]
    pub fn check_degree(&self, i: usize) -> usize {
        self.check_offsets[i + 1] - self.check_offsets[i]
    }

    /// Edge ids of variable `j`, ordered by ascending check.
    #[inline]
    pub fn var_edges(&self, j: usize) -> &[usize] {
        &self.var_edge_ids[self.var_offsets[j]..self.var_offsets[j + 1]]
    }

    /// Checks adjacent to variable `j`, ascending.
    pub fn var_neighbors(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        self.var_edges(j).iter().map(move |&e| self.edge_check[e])
    }

    #[inline]
    pub fn var_degree(&self, j: usize) -> usize {
        self.var_offsets[j + 1] - self.var_offsets[j]
    }

    #[inline]
    pub fn edge_var(&self, e: usize) -> usize {
        self.edge_var[e]
    }

    #[inline]
    pub fn edge_check(&self, e: usize) -> usize {
        self.edge_check[e]
    }

    pub fn mean_var_degree(&self) -> f64 {
        self.num_edges() as f64 / self.num_vars as f64
    }

    pub fn mean_check_degree(&self) -> f64 {
        self.num_edges() as f64 / self.num_checks() as f64
    }
}

/// Partition of the checks into layers (one layer per base-graph row for a
/// lifted code). Members of every layer are kept in ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerMap {
    layer_of: Vec<usize>,
    offsets: Vec<usize>,
    members: Vec<usize>,
}

impl LayerMap {
    /// Builds a layer map from the layer id of every check.
    pub fn from_assignment(layer_of: Vec<usize>, num_layers: usize) -> Result<Self, GraphError> {
        let mut offsets = vec![0usize; num_layers + 1];
        for &l in &layer_of {
            if l >= num_layers {
                return Err(GraphError::IndexOutOfRange {
                    what: "layer",
                    index: l,
                    bound: num_layers,
                });
            }
            offsets[l + 1] += 1;
        }
        for l in 0..num_layers {
            offsets[l + 1] += offsets[l];
        }
        let mut fill = offsets.clone();
        let mut members = vec![0usize; layer_of.len()];
        for (c, &l) in layer_of.iter().enumerate() {
            members[fill[l]] = c;
            fill[l] += 1;
        }
        Ok(Self {
            layer_of,
            offsets,
            members,
        })
    }

    /// Every check in its own layer.
    pub fn singletons(num_checks: usize) -> Self {
        Self {
            layer_of: (0..num_checks).collect(),
            offsets: (0..=num_checks).collect(),
            members: (0..num_checks).collect(),
        }
    }

    pub fn num_layers(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn num_checks(&self) -> usize {
        self.layer_of.len()
    }

    #[inline]
    pub fn layer_of(&self, check: usize) -> usize {
        self.layer_of[check]
    }

    #[inline]
    pub fn members(&self, layer: usize) -> &[usize] {
        &self.members[self.offsets[layer]..self.offsets[layer + 1]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct BaseEntry {
    pub row: usize,
    pub col: usize,
    pub shift: usize,
}

/// Quasi-cyclic prototype matrix. Absent entries mean "no edge"; present
/// entries carry a circulant shift that is reduced modulo the lifting size
/// when the graph is expanded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseGraph {
    rows: usize,
    cols: usize,
    entries: Vec<BaseEntry>,
}

impl BaseGraph {
    pub fn new(rows: usize, cols: usize, mut entries: Vec<BaseEntry>) -> Result<Self, GraphError> {
        for e in &entries {
            if e.row >= rows {
                return Err(GraphError::IndexOutOfRange {
                    what: "base row",
                    index: e.row,
                    bound: rows,
                });
            }
            if e.col >= cols {
                return Err(GraphError::IndexOutOfRange {
                    what: "base column",
                    index: e.col,
                    bound: cols,
                });
            }
        }
        entries.sort_unstable();
        for w in entries.windows(2) {
            if (w[0].row, w[0].col) == (w[1].row, w[1].col) {
                return Err(GraphError::DuplicateEdge {
                    check: w[0].row,
                    var: w[0].col,
                });
            }
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entries sorted by (row, column).
    pub fn entries(&self) -> &[BaseEntry] {
        &self.entries
    }

    pub fn row_degree(&self, row: usize) -> usize {
        self.entries.iter().filter(|e| e.row == row).count()
    }

    /// Keeps the top-left `rows × cols` block.
    pub fn sub_graph(&self, rows: usize, cols: usize) -> Result<Self, GraphError> {
        if rows > self.rows || cols > self.cols {
            return Err(GraphError::IndexOutOfRange {
                what: "sub-graph size",
                index: rows.max(cols),
                bound: self.rows.min(self.cols),
            });
        }
        let entries = self
            .entries
            .iter()
            .filter(|e| e.row < rows && e.col < cols)
            .copied()
            .collect();
        Ok(Self { rows, cols, entries })
    }

    pub fn lift(&self, z: usize) -> Result<(TannerGraph, LayerMap), GraphError> {
        lift_base_graph(self, z)
    }
}

/// Expands every base entry `(r, c, s)` into the `z` edges
/// `check r·z+k` to `variable c·z+((k+s) mod z)`.
pub fn lift_base_graph(base: &BaseGraph, z: usize) -> Result<(TannerGraph, LayerMap), GraphError> {
    if z == 0 {
        return Err(GraphError::ZeroLifting);
    }
    let mut checks: Vec<Vec<usize>> = vec![Vec::new(); base.rows * z];
    for e in &base.entries {
        let s = e.shift % z;
        for k in 0..z {
            checks[e.row * z + k].push(e.col * z + (k + s) % z);
        }
    }
    let graph = TannerGraph::from_check_lists(base.cols * z, &checks)?;
    let layer_of = (0..base.rows * z).map(|c| c / z).collect();
    let layers = LayerMap::from_assignment(layer_of, base.rows)?;
    Ok((graph, layers))
}

/// Lowest-degree check with exactly one punctured neighbor (ties: lowest
/// index).
pub fn first_check_node(graph: &TannerGraph, punctured: &[usize]) -> Result<usize, GraphError> {
    if punctured.is_empty() {
        return Err(GraphError::NoPunctured);
    }
    let mut is_punctured = vec![false; graph.num_vars()];
    for &v in punctured {
        if v >= graph.num_vars() {
            return Err(GraphError::IndexOutOfRange {
                what: "punctured variable",
                index: v,
                bound: graph.num_vars(),
            });
        }
        is_punctured[v] = true;
    }
    let mut best: Option<(usize, usize)> = None;
    for i in 0..graph.num_checks() {
        let hits = graph.check_neighbors(i).iter().filter(|&&v| is_punctured[v]).count();
        if hits != 1 {
            continue;
        }
        let d = graph.check_degree(i);
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, i));
        }
    }
    best.map(|(_, i)| i).ok_or(GraphError::NoFirstCheck)
}
