//! Code configurations built on top of a lifted base graph.
//!
//! A [`CodeSpec`] picks the lifting size, how many base rows are kept (the
//! rate knob of 5G-style base graphs) and which variables are punctured,
//! shortened or truncated. [`LdpcCode`] is the resulting decodable object.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::bg1_table::BG1_ENTRIES;
use crate::graph::{first_check_node, BaseEntry, BaseGraph, GraphError, LayerMap, TannerGraph};

/// Lifting sizes of TS 38.212 Table 5.3.2-1, grouped by set index.
const LIFTING_SETS: [&[usize]; 8] = [
    &[2, 4, 8, 16, 32, 64, 128, 256],
    &[3, 6, 12, 24, 48, 96, 192, 384],
    &[5, 10, 20, 40, 80, 160, 320],
    &[7, 14, 28, 56, 112, 224],
    &[9, 18, 36, 72, 144, 288],
    &[11, 22, 44, 88, 176, 352],
    &[13, 26, 52, 104, 208],
    &[15, 30, 60, 120, 240],
];

pub const BG1_ROWS: usize = 46;
pub const BG1_COLS: usize = 68;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodeError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("lifting size {0} is not a 5G NR lifting size")]
    UnsupportedLifting(usize),
    #[error("invalid code spec: {0}")]
    InvalidSpec(&'static str),
    #[error("base graph {0:?} must be resolved by the caller")]
    UnresolvedBase(String),
}

/// Set index `iLS` for a 5G NR lifting size.
pub fn lifting_set_index(z: usize) -> Option<usize> {
    LIFTING_SETS.iter().position(|set| set.contains(&z))
}

/// 5G NR base graph 1 with the shifts of lifting set `set_index`.
pub fn bg1(set_index: usize) -> BaseGraph {
    assert!(set_index < 8, "lifting set index must be below 8");
    let entries = BG1_ENTRIES
        .iter()
        .map(|&(row, col, shifts)| BaseEntry {
            row: row as usize,
            col: col as usize,
            shift: shifts[set_index] as usize,
        })
        .collect();
    BaseGraph::new(BG1_ROWS, BG1_COLS, entries).expect("shipped BG1 table is well formed")
}

/// Base graph 1 with the shift set matching lifting size `z`.
pub fn bg1_for_lifting(z: usize) -> Result<BaseGraph, CodeError> {
    lifting_set_index(z).map(bg1).ok_or(CodeError::UnsupportedLifting(z))
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum BaseSource {
    /// The built-in 5G NR base graph 1.
    Bg1,
    /// A base-graph text file, loaded by the caller.
    File(String),
}

/// How a code is derived from a base graph.
///
/// The base graph is assumed to have the 5G layout: `cols - rows`
/// information columns followed by parity columns, where keeping the first
/// `m` rows also keeps the first `cols - rows + m` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeSpec {
    pub base: BaseSource,
    pub lifting: usize,
    /// Base rows kept; `None` keeps all of them.
    pub base_rows: Option<usize>,
    /// Leading base columns that are punctured (2 for 5G NR).
    pub punctured_cols: usize,
    /// Known-zero information bits, taken from the end of the information
    /// block.
    pub shortened: usize,
    /// Trailing parity bits that are not transmitted.
    pub truncated: usize,
    /// Rate the configuration is meant to approximate, for reporting.
    pub nominal_rate: Option<f64>,
}

impl CodeSpec {
    pub fn bg1(lifting: usize, base_rows: usize) -> Self {
        Self {
            base: BaseSource::Bg1,
            lifting,
            base_rows: Some(base_rows),
            punctured_cols: 2,
            shortened: 0,
            truncated: 0,
            nominal_rate: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarRole {
    Transmitted,
    Punctured,
    Shortened,
    Truncated,
}

/// A decodable code: graph, layers and the role of every variable.
#[derive(Debug, Clone)]
pub struct LdpcCode {
    graph: TannerGraph,
    layers: LayerMap,
    singletons: LayerMap,
    roles: Vec<VarRole>,
    punctured: Vec<usize>,
    info_vars: usize,
    lifting: usize,
}

impl LdpcCode {
    /// Every variable transmitted, every check its own layer.
    pub fn from_graph(graph: TannerGraph) -> Self {
        let m = graph.num_checks();
        let n = graph.num_vars();
        Self::from_parts(graph, LayerMap::singletons(m), vec![VarRole::Transmitted; n], n, 1)
            .expect("singleton layers always match")
    }

    pub fn from_parts(
        graph: TannerGraph,
        layers: LayerMap,
        roles: Vec<VarRole>,
        info_vars: usize,
        lifting: usize,
    ) -> Result<Self, CodeError> {
        if layers.num_checks() != graph.num_checks() {
            return Err(GraphError::LayerMismatch {
                expected: graph.num_checks(),
                got: layers.num_checks(),
            }
            .into());
        }
        if roles.len() != graph.num_vars() {
            return Err(CodeError::InvalidSpec("one role per variable is required"));
        }
        let punctured = roles
            .iter()
            .enumerate()
            .filter(|(_, &r)| r == VarRole::Punctured)
            .map(|(j, _)| j)
            .collect();
        let singletons = LayerMap::singletons(graph.num_checks());
        Ok(Self {
            graph,
            layers,
            singletons,
            roles,
            punctured,
            info_vars,
            lifting,
        })
    }

    /// Builds the code for `spec` on `base`. The spec's `base` field is not
    /// consulted; callers resolve it.
    pub fn build(base: &BaseGraph, spec: &CodeSpec) -> Result<Self, CodeError> {
        let z = spec.lifting;
        if z == 0 {
            return Err(GraphError::ZeroLifting.into());
        }
        if base.cols() < base.rows() {
            return Err(CodeError::InvalidSpec("base graph has more rows than columns"));
        }
        let info_cols = base.cols() - base.rows();
        let rows = spec.base_rows.unwrap_or(base.rows());
        if rows == 0 || rows > base.rows() {
            return Err(CodeError::InvalidSpec("base_rows must be in 1..=rows"));
        }
        let sub = base.sub_graph(rows, info_cols + rows)?;
        let (graph, layers) = sub.lift(z)?;

        let n = graph.num_vars();
        let info_vars = info_cols * z;
        let punctured = spec.punctured_cols * z;
        if punctured + spec.shortened > info_vars {
            return Err(CodeError::InvalidSpec(
                "punctured and shortened bits exceed the information block",
            ));
        }
        if spec.truncated > n - info_vars {
            return Err(CodeError::InvalidSpec("more truncated bits than parity bits"));
        }
        let mut roles = vec![VarRole::Transmitted; n];
        roles[..punctured].fill(VarRole::Punctured);
        roles[info_vars - spec.shortened..info_vars].fill(VarRole::Shortened);
        roles[n - spec.truncated..].fill(VarRole::Truncated);
        Self::from_parts(graph, layers, roles, info_vars, z)
    }

    /// Resolves [`BaseSource::Bg1`] and builds the code.
    pub fn from_spec(spec: &CodeSpec) -> Result<Self, CodeError> {
        match &spec.base {
            BaseSource::Bg1 => Self::build(&bg1_for_lifting(spec.lifting)?, spec),
            BaseSource::File(path) => Err(CodeError::UnresolvedBase(path.clone())),
        }
    }

    pub fn graph(&self) -> &TannerGraph {
        &self.graph
    }

    /// QC layers (base rows).
    pub fn layers(&self) -> &LayerMap {
        &self.layers
    }

    /// One layer per check.
    pub fn check_units(&self) -> &LayerMap {
        &self.singletons
    }

    pub fn roles(&self) -> &[VarRole] {
        &self.roles
    }

    pub fn punctured(&self) -> &[usize] {
        &self.punctured
    }

    pub fn lifting(&self) -> usize {
        self.lifting
    }

    /// Variables in the information part (before shortening).
    pub fn info_vars(&self) -> usize {
        self.info_vars
    }

    /// Information bits actually carried (shortened bits excluded).
    pub fn info_bits(&self) -> usize {
        self.info_vars - self.roles.iter().filter(|&&r| r == VarRole::Shortened).count()
    }

    /// Number of transmitted channel symbols.
    pub fn blocklength(&self) -> usize {
        self.roles.iter().filter(|&&r| r == VarRole::Transmitted).count()
    }

    pub fn rate(&self) -> f64 {
        self.info_bits() as f64 / self.blocklength() as f64
    }

    /// See [`first_check_node`].
    pub fn first_check_node(&self) -> Result<usize, GraphError> {
        first_check_node(&self.graph, &self.punctured)
    }
}
