//! Edge message storage and the sum-product kernels.
//!
//! Messages live in flat arrays indexed by edge id; since edge ids are
//! assigned per check (see [`TannerGraph::check_edges`]), one check update
//! touches one contiguous span.
//!
//! The check-node rule `2·atanh(Π tanh(m/2))` is evaluated in the
//! equivalent sign/magnitude form `φ(Σ φ(|m|))` with
//! `φ(x) = -ln tanh(x/2) = ln(1 + 2/(eˣ - 1))`, using prefix and suffix sums
//! for the leave-one-out terms. This keeps full relative precision for
//! large messages, where `1 - tanh` underflows.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::graph::TannerGraph;

/// Saturation bound for stored messages and channel LLRs.
pub const CLAMP: f64 = 60.0;

/// Work counters, used for the complexity audit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OpCounters {
    /// V2C messages computed.
    pub v2c: u64,
    /// C2V messages computed.
    pub c2v: u64,
    /// Factor combinations: three per edge in a check update, one per
    /// neighbor in a check error-probability evaluation.
    pub multiplies: u64,
    /// Check error probabilities evaluated.
    pub reliability_recomputes: u64,
    /// Priority queue operations.
    pub queue_ops: u64,
}

impl OpCounters {
    pub fn merge(&mut self, other: &OpCounters) {
        self.v2c += other.v2c;
        self.c2v += other.c2v;
        self.multiplies += other.multiplies;
        self.reliability_recomputes += other.reliability_recomputes;
        self.queue_ops += other.queue_ops;
    }
}

#[inline]
pub(crate) fn clamp_llr(x: f64) -> f64 {
    x.clamp(-CLAMP, CLAMP)
}

/// `φ(x) = ln((eˣ + 1)/(eˣ - 1))` for `x ≥ 0`; an involution.
#[inline]
pub fn phi(x: f64) -> f64 {
    libm::log1p(2.0 / libm::expm1(x))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MessageState {
    v2c: Vec<f64>,
    c2v: Vec<f64>,
    posterior: Vec<f64>,
    channel: Vec<f64>,
}

impl MessageState {
    /// `c2v = 0`, `v2c = C`, `L = C`. Channel values are clamped to `±CLAMP`.
    pub fn new(graph: &TannerGraph, channel: &[f64]) -> Self {
        assert_eq!(channel.len(), graph.num_vars(), "one LLR per variable");
        let channel: Vec<f64> = channel.iter().map(|&c| clamp_llr(c)).collect();
        let v2c = (0..graph.num_edges()).map(|e| channel[graph.edge_var(e)]).collect();
        Self {
            v2c,
            c2v: vec![0.0; graph.num_edges()],
            posterior: channel.clone(),
            channel,
        }
    }

    pub fn v2c(&self) -> &[f64] {
        &self.v2c
    }

    pub fn c2v(&self) -> &[f64] {
        &self.c2v
    }

    /// Posterior LLRs `L`.
    pub fn posterior(&self) -> &[f64] {
        &self.posterior
    }

    pub fn channel(&self) -> &[f64] {
        &self.channel
    }

    /// Largest `|L_j - (C_j + Σ c2v)|` over all variables.
    pub fn consistency_error(&self, graph: &TannerGraph) -> f64 {
        (0..graph.num_vars())
            .map(|j| {
                let sum: f64 = graph.var_edges(j).iter().map(|&e| self.c2v[e]).sum();
                (self.posterior[j] - self.channel[j] - sum).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Sets every posterior to `C + Σ c2v`, removing accumulated rounding.
    pub fn refresh_posteriors(&mut self, graph: &TannerGraph) {
        for j in 0..graph.num_vars() {
            let sum: f64 = graph.var_edges(j).iter().map(|&e| self.c2v[e]).sum();
            self.posterior[j] = self.channel[j] + sum;
        }
    }
}

/// Old and new C2V messages of one check, produced by [`c2v_update`].
#[derive(Debug, Clone, Default)]
pub struct CheckUpdate {
    check: usize,
    edges: Range<usize>,
    old: Vec<f64>,
    new: Vec<f64>,
    prefix: Vec<f64>,
}

impl CheckUpdate {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn check(&self) -> usize {
        self.check
    }

    pub fn edges(&self) -> Range<usize> {
        self.edges.clone()
    }

    pub fn old_messages(&self) -> &[f64] {
        &self.old
    }

    pub fn new_messages(&self) -> &[f64] {
        &self.new
    }

    /// `max |new - old|` over the check's edges.
    pub fn max_residual(&self) -> f64 {
        self.old
            .iter()
            .zip(&self.new)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `m(v_a → c_k) = L_a - m(c_k → v_a)` for every neighbor `a` of check `k`.
pub fn v2c_update(graph: &TannerGraph, state: &mut MessageState, k: usize, counters: &mut OpCounters) {
    for e in graph.check_edges(k) {
        let v = graph.edge_var(e);
        state.v2c[e] = clamp_llr(state.posterior[v] - state.c2v[e]);
    }
    counters.v2c += graph.check_degree(k) as u64;
}

/// Computes the C2V messages of check `k` from its current V2C messages
/// into `out`, leaving `state` untouched.
pub fn c2v_update(
    graph: &TannerGraph,
    state: &MessageState,
    k: usize,
    out: &mut CheckUpdate,
    counters: &mut OpCounters,
) {
    let edges = graph.check_edges(k);
    let d = edges.len();
    out.check = k;
    out.edges = edges.clone();
    out.old.clear();
    out.old.extend_from_slice(&state.c2v[edges.clone()]);
    out.new.clear();
    out.new.resize(d, 0.0);
    check_rule(&state.v2c[edges], &mut out.new, &mut out.prefix);
    counters.c2v += d as u64;
    counters.multiplies += 3 * d as u64;
}

/// Leave-one-out check rule on `incoming`, written to `outgoing`.
pub fn check_rule(incoming: &[f64], outgoing: &mut [f64], scratch: &mut Vec<f64>) {
    let d = incoming.len();
    // scratch[..d] holds φ(|m|), scratch[d..] the prefix sums.
    scratch.clear();
    scratch.resize(2 * d + 1, 0.0);
    let (phis, prefix) = scratch.split_at_mut(d);
    let mut negatives = 0usize;
    for (a, &m) in incoming.iter().enumerate() {
        phis[a] = phi(m.abs());
        prefix[a + 1] = prefix[a] + phis[a];
        negatives += (m < 0.0) as usize;
    }
    let mut suffix = 0.0;
    for a in (0..d).rev() {
        let m = incoming[a];
        let others_negative = negatives - (m < 0.0) as usize;
        let magnitude = clamp_llr(phi(prefix[a] + suffix));
        outgoing[a] = if others_negative % 2 == 1 {
            -magnitude
        } else {
            magnitude
        };
        suffix += phis[a];
    }
}

/// Stores the new messages of `update` and moves each posterior by
/// `new - old`.
pub fn apply_c2v(graph: &TannerGraph, state: &mut MessageState, update: &CheckUpdate) {
    for (i, e) in update.edges.clone().enumerate() {
        let v = graph.edge_var(e);
        state.posterior[v] += update.new[i] - update.old[i];
        state.c2v[e] = update.new[i];
    }
}

/// One layered check update: V2C, C2V, then posterior maintenance.
pub fn update_check(
    graph: &TannerGraph,
    state: &mut MessageState,
    k: usize,
    scratch: &mut CheckUpdate,
    counters: &mut OpCounters,
) {
    v2c_update(graph, state, k, counters);
    c2v_update(graph, state, k, scratch, counters);
    apply_c2v(graph, state, scratch);
}

/// `x_j = 0` iff `L_j ≥ 0`.
pub fn hard_decision(posterior: &[f64]) -> Vec<u8> {
    posterior.iter().map(|&l| (l < 0.0) as u8).collect()
}

/// True iff every check has even parity over `x`.
pub fn syndrome_ok(graph: &TannerGraph, x: &[u8]) -> bool {
    assert_eq!(x.len(), graph.num_vars());
    (0..graph.num_checks()).all(|i| graph.check_neighbors(i).iter().fold(0u8, |acc, &v| acc ^ (x[v] & 1)) == 0)
}

/// Syndrome test straight on posteriors, without allocating.
pub fn posterior_syndrome_ok(graph: &TannerGraph, posterior: &[f64]) -> bool {
    (0..graph.num_checks()).all(|i| graph.check_neighbors(i).iter().filter(|&&v| posterior[v] < 0.0).count() % 2 == 0)
}
