//! Decoders: the scheduling strategies that drive the [`crate::bp`] kernels.
//!
//! Every scheduler works on *units*: single checks ([`Granularity::Check`])
//! or QC layers ([`Granularity::Layer`]). Updating a unit runs the layered
//! check update on each member in ascending check order. Dynamic schedulers
//! rank a layer by the mean key of its members.
//!
//! For schedulers that may revisit units within an iteration (Dyn-PEBP and
//! residual-decay RBP), one iteration is as many unit updates as there are
//! units. The syndrome is checked at iteration boundaries unless
//! [`DecodeConfig::syndrome_every`] asks for a finer cadence.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::bp::{self, CheckUpdate, MessageState, OpCounters};
use crate::code::LdpcCode;
use crate::graph::{LayerMap, TannerGraph};
use crate::queue::IndexedMinQueue;
use crate::reliability::{check_error_prob, Marks, ReliabilityState};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DecodeError {
    #[error("invalid decode config: {0}")]
    InvalidConfig(&'static str),
    #[error("schedule is not a permutation of the {0} units")]
    NotPermutation(usize),
    #[error("got {got} channel LLRs for {expected} variables")]
    ChannelLength { expected: usize, got: usize },
    #[error("unknown scheduler {0:?}")]
    UnknownScheduler(alloc::string::String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum SchedulerKind {
    Flooding,
    Lbp,
    StaticEp,
    DynEbp,
    DynPebp,
    RbpDecay,
}

impl SchedulerKind {
    pub const ALL: [SchedulerKind; 6] = [
        SchedulerKind::Flooding,
        SchedulerKind::Lbp,
        SchedulerKind::StaticEp,
        SchedulerKind::DynEbp,
        SchedulerKind::DynPebp,
        SchedulerKind::RbpDecay,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchedulerKind::Flooding => "flooding",
            SchedulerKind::Lbp => "lbp",
            SchedulerKind::StaticEp => "static-ep",
            SchedulerKind::DynEbp => "dyn-ebp",
            SchedulerKind::DynPebp => "dyn-pebp",
            SchedulerKind::RbpDecay => "rbp-decay",
        }
    }
}

impl fmt::Display for SchedulerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchedulerKind {
    type Err = DecodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| DecodeError::UnknownScheduler(s.into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Granularity {
    #[default]
    Check,
    Layer,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeConfig {
    pub max_iterations: usize,
    /// Dyn-PEBP penalty coefficient, in `[0, 1]`.
    pub gamma: f64,
    /// Prior ratio `P(x=0)/P(x=1)` used by the error probabilities.
    pub lambda: f64,
    /// Residual decay factor of RBP, in `(0, 1]`.
    pub beta: f64,
    pub granularity: Granularity,
    /// Check the syndrome every this many unit updates instead of only at
    /// iteration boundaries.
    pub syndrome_every: Option<usize>,
    /// Start dynamic schedules at the lowest-degree check with exactly one
    /// punctured neighbor.
    pub first_node_rule: bool,
    /// Keep the scheduling sequence and a per-update trace.
    pub record: bool,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        Self {
            max_iterations: 5,
            gamma: 0.35,
            lambda: 1.0,
            beta: 0.95,
            granularity: Granularity::Check,
            syndrome_every: None,
            first_node_rule: true,
            record: false,
        }
    }
}

impl DecodeConfig {
    pub fn validate(&self) -> Result<(), DecodeError> {
        if self.max_iterations == 0 {
            return Err(DecodeError::InvalidConfig("max_iterations must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(DecodeError::InvalidConfig("gamma must lie in [0, 1]"));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(DecodeError::InvalidConfig("lambda must be positive"));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(DecodeError::InvalidConfig("beta must lie in (0, 1]"));
        }
        if self.syndrome_every == Some(0) {
            return Err(DecodeError::InvalidConfig("syndrome cadence must be positive"));
        }
        Ok(())
    }
}

/// Units selected for update, grouped by iteration.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SchedulingSequence {
    pub iterations: Vec<Vec<usize>>,
}

impl SchedulingSequence {
    /// True when every iteration updates each of `units` exactly once.
    pub fn is_permutation_each(&self, units: usize) -> bool {
        self.iterations.iter().all(|it| is_permutation(it, units))
    }

    pub fn flatten(&self) -> Vec<usize> {
        self.iterations.iter().flatten().copied().collect()
    }

    /// Consecutive selections of the same unit.
    pub fn immediate_repeats(&self) -> usize {
        let flat = self.flatten();
        flat.windows(2).filter(|w| w[0] == w[1]).count()
    }
}

/// One unit update, for tracing.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraceEvent {
    pub ordinal: u64,
    pub iteration: u32,
    /// Unit (check or layer) id.
    pub unit: usize,
    /// Scheduling key at selection, for dynamic schedulers.
    pub key: Option<f64>,
    /// Mean check error probability of the unit before and after the update.
    pub p_before: f64,
    pub p_after: f64,
    /// Times this unit has been updated, including this update.
    pub updates: u32,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    pub success: bool,
    pub iterations: usize,
    /// Individual check updates performed.
    pub check_updates: u64,
    pub hard_decision: Vec<u8>,
    pub posterior: Vec<f64>,
    pub sequence: Option<SchedulingSequence>,
    pub trace: Vec<TraceEvent>,
    pub counters: OpCounters,
}

/// State visible to an [`Observer`] after each check update.
pub struct Step<'a> {
    pub graph: &'a TannerGraph,
    pub state: &'a MessageState,
    pub unit: usize,
    pub check: usize,
    pub iteration: usize,
    /// Updates performed so far on every check.
    pub check_updates: &'a [u32],
}

pub trait Observer {
    fn after_check_update(&mut self, step: &Step<'_>);
}

impl<F: FnMut(&Step<'_>)> Observer for F {
    fn after_check_update(&mut self, step: &Step<'_>) {
        self(step)
    }
}

struct Silent;

impl Observer for Silent {
    fn after_check_update(&mut self, _: &Step<'_>) {}
}

/// Decodes `channel` with the given scheduler. `Lbp` uses the natural unit
/// order.
pub fn decode(
    kind: SchedulerKind,
    code: &LdpcCode,
    channel: &[f64],
    cfg: &DecodeConfig,
) -> Result<DecodeOutcome, DecodeError> {
    decode_observed(kind, code, channel, cfg, &mut Silent)
}

/// [`decode`] with a callback after every check update.
pub fn decode_observed<O: Observer>(
    kind: SchedulerKind,
    code: &LdpcCode,
    channel: &[f64],
    cfg: &DecodeConfig,
    observer: &mut O,
) -> Result<DecodeOutcome, DecodeError> {
    let engine = Engine::new(code, channel, cfg, observer)?;
    Ok(match kind {
        SchedulerKind::Flooding => engine.flooding(),
        SchedulerKind::Lbp => {
            let order: Vec<usize> = (0..engine.units.num_layers()).collect();
            engine.layered(&order)
        }
        SchedulerKind::StaticEp => engine.static_error(),
        SchedulerKind::DynEbp => engine.dyn_ebp(),
        SchedulerKind::DynPebp => engine.dyn_pebp(),
        SchedulerKind::RbpDecay => engine.rbp_decay(),
    })
}

pub fn decode_flooding(code: &LdpcCode, channel: &[f64], cfg: &DecodeConfig) -> Result<DecodeOutcome, DecodeError> {
    decode(SchedulerKind::Flooding, code, channel, cfg)
}

/// Layered decoding with a fixed unit order, repeated every iteration.
pub fn decode_lbp(
    code: &LdpcCode,
    channel: &[f64],
    cfg: &DecodeConfig,
    order: &[usize],
) -> Result<DecodeOutcome, DecodeError> {
    decode_lbp_observed(code, channel, cfg, order, &mut Silent)
}

pub fn decode_lbp_observed<O: Observer>(
    code: &LdpcCode,
    channel: &[f64],
    cfg: &DecodeConfig,
    order: &[usize],
    observer: &mut O,
) -> Result<DecodeOutcome, DecodeError> {
    let engine = Engine::new(code, channel, cfg, observer)?;
    let n = engine.units.num_layers();
    if !is_permutation(order, n) {
        return Err(DecodeError::NotPermutation(n));
    }
    Ok(engine.layered(order))
}

pub fn decode_static_error(code: &LdpcCode, channel: &[f64], cfg: &DecodeConfig) -> Result<DecodeOutcome, DecodeError> {
    decode(SchedulerKind::StaticEp, code, channel, cfg)
}

pub fn decode_dyn_ebp(code: &LdpcCode, channel: &[f64], cfg: &DecodeConfig) -> Result<DecodeOutcome, DecodeError> {
    decode(SchedulerKind::DynEbp, code, channel, cfg)
}

pub fn decode_dyn_pebp(code: &LdpcCode, channel: &[f64], cfg: &DecodeConfig) -> Result<DecodeOutcome, DecodeError> {
    decode(SchedulerKind::DynPebp, code, channel, cfg)
}

pub fn decode_rbp_decay(code: &LdpcCode, channel: &[f64], cfg: &DecodeConfig) -> Result<DecodeOutcome, DecodeError> {
    decode(SchedulerKind::RbpDecay, code, channel, cfg)
}

/// The fixed order used by the static scheduler: units sorted by their
/// error probability computed from the channel LLRs alone (ties by id).
pub fn static_error_order(code: &LdpcCode, channel: &[f64], cfg: &DecodeConfig) -> Vec<usize> {
    let graph = code.graph();
    let units = units_for(code, cfg.granularity);
    let clamped: Vec<f64> = channel.iter().map(|&c| bp::clamp_llr(c)).collect();
    let rel = ReliabilityState::new(graph, &clamped, 0.0, cfg.lambda, &mut OpCounters::default());
    let keys: Vec<f64> = (0..units.num_layers())
        .map(|u| rel.layer_key(units, u, false))
        .collect();
    let mut order: Vec<usize> = (0..units.num_layers()).collect();
    order.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]).then(a.cmp(&b)));
    order
}

fn units_for(code: &LdpcCode, granularity: Granularity) -> &LayerMap {
    match granularity {
        Granularity::Check => code.check_units(),
        Granularity::Layer => code.layers(),
    }
}

fn is_permutation(seq: &[usize], n: usize) -> bool {
    if seq.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &u in seq {
        if u >= n || seen[u] {
            return false;
        }
        seen[u] = true;
    }
    true
}

struct Engine<'a, O> {
    code: &'a LdpcCode,
    graph: &'a TannerGraph,
    units: &'a LayerMap,
    cfg: &'a DecodeConfig,
    observer: &'a mut O,
    state: MessageState,
    scratch: CheckUpdate,
    counters: OpCounters,
    check_updates: Vec<u32>,
    unit_updates: Vec<u32>,
    total_unit_updates: u64,
    iteration: usize,
    sequence: Option<SchedulingSequence>,
    trace: Vec<TraceEvent>,
    check_marks: Marks,
    unit_marks: Marks,
    affected: Vec<usize>,
    affected_units: Vec<usize>,
}

impl<'a, O: Observer> Engine<'a, O> {
    fn new(
        code: &'a LdpcCode,
        channel: &[f64],
        cfg: &'a DecodeConfig,
        observer: &'a mut O,
    ) -> Result<Self, DecodeError> {
        cfg.validate()?;
        let graph = code.graph();
        if channel.len() != graph.num_vars() {
            return Err(DecodeError::ChannelLength {
                expected: graph.num_vars(),
                got: channel.len(),
            });
        }
        let units = units_for(code, cfg.granularity);
        Ok(Self {
            code,
            graph,
            units,
            cfg,
            observer,
            state: MessageState::new(graph, channel),
            scratch: CheckUpdate::new(),
            counters: OpCounters::default(),
            check_updates: vec![0; graph.num_checks()],
            unit_updates: vec![0; units.num_layers()],
            total_unit_updates: 0,
            iteration: 0,
            sequence: cfg.record.then(SchedulingSequence::default),
            trace: Vec::new(),
            check_marks: Marks::new(graph.num_checks()),
            unit_marks: Marks::new(units.num_layers()),
            affected: Vec::new(),
            affected_units: Vec::new(),
        })
    }

    fn num_units(&self) -> usize {
        self.units.num_layers()
    }

    fn check_p(&self, c: usize) -> f64 {
        let post = self.state.posterior();
        check_error_prob(self.graph.check_neighbors(c).iter().map(|&v| post[v]), self.cfg.lambda).unwrap_or(0.0)
    }

    fn unit_p(&self, u: usize) -> f64 {
        let members = self.units.members(u);
        members.iter().map(|&c| self.check_p(c)).sum::<f64>() / members.len() as f64
    }

    /// Runs the layered update on every member of `u`. Returns the largest
    /// C2V residual.
    fn update_unit(&mut self, u: usize, key: Option<f64>) -> f64 {
        let p_before = if self.cfg.record { self.unit_p(u) } else { 0.0 };
        let mut residual: f64 = 0.0;
        for &k in self.units.members(u) {
            bp::update_check(self.graph, &mut self.state, k, &mut self.scratch, &mut self.counters);
            residual = residual.max(self.scratch.max_residual());
            self.check_updates[k] += 1;
            self.observer.after_check_update(&Step {
                graph: self.graph,
                state: &self.state,
                unit: u,
                check: k,
                iteration: self.iteration,
                check_updates: &self.check_updates,
            });
        }
        self.unit_updates[u] += 1;
        self.total_unit_updates += 1;
        if let Some(seq) = self.sequence.as_mut() {
            if seq.iterations.len() <= self.iteration {
                seq.iterations.resize(self.iteration + 1, Vec::new());
            }
            seq.iterations[self.iteration].push(u);
        }
        if self.cfg.record {
            let p_after = self.unit_p(u);
            self.trace.push(TraceEvent {
                ordinal: self.total_unit_updates - 1,
                iteration: self.iteration as u32,
                unit: u,
                key,
                p_before,
                p_after,
                updates: self.unit_updates[u],
                max_residual: residual,
            });
        }
        residual
    }

    fn converged(&self) -> bool {
        bp::posterior_syndrome_ok(self.graph, self.state.posterior())
    }

    /// True when the finer syndrome cadence is due and satisfied.
    fn cadence_stop(&self) -> bool {
        match self.cfg.syndrome_every {
            Some(n) => self.total_unit_updates.is_multiple_of(n as u64) && self.converged(),
            None => false,
        }
    }

    /// Gathers the checks sharing a variable with the members of `u` into
    /// `self.affected`, and their units into `self.affected_units`.
    fn gather_affected(&mut self, u: usize, include_self: bool) {
        self.affected.clear();
        self.affected_units.clear();
        self.check_marks
            .collect(self.graph, self.units.members(u), include_self, &mut self.affected);
        self.unit_marks
            .layers_of(self.units, &self.affected, &mut self.affected_units);
    }

    fn first_unit(&self) -> Option<usize> {
        if !self.cfg.first_node_rule {
            return None;
        }
        self.code.first_check_node().ok().map(|c| self.units.layer_of(c))
    }

    fn finish(self, success: bool) -> DecodeOutcome {
        let check_updates = self.check_updates.iter().map(|&c| c as u64).sum();
        DecodeOutcome {
            success,
            iterations: self.iteration,
            check_updates,
            hard_decision: bp::hard_decision(self.state.posterior()),
            posterior: self.state.posterior().to_vec(),
            sequence: self.sequence,
            trace: self.trace,
            counters: self.counters,
        }
    }

    fn flooding(mut self) -> DecodeOutcome {
        let m = self.graph.num_checks();
        for iter in 0..self.cfg.max_iterations {
            self.iteration = iter;
            for k in 0..m {
                bp::v2c_update(self.graph, &mut self.state, k, &mut self.counters);
            }
            // C2V reads only V2C messages, so applying check by check is the
            // same as applying all at once.
            for k in 0..m {
                let p_before = if self.cfg.record { self.check_p(k) } else { 0.0 };
                bp::c2v_update(self.graph, &self.state, k, &mut self.scratch, &mut self.counters);
                bp::apply_c2v(self.graph, &mut self.state, &self.scratch);
                self.check_updates[k] += 1;
                self.observer.after_check_update(&Step {
                    graph: self.graph,
                    state: &self.state,
                    unit: k,
                    check: k,
                    iteration: iter,
                    check_updates: &self.check_updates,
                });
                if self.cfg.record {
                    let p_after = self.check_p(k);
                    self.trace.push(TraceEvent {
                        ordinal: self.total_unit_updates,
                        iteration: iter as u32,
                        unit: k,
                        key: None,
                        p_before,
                        p_after,
                        updates: self.check_updates[k],
                        max_residual: self.scratch.max_residual(),
                    });
                }
                self.total_unit_updates += 1;
            }
            if let Some(seq) = self.sequence.as_mut() {
                seq.iterations.push((0..m).collect());
            }
            if self.converged() {
                self.iteration = iter + 1;
                return self.finish(true);
            }
        }
        self.iteration = self.cfg.max_iterations;
        self.finish(false)
    }

    fn layered(mut self, order: &[usize]) -> DecodeOutcome {
        for iter in 0..self.cfg.max_iterations {
            self.iteration = iter;
            for &u in order {
                self.update_unit(u, None);
                if self.cadence_stop() {
                    self.iteration = iter + 1;
                    return self.finish(true);
                }
            }
            if self.converged() {
                self.iteration = iter + 1;
                return self.finish(true);
            }
        }
        self.iteration = self.cfg.max_iterations;
        self.finish(false)
    }

    fn static_error(self) -> DecodeOutcome {
        let order = static_error_order(self.code, self.state.channel(), self.cfg);
        self.layered(&order)
    }

    fn dyn_ebp(mut self) -> DecodeOutcome {
        let n = self.num_units();
        let mut rel = ReliabilityState::new(
            self.graph,
            self.state.posterior(),
            0.0,
            self.cfg.lambda,
            &mut self.counters,
        );
        let mut queue = IndexedMinQueue::new(n);
        let mut first = self.first_unit();
        for iter in 0..self.cfg.max_iterations {
            self.iteration = iter;
            if iter > 0 {
                rel.recompute_all(self.graph, &mut self.counters);
            }
            queue.clear();
            for u in 0..n {
                queue
                    .insert(u, rel.layer_key(self.units, u, false))
                    .expect("fresh queue");
            }
            self.counters.queue_ops += n as u64;
            while !queue.is_empty() {
                let (u, key) = match first.take() {
                    Some(f) => (f, queue.remove(f).expect("all units queued")),
                    None => queue.pop_min().expect("queue is not empty"),
                };
                self.counters.queue_ops += 1;
                self.update_unit(u, Some(key));
                rel.refresh_neighbors(self.graph, self.state.posterior(), self.units.members(u));
                self.gather_affected(u, false);
                for &b in &self.affected {
                    rel.recompute(self.graph, b, &mut self.counters);
                }
                for &w in &self.affected_units {
                    if queue.contains(w) {
                        queue
                            .update_key(w, rel.layer_key(self.units, w, false))
                            .expect("member of queue");
                        self.counters.queue_ops += 1;
                    }
                }
                if self.cadence_stop() {
                    self.iteration = iter + 1;
                    return self.finish(true);
                }
            }
            if self.converged() {
                self.iteration = iter + 1;
                return self.finish(true);
            }
        }
        self.iteration = self.cfg.max_iterations;
        self.finish(false)
    }

    fn dyn_pebp(mut self) -> DecodeOutcome {
        let n = self.num_units();
        let mut rel = ReliabilityState::new(
            self.graph,
            self.state.posterior(),
            self.cfg.gamma,
            self.cfg.lambda,
            &mut self.counters,
        );
        let mut queue = IndexedMinQueue::new(n);
        for u in 0..n {
            queue
                .insert(u, rel.layer_key(self.units, u, true))
                .expect("fresh queue");
        }
        self.counters.queue_ops += n as u64;
        let mut first = self.first_unit();
        let budget = self.cfg.max_iterations * n;
        for t in 0..budget {
            self.iteration = t / n;
            let (u, key) = match first.take() {
                Some(f) => (f, queue.key(f).expect("all units queued")),
                None => queue.peek_min().expect("queue holds every unit"),
            };
            self.counters.queue_ops += 1;
            self.update_unit(u, Some(key));
            for &k in self.units.members(u) {
                rel.record_update(k);
            }
            rel.refresh_neighbors(self.graph, self.state.posterior(), self.units.members(u));
            self.gather_affected(u, true);
            for &b in &self.affected {
                rel.recompute(self.graph, b, &mut self.counters);
            }
            for &w in &self.affected_units {
                queue
                    .update_key(w, rel.layer_key(self.units, w, true))
                    .expect("every unit stays queued");
                self.counters.queue_ops += 1;
            }
            let boundary = (t + 1) % n == 0;
            if (boundary && self.converged()) || self.cadence_stop() {
                self.iteration = t / n + 1;
                return self.finish(true);
            }
        }
        self.iteration = self.cfg.max_iterations;
        self.finish(false)
    }

    /// Residual of check `k`: largest change its C2V messages would see if
    /// it were updated now.
    fn residual(&mut self, k: usize, buf: &mut Vec<f64>, out: &mut Vec<f64>, prefix: &mut Vec<f64>) -> f64 {
        let edges = self.graph.check_edges(k);
        let post = self.state.posterior();
        let c2v = self.state.c2v();
        buf.clear();
        buf.extend(
            edges
                .clone()
                .map(|e| bp::clamp_llr(post[self.graph.edge_var(e)] - c2v[e])),
        );
        out.clear();
        out.resize(buf.len(), 0.0);
        bp::check_rule(buf, out, prefix);
        self.counters.multiplies += 3 * buf.len() as u64;
        edges
            .zip(out.iter())
            .map(|(e, &m)| (m - c2v[e]).abs())
            .fold(0.0, f64::max)
    }

    fn rbp_decay(mut self) -> DecodeOutcome {
        let n = self.num_units();
        let m = self.graph.num_checks();
        let beta = self.cfg.beta;
        let (mut buf, mut out, mut prefix) = (Vec::new(), Vec::new(), Vec::new());
        let mut residual = vec![0.0; m];
        let mut decay = vec![1.0f64; m];
        for (k, r) in residual.iter_mut().enumerate() {
            *r = self.residual(k, &mut buf, &mut out, &mut prefix);
        }
        // Largest decayed residual first.
        let unit_key = |units: &LayerMap, residual: &[f64], decay: &[f64], u: usize| {
            let members = units.members(u);
            let sum: f64 = members.iter().map(|&c| residual[c] * decay[c]).sum();
            -sum / members.len() as f64
        };
        let mut queue = IndexedMinQueue::new(n);
        for u in 0..n {
            queue
                .insert(u, unit_key(self.units, &residual, &decay, u))
                .expect("fresh queue");
        }
        self.counters.queue_ops += n as u64;
        let budget = self.cfg.max_iterations * n;
        for t in 0..budget {
            self.iteration = t / n;
            let (u, key) = queue.peek_min().expect("queue holds every unit");
            self.counters.queue_ops += 1;
            self.update_unit(u, Some(key));
            for &k in self.units.members(u) {
                decay[k] *= beta;
            }
            self.gather_affected(u, true);
            let affected = core::mem::take(&mut self.affected);
            for &b in &affected {
                residual[b] = self.residual(b, &mut buf, &mut out, &mut prefix);
            }
            self.affected = affected;
            for &w in &self.affected_units {
                queue
                    .update_key(w, unit_key(self.units, &residual, &decay, w))
                    .expect("every unit stays queued");
                self.counters.queue_ops += 1;
            }
            let boundary = (t + 1) % n == 0;
            if (boundary && self.converged()) || self.cadence_stop() {
                self.iteration = t / n + 1;
                return self.finish(true);
            }
        }
        self.iteration = self.cfg.max_iterations;
        self.finish(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bp::CLAMP;
    use crate::code::CodeSpec;

    fn toy_code() -> LdpcCode {
        LdpcCode::from_graph(
            TannerGraph::from_dense(&[
                [1u8, 1, 0, 1, 0, 0, 0, 1],
                [0, 1, 1, 0, 1, 0, 1, 0],
                [1, 0, 1, 0, 0, 1, 1, 0],
                [0, 0, 0, 1, 1, 1, 0, 1],
            ])
            .unwrap(),
        )
    }

    #[test]
    fn names_round_trip() {
        for k in SchedulerKind::ALL {
            assert_eq!(k.name().parse::<SchedulerKind>(), Ok(k));
        }
        assert!("fifo".parse::<SchedulerKind>().is_err());
    }

    #[test]
    fn config_validation() {
        let bad = [
            DecodeConfig {
                max_iterations: 0,
                ..Default::default()
            },
            DecodeConfig {
                gamma: 1.5,
                ..Default::default()
            },
            DecodeConfig {
                lambda: 0.0,
                ..Default::default()
            },
            DecodeConfig {
                beta: 0.0,
                ..Default::default()
            },
            DecodeConfig {
                syndrome_every: Some(0),
                ..Default::default()
            },
        ];
        let code = toy_code();
        for cfg in bad {
            assert!(matches!(
                decode(SchedulerKind::Flooding, &code, &[1.0; 8], &cfg),
                Err(DecodeError::InvalidConfig(_))
            ));
        }
        assert!(matches!(
            decode(SchedulerKind::Lbp, &code, &[1.0; 7], &DecodeConfig::default()),
            Err(DecodeError::ChannelLength { .. })
        ));
    }

    #[test]
    fn noiseless_decodes_in_one_iteration() {
        let code = toy_code();
        let cfg = DecodeConfig {
            record: true,
            ..Default::default()
        };
        for kind in SchedulerKind::ALL {
            let out = decode(kind, &code, &[CLAMP; 8], &cfg).unwrap();
            assert!(out.success, "{kind}");
            assert_eq!(out.iterations, 1, "{kind}");
            assert_eq!(out.check_updates, 4, "{kind}");
            assert_eq!(out.hard_decision, vec![0; 8]);
        }
    }

    #[test]
    fn lbp_rejects_non_permutations() {
        let code = toy_code();
        let cfg = DecodeConfig::default();
        for order in [&[0usize, 1, 2][..], &[0, 1, 2, 2], &[0, 1, 2, 4]] {
            assert_eq!(
                decode_lbp(&code, &[1.0; 8], &cfg, order),
                Err(DecodeError::NotPermutation(4))
            );
        }
        assert!(decode_lbp(&code, &[1.0; 8], &cfg, &[3, 1, 0, 2]).is_ok());
    }

    #[test]
    fn static_order_puts_punctured_checks_last() {
        // Check 1 touches the punctured variable 2 and so has p = 0.5.
        let g = TannerGraph::from_dense(&[[1u8, 1, 0, 0], [0, 1, 1, 0], [0, 0, 0, 1]]).unwrap();
        let roles = vec![
            crate::VarRole::Transmitted,
            crate::VarRole::Transmitted,
            crate::VarRole::Punctured,
            crate::VarRole::Transmitted,
        ];
        let code = LdpcCode::from_parts(g, LayerMap::singletons(3), roles, 4, 1).unwrap();
        let order = static_error_order(&code, &[1.0, 1.0, 0.0, 1.0], &DecodeConfig::default());
        assert_eq!(order, vec![2, 0, 1]);
        let flat = static_error_order(&toy_code(), &[2.0; 8], &DecodeConfig::default());
        assert_eq!(flat, vec![0, 1, 2, 3]);
    }

    #[test]
    fn layer_units_cover_lifted_code() {
        let code = LdpcCode::from_spec(&CodeSpec::bg1(4, 6)).unwrap();
        let cfg = DecodeConfig {
            granularity: Granularity::Layer,
            record: true,
            ..Default::default()
        };
        let mut llr = vec![CLAMP; code.graph().num_vars()];
        for &p in code.punctured() {
            llr[p] = 0.0;
        }
        for kind in SchedulerKind::ALL {
            let out = decode(kind, &code, &llr, &cfg).unwrap();
            assert!(out.success, "{kind}");
            let seq = out.sequence.unwrap();
            let expected = if kind == SchedulerKind::Flooding { 24 } else { 6 };
            assert_eq!(seq.iterations[0].len(), expected, "{kind}");
        }
    }
}
