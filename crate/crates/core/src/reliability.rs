//! Error probabilities of variable and check nodes, and the scheduling keys
//! derived from them.
//!
//! A variable with posterior `L` is wrong with probability
//! `1 / (1 + w·e^|L|)`, where `w = λ` for `L ≥ 0` and `1/λ` otherwise
//! (`λ = P(x=0)/P(x=1)`). A check is in error when an odd number of its
//! neighbors are, which gives `½·(1 − Π (1 − 2·p_j))`.
//!
//! Dynamic schedulers order checks by that probability, optionally plus a
//! penalty `γ·l` on the number of times `l` the check has been updated.

use alloc::vec;
use alloc::vec::Vec;

use crate::bp::{OpCounters, CLAMP};
use crate::graph::{LayerMap, TannerGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum ReliabilityError {
    #[error("check has no neighbors")]
    EmptyCheck,
}

/// Error probability of a variable with posterior `llr` under prior ratio
/// `lambda`.
#[inline]
pub fn var_error_prob(llr: f64, lambda: f64) -> f64 {
    let weight = if llr < 0.0 { 1.0 / lambda } else { lambda };
    1.0 / (1.0 + weight * libm::exp(llr.abs().min(CLAMP)))
}

/// The unit-prior special case, `1 / (1 + e^|L|)`.
#[inline]
pub fn var_error_prob_unit_prior(llr: f64) -> f64 {
    1.0 / (1.0 + libm::exp(llr.abs().min(CLAMP)))
}

/// Probability that an odd number of the given variables are wrong.
pub fn check_error_prob<I>(posteriors: I, lambda: f64) -> Result<f64, ReliabilityError>
where
    I: IntoIterator<Item = f64>,
{
    let mut any = false;
    let mut product = 1.0;
    for l in posteriors {
        any = true;
        product *= 1.0 - 2.0 * var_error_prob(l, lambda);
    }
    if !any {
        return Err(ReliabilityError::EmptyCheck);
    }
    Ok(0.5 * (1.0 - product))
}

/// `p + γ·l`.
#[inline]
pub fn penalized_prob(p: f64, updates: u32, gamma: f64) -> f64 {
    p + gamma * updates as f64
}

/// Checks whose error probability changes when check `k` is updated: every
/// check sharing a variable with `k`, plus `k` itself if `include_self`.
/// Sorted ascending.
pub fn affected_checks(graph: &TannerGraph, k: usize, include_self: bool) -> Vec<usize> {
    let mut marks = Marks::new(graph.num_checks());
    let mut out = Vec::new();
    marks.collect(graph, &[k], include_self, &mut out);
    out.sort_unstable();
    out
}

/// Epoch-stamped membership marks for deduplicating neighborhoods.
#[derive(Debug, Clone)]
pub(crate) struct Marks {
    stamp: Vec<u32>,
    epoch: u32,
}

impl Marks {
    pub(crate) fn new(len: usize) -> Self {
        Self {
            stamp: vec![0; len],
            epoch: 0,
        }
    }

    fn next_epoch(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
    }

    /// Appends to `out` (unordered) the checks within two hops of `sources`.
    /// The sources themselves are added, even without neighbors, only if
    /// `include_self`.
    pub(crate) fn collect(&mut self, graph: &TannerGraph, sources: &[usize], include_self: bool, out: &mut Vec<usize>) {
        self.next_epoch();
        let epoch = self.epoch;
        for &k in sources {
            if include_self && self.stamp[k] != epoch {
                out.push(k);
            }
            self.stamp[k] = epoch;
        }
        for &k in sources {
            for &a in graph.check_neighbors(k) {
                for b in graph.var_neighbors(a) {
                    if self.stamp[b] != epoch {
                        self.stamp[b] = epoch;
                        out.push(b);
                    }
                }
            }
        }
    }

    /// Maps checks to their layers, deduplicated, appended to `out`.
    pub(crate) fn layers_of(&mut self, layers: &LayerMap, checks: &[usize], out: &mut Vec<usize>) {
        self.next_epoch();
        let epoch = self.epoch;
        for &c in checks {
            let u = layers.layer_of(c);
            if self.stamp[u] != epoch {
                self.stamp[u] = epoch;
                out.push(u);
            }
        }
    }
}

/// Per-check error probabilities and update counts, maintained during a
/// decode.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityState {
    p_check: Vec<f64>,
    updates: Vec<u32>,
    /// `1 - 2·p_j` for every variable, from its latest posterior.
    var_factor: Vec<f64>,
    gamma: f64,
    lambda: f64,
}

impl ReliabilityState {
    /// Evaluates every check from `posterior`. Degree-zero checks get
    /// probability 0.
    pub fn new(graph: &TannerGraph, posterior: &[f64], gamma: f64, lambda: f64, counters: &mut OpCounters) -> Self {
        let mut s = Self {
            p_check: vec![0.0; graph.num_checks()],
            updates: vec![0; graph.num_checks()],
            var_factor: vec![0.0; graph.num_vars()],
            gamma,
            lambda,
        };
        for (j, &l) in posterior.iter().enumerate() {
            s.refresh_var(j, l);
        }
        s.recompute_all(graph, counters);
        s
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn p_check(&self) -> &[f64] {
        &self.p_check
    }

    pub fn updates(&self) -> &[u32] {
        &self.updates
    }

    #[inline]
    pub fn p(&self, i: usize) -> f64 {
        self.p_check[i]
    }

    /// Penalized key `p_i + γ·l_i`.
    #[inline]
    pub fn key(&self, i: usize) -> f64 {
        penalized_prob(self.p_check[i], self.updates[i], self.gamma)
    }

    pub fn record_update(&mut self, i: usize) {
        self.updates[i] += 1;
    }

    /// Refreshes the cached factor of variable `j` after its posterior
    /// changed.
    #[inline]
    pub fn refresh_var(&mut self, j: usize, llr: f64) {
        self.var_factor[j] = 1.0 - 2.0 * var_error_prob(llr, self.lambda);
    }

    /// Refreshes every variable adjacent to `checks`.
    pub fn refresh_neighbors(&mut self, graph: &TannerGraph, posterior: &[f64], checks: &[usize]) {
        for &c in checks {
            for &v in graph.check_neighbors(c) {
                self.refresh_var(v, posterior[v]);
            }
        }
    }

    /// Re-evaluates check `i` from the cached variable factors.
    pub fn recompute(&mut self, graph: &TannerGraph, i: usize, counters: &mut OpCounters) -> f64 {
        let neighbors = graph.check_neighbors(i);
        let p = if neighbors.is_empty() {
            0.0
        } else {
            let product: f64 = neighbors.iter().map(|&v| self.var_factor[v]).product();
            0.5 * (1.0 - product)
        };
        counters.reliability_recomputes += 1;
        counters.multiplies += neighbors.len() as u64;
        self.p_check[i] = p;
        p
    }

    pub fn recompute_all(&mut self, graph: &TannerGraph, counters: &mut OpCounters) {
        for i in 0..graph.num_checks() {
            self.recompute(graph, i, counters);
        }
    }

    /// Mean key over the members of `layer`; penalized keys when
    /// `penalized`.
    pub fn layer_key(&self, layers: &LayerMap, layer: usize, penalized: bool) -> f64 {
        let members = layers.members(layer);
        let sum: f64 = if penalized {
            members.iter().map(|&c| self.key(c)).sum()
        } else {
            members.iter().map(|&c| self.p_check[c]).sum()
        };
        sum / members.len() as f64
    }
}

/// Mean (penalized) check error probability of every layer.
pub fn layer_average(state: &ReliabilityState, layers: &LayerMap, penalized: bool) -> Vec<f64> {
    (0..layers.num_layers())
        .map(|u| state.layer_key(layers, u, penalized))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variable_probabilities() {
        assert_eq!(var_error_prob(0.0, 1.0), 0.5);
        assert!((var_error_prob(libm::log(3.0), 1.0) - 0.25).abs() < 1e-15);
        assert!((var_error_prob(-libm::log(3.0), 2.0) - 0.4).abs() < 1e-15);
        assert!((var_error_prob(libm::log(3.0), 2.0) - 1.0 / 7.0).abs() < 1e-15);
        assert!(var_error_prob(1e6, 1.0) > 0.0);
    }

    #[test]
    fn check_probabilities() {
        assert!((check_error_prob([libm::log(3.0)], 1.0).unwrap() - 0.25).abs() < 1e-15);
        // L = 0 pins the check at one half.
        assert_eq!(check_error_prob([0.0, 5.0, -2.0], 1.0).unwrap(), 0.5);
        assert_eq!(
            check_error_prob(core::iter::empty(), 1.0),
            Err(ReliabilityError::EmptyCheck)
        );
        // p = {0.1, 0.2}: 0.1·0.8 + 0.2·0.9.
        let l1 = libm::log(9.0);
        let l2 = libm::log(4.0);
        assert!((check_error_prob([l1, l2], 1.0).unwrap() - 0.26).abs() < 1e-15);
    }

    #[test]
    fn penalty() {
        assert_eq!(penalized_prob(0.123, 9, 0.0), 0.123);
        assert!((penalized_prob(0.3, 2, 0.35) - 1.0).abs() < 1e-15);
        assert!(penalized_prob(0.0, 1, 1.0) >= penalized_prob(1.0, 0, 1.0));
    }

    #[test]
    fn affected_two_hop() {
        // Check 1 shares v1 with check 0 and v3 with check 2; check 3 is
        // isolated.
        let g = TannerGraph::from_dense(&[
            [1u8, 1, 0, 0, 0, 0],
            [0, 1, 1, 1, 0, 0],
            [0, 0, 0, 1, 1, 0],
            [0, 0, 0, 0, 0, 1],
        ])
        .unwrap();
        assert_eq!(affected_checks(&g, 1, false), vec![0, 2]);
        assert_eq!(affected_checks(&g, 1, true), vec![0, 1, 2]);
        assert!(affected_checks(&g, 3, false).is_empty());
        assert_eq!(affected_checks(&g, 3, true), vec![3]);
    }

    #[test]
    fn layer_means() {
        let g = TannerGraph::from_dense(&[[1u8, 0], [0, 1]]).unwrap();
        let l0 = libm::log(4.0); // p = 0.2
        let l1 = libm::log(1.5); // p = 0.4
        let mut counters = OpCounters::default();
        let mut s = ReliabilityState::new(&g, &[l0, l1], 0.5, 1.0, &mut counters);
        let layers = LayerMap::from_assignment(vec![0, 0], 1).unwrap();
        assert!((layer_average(&s, &layers, false)[0] - 0.3).abs() < 1e-15);
        s.record_update(1);
        assert!((layer_average(&s, &layers, true)[0] - 0.55).abs() < 1e-15);
        assert_eq!(counters.reliability_recomputes, 2);
        assert_eq!(counters.multiplies, 2);
    }
}
