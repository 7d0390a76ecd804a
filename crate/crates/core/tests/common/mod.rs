//! Random instances and independent reference implementations shared by the
//! integration tests. Nothing here calls into the library's kernels.

#![allow(dead_code)]

use dynsched_core::channel::Gaussian;
use dynsched_core::{LdpcCode, TannerGraph, CLAMP};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in `[0, 1)`.
pub fn uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Uniform integer in `lo..hi`.
pub fn below(rng: &mut impl RngCore, lo: usize, hi: usize) -> usize {
    lo + (rng.next_u64() % (hi - lo) as u64) as usize
}

/// Checks with `min_deg..=max_deg` distinct random neighbors each.
pub fn random_check_lists(
    rng: &mut impl RngCore,
    num_vars: usize,
    num_checks: usize,
    min_deg: usize,
    max_deg: usize,
) -> Vec<Vec<usize>> {
    (0..num_checks)
        .map(|_| {
            let d = below(rng, min_deg, max_deg + 1);
            let mut vars: Vec<usize> = (0..num_vars).collect();
            for i in 0..d {
                let j = below(rng, i, num_vars);
                vars.swap(i, j);
            }
            let mut chosen = vars[..d].to_vec();
            chosen.sort_unstable();
            chosen
        })
        .collect()
}

pub fn random_graph(
    rng: &mut impl RngCore,
    num_vars: usize,
    num_checks: usize,
    min_deg: usize,
    max_deg: usize,
) -> TannerGraph {
    let lists = random_check_lists(rng, num_vars, num_checks, min_deg, max_deg);
    TannerGraph::from_check_lists(num_vars, &lists).unwrap()
}

/// Dense 0/1 matrix of `graph`.
pub fn dense(graph: &TannerGraph) -> Vec<Vec<u8>> {
    let mut h = vec![vec![0u8; graph.num_vars()]; graph.num_checks()];
    for (i, row) in h.iter_mut().enumerate() {
        for &j in graph.check_neighbors(i) {
            row[j] = 1;
        }
    }
    h
}

/// All-zero-codeword BPSK LLRs at the given SNR.
pub fn awgn_llrs(rng: &mut ChaCha8Rng, n: usize, es_n0_db: f64) -> Vec<f64> {
    let sigma2 = 1.0 / (2.0 * 10f64.powf(es_n0_db / 10.0));
    let mut g = Gaussian::new(rng);
    (0..n)
        .map(|_| (2.0 * (1.0 + sigma2.sqrt() * g.sample()) / sigma2).clamp(-CLAMP, CLAMP))
        .collect()
}

/// Check-node output `2·atanh(Π tanh(m/2))`, evaluated through
/// `1 - tanh(x/2) = 2/(eˣ + 1)` so that large messages keep their precision.
pub fn tanh_rule(others: &[f64]) -> f64 {
    let mut negative = false;
    let mut log_t = 0.0;
    for &m in others {
        negative ^= m < 0.0;
        // ln tanh(|m|/2) = ln(1 - 2/(e^|m| + 1))
        log_t += (-2.0 / (m.abs().exp() + 1.0)).ln_1p();
    }
    // u = 1 - t, atanh(t) = ½·ln((2 - u)/u)
    let u = -log_t.exp_m1();
    let magnitude = if u == 0.0 {
        f64::INFINITY
    } else {
        (2.0 - u).ln() - u.ln()
    };
    let magnitude = magnitude.min(CLAMP);
    if negative {
        -magnitude
    } else {
        magnitude
    }
}

/// Error probability of a variable from its posterior (unit prior).
pub fn var_p(l: f64) -> f64 {
    1.0 / (1.0 + l.abs().min(CLAMP).exp())
}

/// Odd-error probability by enumerating all `2^d` error patterns.
pub fn brute_odd_parity(p: &[f64]) -> f64 {
    let d = p.len();
    let mut total = 0.0;
    for mask in 0u32..(1 << d) {
        if mask.count_ones() % 2 == 1 {
            let mut prob = 1.0;
            for (j, &pj) in p.iter().enumerate() {
                prob *= if mask >> j & 1 == 1 { pj } else { 1.0 - pj };
            }
            total += prob;
        }
    }
    total
}

pub fn check_p(graph: &TannerGraph, posterior: &[f64], i: usize) -> f64 {
    let product: f64 = graph
        .check_neighbors(i)
        .iter()
        .map(|&v| 1.0 - 2.0 * var_p(posterior[v]))
        .product();
    0.5 * (1.0 - product)
}

/// Dense sum-product state: `c2v[i][j]` and `v2c[i][j]` over the full
/// matrix, zero off the graph.
#[derive(Clone)]
pub struct DenseBp {
    pub h: Vec<Vec<u8>>,
    pub channel: Vec<f64>,
    pub c2v: Vec<Vec<f64>>,
    pub v2c: Vec<Vec<f64>>,
}

impl DenseBp {
    pub fn new(graph: &TannerGraph, channel: &[f64]) -> Self {
        let h = dense(graph);
        let channel: Vec<f64> = channel.iter().map(|c| c.clamp(-CLAMP, CLAMP)).collect();
        let m = h.len();
        let n = channel.len();
        let mut v2c = vec![vec![0.0; n]; m];
        for i in 0..m {
            for j in 0..n {
                if h[i][j] == 1 {
                    v2c[i][j] = channel[j];
                }
            }
        }
        Self {
            h,
            channel,
            c2v: vec![vec![0.0; n]; m],
            v2c,
        }
    }

    /// V2C from the sum over the other checks.
    pub fn v2c_message(&self, i: usize, j: usize) -> f64 {
        let mut s = self.channel[j];
        for h in 0..self.h.len() {
            if h != i && self.h[h][j] == 1 {
                s += self.c2v[h][j];
            }
        }
        s.clamp(-CLAMP, CLAMP)
    }

    pub fn c2v_message(&self, i: usize, j: usize) -> f64 {
        let others: Vec<f64> = (0..self.channel.len())
            .filter(|&a| a != j && self.h[i][a] == 1)
            .map(|a| self.v2c[i][a])
            .collect();
        tanh_rule(&others)
    }

    pub fn posterior(&self) -> Vec<f64> {
        (0..self.channel.len())
            .map(|j| {
                self.channel[j]
                    + (0..self.h.len())
                        .filter(|&i| self.h[i][j] == 1)
                        .map(|i| self.c2v[i][j])
                        .sum::<f64>()
            })
            .collect()
    }

    /// One flooding iteration: all V2C, then all C2V.
    #[allow(clippy::needless_range_loop)]
    pub fn flood(&mut self) {
        let (m, n) = (self.h.len(), self.channel.len());
        for i in 0..m {
            for j in 0..n {
                if self.h[i][j] == 1 {
                    self.v2c[i][j] = self.v2c_message(i, j);
                }
            }
        }
        let mut next = vec![vec![0.0; n]; m];
        for i in 0..m {
            for j in 0..n {
                if self.h[i][j] == 1 {
                    next[i][j] = self.c2v_message(i, j);
                }
            }
        }
        self.c2v = next;
    }

    /// Layered update of check `i`.
    pub fn update_check(&mut self, i: usize) {
        let n = self.channel.len();
        for j in 0..n {
            if self.h[i][j] == 1 {
                self.v2c[i][j] = self.v2c_message(i, j);
            }
        }
        for j in 0..n {
            if self.h[i][j] == 1 {
                self.c2v[i][j] = self.c2v_message(i, j);
            }
        }
    }

    /// Largest change in check `i`'s C2V messages if it were updated now.
    pub fn residual(&self, i: usize) -> f64 {
        let mut probe = self.clone();
        probe.update_check(i);
        (0..self.channel.len())
            .filter(|&j| self.h[i][j] == 1)
            .map(|j| (probe.c2v[i][j] - self.c2v[i][j]).abs())
            .fold(0.0, f64::max)
    }

    pub fn syndrome_ok(&self) -> bool {
        let post = self.posterior();
        self.h
            .iter()
            .all(|row| row.iter().zip(&post).filter(|(&h, &l)| h == 1 && l < 0.0).count() % 2 == 0)
    }
}

/// Lowest-degree check with exactly one punctured neighbor, by full scan.
pub fn brute_first_check(graph: &TannerGraph, punctured: &[usize]) -> Option<usize> {
    let h = dense(graph);
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in h.iter().enumerate() {
        let hits = punctured.iter().filter(|&&v| row[v] == 1).count();
        let degree = row.iter().filter(|&&x| x == 1).count();
        if hits == 1 && best.is_none_or(|(d, _)| degree < d) {
            best = Some((degree, i));
        }
    }
    best.map(|(_, i)| i)
}

/// Dyn-EBP on single checks, step by step from the algorithm's text: fresh
/// error probabilities for every check at each iteration start, the
/// remaining checks kept in a plain list, the smallest probability taken
/// next (lowest id on ties), and every remaining check re-evaluated after
/// each update.
pub fn scripted_dyn_ebp(code: &LdpcCode, channel: &[f64], iterations: usize, first_node_rule: bool) -> Vec<Vec<usize>> {
    let graph = code.graph();
    let m = graph.num_checks();
    let mut bp = DenseBp::new(graph, channel);
    let mut first = if first_node_rule {
        brute_first_check(graph, code.punctured())
    } else {
        None
    };
    let mut sequence = Vec::new();
    for _ in 0..iterations {
        let mut remaining: Vec<usize> = (0..m).collect();
        let mut this_iteration = Vec::new();
        while !remaining.is_empty() {
            let post = bp.posterior();
            let pick = match first.take() {
                Some(f) => f,
                None => *remaining
                    .iter()
                    .min_by(|&&a, &&b| {
                        check_p(graph, &post, a)
                            .total_cmp(&check_p(graph, &post, b))
                            .then(a.cmp(&b))
                    })
                    .unwrap(),
            };
            remaining.retain(|&c| c != pick);
            bp.update_check(pick);
            this_iteration.push(pick);
        }
        sequence.push(this_iteration);
        if bp.syndrome_ok() {
            break;
        }
    }
    sequence
}

/// Residual-decay RBP on single checks: largest `residual·β^updates`
/// first (lowest id on ties), with residuals recomputed from scratch before
/// every selection. Stops early once every key drops below `floor`.
pub fn scripted_rbp(graph: &TannerGraph, channel: &[f64], beta: f64, steps: usize, floor: f64) -> Vec<usize> {
    let m = graph.num_checks();
    let mut bp = DenseBp::new(graph, channel);
    let mut updates = vec![0i32; m];
    let mut seq = Vec::new();
    for _ in 0..steps {
        let keys: Vec<f64> = (0..m).map(|i| bp.residual(i) * beta.powi(updates[i])).collect();
        let (pick, best) = keys.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &k)| if k > acc.1 { (i, k) } else { acc },
        );
        if best < floor {
            break;
        }
        bp.update_check(pick);
        updates[pick] += 1;
        seq.push(pick);
    }
    seq
}
