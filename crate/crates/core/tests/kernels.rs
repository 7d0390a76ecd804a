#![allow(clippy::needless_range_loop)]

mod common;

use common::*;
use dynsched_core::bp::{self, CheckUpdate, MessageState, OpCounters};
use dynsched_core::schedule::Step;
use dynsched_core::{decode, decode_observed, DecodeConfig, LdpcCode, SchedulerKind, TannerGraph, CLAMP};
use rand_core::RngCore;

fn random_code(seed: u64) -> (LdpcCode, Vec<f64>) {
    let mut r = rng(seed);
    let g = random_graph(&mut r, 20, 10, 2, 6);
    let llr = awgn_llrs(&mut r, 20, -1.0);
    (LdpcCode::from_graph(g), llr)
}

#[test]
fn flooding_matches_dense_recomputation() {
    for seed in 0..50 {
        let (code, llr) = random_code(seed);
        let m = code.graph().num_checks();
        let cfg = DecodeConfig {
            max_iterations: 5,
            ..Default::default()
        };
        let mut snapshots: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
        let mut grab = |s: &Step<'_>| {
            if s.check == m - 1 {
                snapshots.push((s.state.v2c().to_vec(), s.state.c2v().to_vec()));
            }
        };
        decode_observed(SchedulerKind::Flooding, &code, &llr, &cfg, &mut grab).unwrap();
        assert!(!snapshots.is_empty());
        let g = code.graph();
        let mut oracle = DenseBp::new(g, &llr);
        for (it, (v2c, c2v)) in snapshots.iter().enumerate() {
            oracle.flood();
            for e in 0..g.num_edges() {
                let (i, j) = (g.edge_check(e), g.edge_var(e));
                assert!(
                    (v2c[e] - oracle.v2c[i][j]).abs() <= 1e-9,
                    "seed {seed} iteration {it} v2c edge {e}: {} vs {}",
                    v2c[e],
                    oracle.v2c[i][j]
                );
                assert!(
                    (c2v[e] - oracle.c2v[i][j]).abs() <= 1e-9,
                    "seed {seed} iteration {it} c2v edge {e}: {} vs {}",
                    c2v[e],
                    oracle.c2v[i][j]
                );
            }
        }
    }
}

#[test]
fn posterior_stays_consistent_after_every_update() {
    for seed in 0..20 {
        let (code, llr) = random_code(100 + seed);
        for kind in SchedulerKind::ALL {
            let mut worst: f64 = 0.0;
            let mut audit = |s: &Step<'_>| worst = worst.max(s.state.consistency_error(s.graph));
            let cfg = DecodeConfig::default();
            decode_observed(kind, &code, &llr, &cfg, &mut audit).unwrap();
            assert!(worst <= 1e-9, "{kind} seed {seed}: {worst}");
        }
    }
}

#[test]
fn layered_update_matches_sum_form() {
    let mut r = rng(7);
    let g = random_graph(&mut r, 20, 10, 2, 6);
    let llr = awgn_llrs(&mut r, 20, 0.0);
    let mut state = MessageState::new(&g, &llr);
    let mut oracle = DenseBp::new(&g, &llr);
    let mut scratch = CheckUpdate::new();
    let mut counters = OpCounters::default();
    for _ in 0..60 {
        let k = below(&mut r, 0, 10);
        bp::update_check(&g, &mut state, k, &mut scratch, &mut counters);
        oracle.update_check(k);
        for e in g.check_edges(k) {
            let j = g.edge_var(e);
            assert!((state.v2c()[e] - oracle.v2c[k][j]).abs() <= 1e-9);
            assert!((state.c2v()[e] - oracle.c2v[k][j]).abs() <= 1e-9);
        }
        let post = oracle.posterior();
        for j in 0..20 {
            assert!((state.posterior()[j] - post[j]).abs() <= 1e-9);
        }
    }
}

#[test]
fn negated_channel_negates_everything() {
    for seed in 0..10 {
        // Even check degrees make the complement of a codeword a codeword,
        // so both runs also stop together.
        let mut r = rng(200 + seed);
        let mut lists = random_check_lists(&mut r, 20, 10, 2, 6);
        for l in &mut lists {
            if l.len() % 2 == 1 {
                l.pop();
            }
        }
        let code = LdpcCode::from_graph(TannerGraph::from_check_lists(20, &lists).unwrap());
        let llr = awgn_llrs(&mut r, 20, -1.0);
        let neg: Vec<f64> = llr.iter().map(|x| -x).collect();
        for kind in SchedulerKind::ALL {
            let cfg = DecodeConfig::default();
            let a = decode(kind, &code, &llr, &cfg).unwrap();
            let b = decode(kind, &code, &neg, &cfg).unwrap();
            // Ranking depends only on |L|, so both runs make the same choices.
            assert_eq!(a.iterations, b.iterations, "{kind}");
            for (x, y) in a.posterior.iter().zip(&b.posterior) {
                assert_eq!(*x, -*y, "{kind} seed {seed}");
            }
        }
    }
}

#[test]
fn check_output_never_exceeds_weakest_input() {
    let mut r = rng(11);
    let mut out = [0.0; 12];
    let mut scratch = Vec::new();
    for _ in 0..2000 {
        let d = below(&mut r, 2, 13);
        let incoming: Vec<f64> = (0..d).map(|_| (uniform(&mut r) - 0.5) * 2.0 * CLAMP).collect();
        bp::check_rule(&incoming, &mut out[..d], &mut scratch);
        for a in 0..d {
            let weakest = (0..d)
                .filter(|&h| h != a)
                .map(|h| incoming[h].abs())
                .fold(f64::INFINITY, f64::min);
            assert!(out[a].abs() <= weakest + 1e-9, "{} > {}", out[a], weakest);
            let expected = tanh_rule(&(0..d).filter(|&h| h != a).map(|h| incoming[h]).collect::<Vec<_>>());
            assert!((out[a] - expected).abs() <= 1e-9, "{} vs {}", out[a], expected);
        }
    }
}

#[test]
fn degree_two_check_passes_message_through() {
    let mut out = [0.0; 2];
    let mut scratch = Vec::new();
    bp::check_rule(&[3.25, -0.5], &mut out, &mut scratch);
    assert!((out[0] + 0.5).abs() < 1e-12 && (out[1] - 3.25).abs() < 1e-12);
}

#[test]
fn syndrome_matches_matrix_product() {
    let mut r = rng(13);
    for _ in 0..200 {
        let g = random_graph(&mut r, 16, 8, 1, 6);
        let h = dense(&g);
        let x: Vec<u8> = (0..16).map(|_| (r.next_u64() & 1) as u8).collect();
        let by_matrix = h
            .iter()
            .all(|row| row.iter().zip(&x).map(|(a, b)| a * b).sum::<u8>() % 2 == 0);
        assert_eq!(bp::syndrome_ok(&g, &x), by_matrix);
        let post: Vec<f64> = x.iter().map(|&b| if b == 1 { -1.0 } else { 1.0 }).collect();
        assert_eq!(bp::posterior_syndrome_ok(&g, &post), by_matrix);
    }
}

#[test]
fn single_flip_breaks_syndrome() {
    let g = TannerGraph::from_dense(&[[1u8, 1, 0], [0, 1, 1]]).unwrap();
    for j in 0..3 {
        let mut x = vec![0u8; 3];
        assert!(bp::syndrome_ok(&g, &x));
        x[j] = 1;
        assert!(!bp::syndrome_ok(&g, &x));
    }
}

#[test]
fn success_flag_agrees_with_syndrome() {
    for seed in 0..30 {
        let (code, llr) = random_code(300 + seed);
        for kind in SchedulerKind::ALL {
            let out = decode(kind, &code, &llr, &DecodeConfig::default()).unwrap();
            assert_eq!(out.success, bp::syndrome_ok(code.graph(), &out.hard_decision), "{kind}");
            assert_eq!(out.hard_decision, bp::hard_decision(&out.posterior));
        }
    }
}
