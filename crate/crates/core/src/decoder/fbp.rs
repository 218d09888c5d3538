//! Flooding belief propagation: all V2C updates, then all C2V updates, once
//! per iteration, with the shared-sum / shared-product computation pattern.

use super::{check_totals, extract_c2v, DecodeResult, DecoderConfig, StopReason};
use crate::graph::CodeGraph;
use crate::instrument::{OpCounters, UpdateKind};
use crate::kernels::{phi, saturate};

pub fn decode_fbp(graph: &CodeGraph, llr: &[f64], cfg: &DecoderConfig) -> DecodeResult {
    let n = graph.n_variables();
    let m = graph.n_checks();
    let e_total = graph.n_edges();
    assert_eq!(llr.len(), n, "LLR length must equal the block length");

    let prior: Vec<f64> = llr.iter().map(|&x| saturate(x)).collect();
    let mut q = vec![0.0f64; e_total];
    let mut r = vec![0.0f64; e_total];
    let mut hard = vec![0u8; n];
    let mut counters = OpCounters::new();
    let dispatch_cost = graph.max_var_degree().max(graph.max_check_degree()) as u64;

    for iter in 1..=cfg.max_iterations {
        // V2C phase: one shared sum per variable, one subtraction per edge.
        for v in 0..n {
            let slots = graph.var_edge_ids(v);
            let mut lambda = prior[v];
            for &e in slots {
                lambda += r[e as usize];
            }
            for &e in slots {
                q[e as usize] = saturate(lambda - r[e as usize]);
            }
        }
        // C2V phase: one shared phi-total per check, one extraction per edge.
        for c in 0..m {
            let range = graph.check_edge_range(c);
            let (total, neg) = check_totals(range.clone().map(|e| q[e]));
            for e in range {
                r[e] = extract_c2v(total, neg, q[e], phi(q[e].abs()));
            }
        }
        if cfg.count_ops {
            let e = e_total as u64;
            counters.add(UpdateKind::V2C, e, 2 * e, 0, 0, 0);
            counters.add(UpdateKind::C2V, e, 0, 2 * e, 0, 0);
            counters.add(UpdateKind::Dispatching, e, 0, 0, 0, e * dispatch_cost);
        }
        // Posterior decision and stop test on the renewed messages.
        for v in 0..n {
            let mut lambda = prior[v];
            for &e in graph.var_edge_ids(v) {
                lambda += r[e as usize];
            }
            hard[v] = (lambda < 0.0) as u8;
        }
        if graph.syndrome_is_zero(&hard) {
            return DecodeResult {
                success: true,
                hard_bits: hard,
                iterations_used: iter as f64,
                counters,
                stop_reason: StopReason::SyndromeZero,
                undetected_stops: 0,
            };
        }
    }

    DecodeResult {
        success: false,
        hard_bits: hard,
        iterations_used: cfg.max_iterations as f64,
        counters,
        stop_reason: StopReason::MaxIter,
        undetected_stops: 0,
    }
}
