//! Layered belief propagation: checks processed sequentially, each layer
//! refreshing the posteriors it touches so later layers see the newest
//! information within the same iteration.

use super::{check_totals, extract_c2v, DecodeResult, DecoderConfig, StopReason};
use crate::graph::CodeGraph;
use crate::instrument::{OpCounters, UpdateKind};
use crate::kernels::{phi, saturate};

pub fn decode_lbp(graph: &CodeGraph, llr: &[f64], cfg: &DecoderConfig) -> DecodeResult {
    let n = graph.n_variables();
    let m = graph.n_checks();
    let e_total = graph.n_edges();
    assert_eq!(llr.len(), n, "LLR length must equal the block length");

    let mut posterior: Vec<f64> = llr.iter().map(|&x| saturate(x)).collect();
    let mut r = vec![0.0f64; e_total];
    let mut q_buf = vec![0.0f64; graph.max_check_degree()];
    let mut counters = OpCounters::new();
    let dispatch_cost = graph.max_check_degree() as u64;

    for sweep in 1..=cfg.max_iterations {
        for c in 0..m {
            let range = graph.check_edge_range(c);
            let deg = range.len();
            // V2C: peel the old check message off the posterior. The
            // running posterior stays unclipped; every message folded in is
            // peeled off again one sweep later, and clipping would break
            // that cancellation over long decodes (the phi kernels clamp
            // their own operands).
            for (k, e) in range.clone().enumerate() {
                let v = graph.edge_variable(e) as usize;
                q_buf[k] = posterior[v] - r[e];
            }
            let (total, neg) = check_totals(q_buf[..deg].iter().copied());
            // C2V and posterior refresh.
            for (k, e) in range.enumerate() {
                let v = graph.edge_variable(e) as usize;
                let r_new = extract_c2v(total, neg, q_buf[k], phi(q_buf[k].abs()));
                posterior[v] = q_buf[k] + r_new;
                r[e] = r_new;
            }
        }
        if cfg.count_ops {
            let e = e_total as u64;
            counters.add(UpdateKind::V2C, e, 2 * e, 0, 0, 0);
            counters.add(UpdateKind::C2V, e, 0, 2 * e, 0, 0);
            counters.add(UpdateKind::Dispatching, e, 0, 0, 0, e * dispatch_cost);
        }
        let hard: Vec<u8> = posterior.iter().map(|&p| (p < 0.0) as u8).collect();
        if graph.syndrome_is_zero(&hard) {
            return DecodeResult {
                success: true,
                hard_bits: hard,
                iterations_used: sweep as f64,
                counters,
                stop_reason: StopReason::SyndromeZero,
                undetected_stops: 0,
            };
        }
    }

    let hard: Vec<u8> = posterior.iter().map(|&p| (p < 0.0) as u8).collect();
    DecodeResult {
        success: false,
        hard_bits: hard,
        iterations_used: cfg.max_iterations as f64,
        counters,
        stop_reason: StopReason::MaxIter,
        undetected_stops: 0,
    }
}
