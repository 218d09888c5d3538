//! Residual belief propagation and its silent-variable-node-free variant.
//!
//! Both decoders keep a candidate C2V message and a residual (the magnitude
//! change committing it would cause) for every edge. Plain RBP always
//! commits the globally largest residual; SVNF-RBP cycles the variable
//! nodes round-robin and commits the best residual pointing at the current
//! variable, so no variable stays silent.
//!
//! The cost model charges a full `E - 1` comparison scan per commit; the
//! engine instead keeps a lazy max-heap over stale-able residual entries and
//! reports the comparisons it really executed in `engine_comparisons`.

use super::{extract_c2v, DecodeResult, DecoderConfig, StopReason};
use crate::graph::CodeGraph;
use crate::instrument::{OpCounters, UpdateKind};
use crate::kernels::{phi, saturate};

/// Residuals at or below this floor carry no schedulable information; with
/// saturated kernels a true zero never occurs, only `PHI_MIN`-sized dust.
const RESIDUAL_FLOOR: f64 = 1e-12;

pub fn decode_rbp(graph: &CodeGraph, llr: &[f64], cfg: &DecoderConfig) -> DecodeResult {
    Engine::new(graph, llr, cfg).run(Selection::GlobalMax)
}

pub fn decode_svnf_rbp(graph: &CodeGraph, llr: &[f64], cfg: &DecoderConfig) -> DecodeResult {
    Engine::new(graph, llr, cfg).run(Selection::RoundRobin)
}

enum Selection {
    GlobalMax,
    RoundRobin,
}

struct Engine<'g> {
    graph: &'g CodeGraph,
    cfg: DecoderConfig,
    prior: Vec<f64>,
    q: Vec<f64>,
    phi_q: Vec<f64>,
    r: Vec<f64>,
    r_pre: Vec<f64>,
    residual: Vec<f64>,
    /// Sum of committed C2V messages per variable.
    sum_r: Vec<f64>,
    /// Shared phi totals and sign parities per check, updated incrementally.
    total_phi: Vec<f64>,
    neg_parity: Vec<bool>,
    heap: LazyMaxHeap,
    counters: OpCounters,
}

impl<'g> Engine<'g> {
    fn new(graph: &'g CodeGraph, llr: &[f64], cfg: &DecoderConfig) -> Self {
        let n = graph.n_variables();
        let m = graph.n_checks();
        let e_total = graph.n_edges();
        assert_eq!(llr.len(), n, "LLR length must equal the block length");

        let prior: Vec<f64> = llr.iter().map(|&x| saturate(x)).collect();
        let mut q = vec![0.0f64; e_total];
        let mut phi_q = vec![0.0f64; e_total];
        let mut total_phi = vec![0.0f64; m];
        let mut neg_parity = vec![false; m];
        for c in 0..m {
            for e in graph.check_edge_range(c) {
                let v = graph.edge_variable(e) as usize;
                q[e] = prior[v];
                phi_q[e] = phi(q[e].abs());
                total_phi[c] += phi_q[e];
                neg_parity[c] ^= q[e] < 0.0;
            }
        }
        let mut r_pre = vec![0.0f64; e_total];
        let mut residual = vec![0.0f64; e_total];
        let mut heap = LazyMaxHeap::new(e_total);
        for c in 0..m {
            for e in graph.check_edge_range(c) {
                r_pre[e] = extract_c2v(total_phi[c], neg_parity[c], q[e], phi_q[e]);
                residual[e] = r_pre[e].abs();
                if residual[e] > RESIDUAL_FLOOR {
                    heap.push(residual[e], e as u32);
                }
            }
        }

        Engine {
            graph,
            cfg: *cfg,
            prior,
            q,
            phi_q,
            r: vec![0.0; e_total],
            r_pre,
            residual,
            sum_r: vec![0.0; n],
            total_phi,
            neg_parity,
            heap,
            counters: OpCounters::new(),
        }
    }

    fn run(mut self, selection: Selection) -> DecodeResult {
        let e_total = self.graph.n_edges() as u64;
        let n = self.graph.n_variables() as u64;
        let max_commits = self.cfg.max_iterations as u64 * e_total;
        let mut commits = 0u64;
        let mut success = false;
        let mut stop = StopReason::MaxIter;

        while commits < max_commits {
            let edge = match selection {
                Selection::GlobalMax => match self.pop_global_max() {
                    Some(e) => e,
                    // Nothing informative left to schedule.
                    None => break,
                },
                Selection::RoundRobin => {
                    let v = (commits % n) as usize;
                    self.best_edge_of_variable(v)
                }
            };
            self.commit(edge);
            commits += 1;
            if self.cfg.count_ops {
                // Model charge for locating the maximum residual.
                self.counters
                    .add(UpdateKind::Comparison, e_total - 1, 0, 0, e_total - 1, 0);
            }
            if commits % e_total == 0 {
                if self.graph.syndrome_is_zero(&self.hard_bits()) {
                    success = true;
                    stop = StopReason::SyndromeZero;
                    break;
                }
            }
        }

        let hard = self.hard_bits();
        if !success && self.graph.syndrome_is_zero(&hard) {
            // Converged state reached off the test cadence (for example a
            // drained heap before the first full sweep).
            success = true;
        }
        self.counters.engine_comparisons = self.heap.comparisons;
        DecodeResult {
            success,
            hard_bits: hard,
            iterations_used: commits as f64 / e_total as f64,
            counters: self.counters,
            stop_reason: if success { stop } else { StopReason::MaxIter },
            undetected_stops: 0,
        }
    }

    fn hard_bits(&self) -> Vec<u8> {
        (0..self.graph.n_variables())
            .map(|v| ((self.prior[v] + self.sum_r[v]) < 0.0) as u8)
            .collect()
    }

    /// Pop fresh entries until the top matches the live residual table.
    fn pop_global_max(&mut self) -> Option<usize> {
        while let Some(item) = self.heap.pop() {
            let e = item.edge as usize;
            if self.residual[e] == item.res {
                return Some(e);
            }
        }
        None
    }

    /// Max-residual edge incident to `v`; ties fall to the lowest edge id.
    /// SVNF commits unconditionally, so a zero-residual edge is acceptable.
    fn best_edge_of_variable(&mut self, v: usize) -> usize {
        let slots = self.graph.var_edge_ids(v);
        let mut best = slots[0] as usize;
        for &e in &slots[1..] {
            let e = e as usize;
            self.heap.comparisons += 1;
            if self.residual[e] > self.residual[best] {
                best = e;
            }
        }
        best
    }

    fn commit(&mut self, edge: usize) {
        let c = self.graph.edge_check(edge) as usize;
        let v = self.graph.edge_variable(edge) as usize;
        let old = self.r[edge];
        let committed = self.r_pre[edge];
        self.r[edge] = committed;
        self.sum_r[v] += committed - old;
        self.residual[edge] = 0.0;
        if self.cfg.count_ops {
            let dc = self.graph.check_degree(c) as u64;
            self.counters.add(UpdateKind::C2V, 1, 0, dc - 1, 0, 0);
        }

        // Refresh v's V2C messages toward its other checks, then the
        // candidate C2V messages and residuals those refreshes invalidate.
        let dv = self.graph.var_degree(v) as u64;
        let slots: Vec<u32> = self.graph.var_edge_ids(v).to_vec();
        for &e_out in &slots {
            let e_out = e_out as usize;
            if e_out == edge {
                continue;
            }
            let c_out = self.graph.edge_check(e_out) as usize;
            let q_new = saturate(self.prior[v] + self.sum_r[v] - self.r[e_out]);
            if self.cfg.count_ops {
                self.counters.add(UpdateKind::V2C, 1, dv - 1, 0, 0, 0);
            }
            let phi_new = phi(q_new.abs());
            self.total_phi[c_out] += phi_new - self.phi_q[e_out];
            self.neg_parity[c_out] ^= (q_new < 0.0) ^ (self.q[e_out] < 0.0);
            self.q[e_out] = q_new;
            self.phi_q[e_out] = phi_new;

            let dc_out = self.graph.check_degree(c_out) as u64;
            for e2 in self.graph.check_edge_range(c_out) {
                if self.graph.edge_variable(e2) as usize == v {
                    continue;
                }
                let cand = extract_c2v(
                    self.total_phi[c_out],
                    self.neg_parity[c_out],
                    self.q[e2],
                    self.phi_q[e2],
                );
                self.r_pre[e2] = cand;
                let res = (cand - self.r[e2]).abs();
                self.residual[e2] = res;
                if res > RESIDUAL_FLOOR {
                    self.heap.push(res, e2 as u32);
                }
                if self.cfg.count_ops {
                    self.counters.add(UpdateKind::Residual, 1, 0, dc_out - 1, 0, 0);
                }
            }
        }
        self.maybe_compact();
    }

    /// Stale entries pile up in the lazy heap; rebuild it from the live
    /// residual table when it outgrows a small multiple of E.
    fn maybe_compact(&mut self) {
        if self.heap.len() > 8 * self.graph.n_edges() + 64 {
            let live: Vec<(f64, u32)> = self
                .residual
                .iter()
                .enumerate()
                .filter(|(_, &r)| r > RESIDUAL_FLOOR)
                .map(|(e, &r)| (r, e as u32))
                .collect();
            self.heap.rebuild(&live);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapItem {
    res: f64,
    edge: u32,
}

/// Binary max-heap ordered by residual, ties to the lowest edge id, with an
/// explicit comparison counter.
struct LazyMaxHeap {
    items: Vec<HeapItem>,
    comparisons: u64,
}

impl LazyMaxHeap {
    fn new(capacity: usize) -> Self {
        LazyMaxHeap {
            items: Vec::with_capacity(capacity * 2),
            comparisons: 0,
        }
    }

    fn len(&self) -> usize {
        self.items.len()
    }

    #[inline]
    fn higher(&mut self, a: HeapItem, b: HeapItem) -> bool {
        self.comparisons += 1;
        a.res > b.res || (a.res == b.res && a.edge < b.edge)
    }

    fn push(&mut self, res: f64, edge: u32) {
        self.items.push(HeapItem { res, edge });
        let mut i = self.items.len() - 1;
        while i > 0 {
            let parent = (i - 1) / 2;
            if self.higher(self.items[i], self.items[parent]) {
                self.items.swap(i, parent);
                i = parent;
            } else {
                break;
            }
        }
    }

    fn pop(&mut self) -> Option<HeapItem> {
        if self.items.is_empty() {
            return None;
        }
        let last = self.items.len() - 1;
        self.items.swap(0, last);
        let top = self.items.pop().unwrap();
        self.sift_down(0);
        Some(top)
    }

    fn sift_down(&mut self, mut i: usize) {
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut largest = i;
            if l < self.items.len() && self.higher(self.items[l], self.items[largest]) {
                largest = l;
            }
            if r < self.items.len() && self.higher(self.items[r], self.items[largest]) {
                largest = r;
            }
            if largest == i {
                return;
            }
            self.items.swap(i, largest);
            i = largest;
        }
    }

    fn rebuild(&mut self, live: &[(f64, u32)]) {
        self.items.clear();
        self.items
            .extend(live.iter().map(|&(res, edge)| HeapItem { res, edge }));
        if self.items.len() > 1 {
            for i in (0..self.items.len() / 2).rev() {
                self.sift_down(i);
            }
        }
    }
}
