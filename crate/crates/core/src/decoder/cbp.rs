//! Check-belief propagation decoding.
//!
//! Instead of exchanging extrinsic messages between all neighbours, the
//! decoder keeps one belief per check node (the log-likelihood that its
//! parity is satisfied) and passes it from check to check through a single
//! variable at a time. Processing check `c_i` walks its neighbour variables
//! in adjacency order and, for each variable, runs three single-operand
//! phases:
//!
//!  * B2V: re-derive the C2V message of the variable's latest updated
//!    check `c_j` from that check's belief (`psi_minus`),
//!  * V2C: refresh the variable's single latest V2C message and posterior
//!    with one add and one subtract,
//!  * C2B: fold the refreshed V2C message into the growing belief of `c_i`
//!    (`psi_plus`).
//!
//! No phase reads more than three scalar message operands, so there are no
//! cumulative fan-in loops; per full sweep this costs exactly E updates in
//! each of the three phases. Decoding declares success once a window of
//! consecutive check updates all leave a positive belief and no posterior
//! sign flips, and the hard decisions then verify against the syndrome
//! before the flag is trusted.
//!
//! The min-sum variant stores each belief as its two smallest normalized
//! magnitudes plus a sign parity and replaces the phi-domain kernels with
//! minimum selection.

use super::{DecodeResult, DecoderConfig, StopReason, StopWindow};
use crate::graph::CodeGraph;
use crate::instrument::{OpCounters, UpdateKind};
use crate::kernels::{psi_minus, psi_plus, saturate, MinSumState, LLR_MAX};

/// One check-belief update, as dumped by the trace hook.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    /// Sequential index of the check update since decode start.
    pub update_index: u64,
    pub check: u32,
    /// Belief value after the update.
    pub check_belief: f64,
    pub satisfied: bool,
}

pub fn decode_cbp(graph: &CodeGraph, llr: &[f64], cfg: &DecoderConfig) -> DecodeResult {
    decode_core(graph, llr, cfg, ExactBelief::new(graph.n_checks()), None)
}

pub fn decode_cbp_minsum(graph: &CodeGraph, llr: &[f64], cfg: &DecoderConfig) -> DecodeResult {
    decode_core(
        graph,
        llr,
        cfg,
        MinSumBelief::new(graph.n_checks(), cfg.alpha),
        None,
    )
}

/// Like [`decode_cbp`] / [`decode_cbp_minsum`], additionally recording the
/// belief trajectory of every check update.
pub fn decode_cbp_traced(
    graph: &CodeGraph,
    llr: &[f64],
    cfg: &DecoderConfig,
) -> (DecodeResult, Vec<TraceRow>) {
    let mut trace = Vec::new();
    let result = match cfg.schedule {
        super::Schedule::CbpMinSum => decode_core(
            graph,
            llr,
            cfg,
            MinSumBelief::new(graph.n_checks(), cfg.alpha),
            Some(&mut trace),
        ),
        _ => decode_core(
            graph,
            llr,
            cfg,
            ExactBelief::new(graph.n_checks()),
            Some(&mut trace),
        ),
    };
    (result, trace)
}

/// Storage and kernels for the per-check beliefs; one implementation for
/// the exact phi-domain recursion, one for normalized min-sum.
trait BeliefStore {
    /// B2V: the C2V message check `check` sends along `edge`, given the
    /// variable's latest V2C message `q`. A check that has never committed
    /// a belief keeps its initialized C2V value, zero: extracting from the
    /// virgin +infinity sentinel instead would reflect `q` back through the
    /// phi-domain subtraction and double every prior on the first sweep,
    /// which destabilizes the whole recursion.
    fn extract(&self, check: usize, edge: u32, q: f64) -> f64;
    /// Reset the fold accumulator to the virgin belief.
    fn begin_fold(&mut self);
    /// C2B: fold one refreshed V2C message into the accumulator.
    fn fold(&mut self, edge: u32, q_new: f64);
    /// Replace the stored belief of `check` with the accumulator.
    fn commit(&mut self, check: usize);
    /// Signed scalar value of the stored belief.
    fn value(&self, check: usize) -> f64;
}

struct ExactBelief {
    omega: Vec<f64>,
    acc: f64,
}

impl ExactBelief {
    fn new(m: usize) -> Self {
        // The virgin belief is the +infinity sentinel.
        ExactBelief {
            omega: vec![LLR_MAX; m],
            acc: LLR_MAX,
        }
    }
}

impl BeliefStore for ExactBelief {
    #[inline]
    fn extract(&self, check: usize, _edge: u32, q: f64) -> f64 {
        let omega = self.omega[check];
        // Committed beliefs never reach LLR_MAX again (psi_plus of two
        // in-range operands stays strictly below it), so the sentinel
        // doubles as the virgin marker.
        if omega >= LLR_MAX {
            0.0
        } else {
            psi_minus(omega, q)
        }
    }

    #[inline]
    fn begin_fold(&mut self) {
        self.acc = LLR_MAX;
    }

    #[inline]
    fn fold(&mut self, _edge: u32, q_new: f64) {
        self.acc = psi_plus(self.acc, q_new);
    }

    #[inline]
    fn commit(&mut self, check: usize) {
        self.omega[check] = self.acc;
    }

    #[inline]
    fn value(&self, check: usize) -> f64 {
        self.omega[check]
    }
}

struct MinSumBelief {
    states: Vec<MinSumState>,
    acc: MinSumState,
    alpha: f64,
}

impl MinSumBelief {
    fn new(m: usize, alpha: f64) -> Self {
        MinSumBelief {
            states: vec![MinSumState::virgin(); m],
            acc: MinSumState::virgin(),
            alpha,
        }
    }
}

impl BeliefStore for MinSumBelief {
    #[inline]
    fn extract(&self, check: usize, edge: u32, q: f64) -> f64 {
        let state = &self.states[check];
        if state.min_mag.is_infinite() {
            0.0
        } else {
            state.extract(q, edge)
        }
    }

    #[inline]
    fn begin_fold(&mut self) {
        self.acc = MinSumState::virgin();
    }

    #[inline]
    fn fold(&mut self, edge: u32, q_new: f64) {
        self.acc.update(q_new, self.alpha, edge);
    }

    #[inline]
    fn commit(&mut self, check: usize) {
        self.states[check] = self.acc;
    }

    #[inline]
    fn value(&self, check: usize) -> f64 {
        self.states[check].value()
    }
}

fn decode_core<B: BeliefStore>(
    graph: &CodeGraph,
    llr: &[f64],
    cfg: &DecoderConfig,
    mut beliefs: B,
    mut trace: Option<&mut Vec<TraceRow>>,
) -> DecodeResult {
    let n = graph.n_variables();
    let m = graph.n_checks();
    assert_eq!(llr.len(), n, "LLR length must equal the block length");
    let stop_window = match cfg.cbp_stop_window {
        StopWindow::CodewordLength => n as u64,
        StopWindow::CheckCount => m as u64,
    };

    // The single latest V2C message per variable.
    let mut q_latest: Vec<f64> = llr.iter().map(|&x| saturate(x)).collect();
    // C2V memory per edge: the processing check reads its own edge's slot
    // and the refreshed message commits to the pull source's slot.
    let mut r_c2v = vec![0.0f64; graph.n_edges()];
    // Edge to the latest updated neighbour check of each variable,
    // initialized to the lowest-index neighbour.
    let mut latest_edge: Vec<u32> = (0..n)
        .map(|v| {
            let slots = graph.var_edge_ids(v);
            let checks = graph.var_neighbors(v);
            let mut best = 0usize;
            for k in 1..checks.len() {
                if checks[k] < checks[best] {
                    best = k;
                }
            }
            slots[best]
        })
        .collect();
    let mut post_negative: Vec<bool> = q_latest.iter().map(|&x| x < 0.0).collect();
    let mut hard: Vec<u8> = post_negative.iter().map(|&s| s as u8).collect();
    let mut counters = OpCounters::new();
    let mut consec_ok = 0u64;
    let mut undetected = 0u64;
    let mut check_updates = 0u64;
    let max_updates = cfg.max_iterations as u64 * m as u64;

    'outer: loop {
        for c_i in 0..m {
            let mut flipped = false;
            beliefs.begin_fold();
            for e in graph.check_edge_range(c_i) {
                let v = graph.edge_variable(e) as usize;
                // B2V: refresh the message of the latest updated check.
                // Reads two operands: that check's belief and q_latest.
                let le = latest_edge[v];
                let c_j = graph.edge_check(le as usize) as usize;
                let r_new = beliefs.extract(c_j, le, q_latest[v]);
                // V2C: posterior and refreshed latest message; three
                // operands, one add and one subtract. The running sum is
                // deliberately not clipped: every added message is
                // subtracted again one sweep later, and clipping would
                // break that cancellation and erode the state around the
                // converged fixed point (the kernels clamp their own
                // operands, so folds still see at most LLR_MAX).
                let lambda = q_latest[v] + r_new;
                let q_new = q_latest[v] + r_new - r_c2v[e];
                let negative = lambda < 0.0;
                if negative != post_negative[v] {
                    flipped = true;
                    post_negative[v] = negative;
                }
                hard[v] = negative as u8;
                // C2B: fold into the accumulator; two operands.
                beliefs.fold(e as u32, q_new);
                // Commit the renewed messages for the next updates. The
                // refreshed message belongs to c_j, so it lands on the
                // (c_j, v) edge: it entered q_latest at this touch, and the
                // subtraction above already removed c_i's own stored
                // contribution, which keeps q_latest extrinsic with respect
                // to the check that will fold it.
                r_c2v[le as usize] = r_new;
                q_latest[v] = q_new;
                latest_edge[v] = e as u32;
            }
            beliefs.commit(c_i);
            check_updates += 1;
            if cfg.count_ops {
                let deg = graph.check_degree(c_i) as u64;
                counters.add(UpdateKind::B2V, deg, 0, deg, 0, 0);
                counters.add(UpdateKind::V2C, deg, 2 * deg, 0, 0, 0);
                counters.add(UpdateKind::C2B, deg, 0, deg, 0, 0);
            }
            let value = beliefs.value(c_i);
            let satisfied = value > 0.0;
            if let Some(rows) = trace.as_deref_mut() {
                rows.push(TraceRow {
                    update_index: check_updates,
                    check: c_i as u32,
                    check_belief: value,
                    satisfied,
                });
            }

            if satisfied && !flipped {
                consec_ok += 1;
            } else {
                consec_ok = 0;
            }
            if consec_ok >= stop_window {
                // The belief criterion is soft evidence; trust it only if
                // the hard decisions really satisfy every parity check.
                if graph.syndrome_is_zero(&hard) {
                    return DecodeResult {
                        success: true,
                        hard_bits: hard,
                        iterations_used: check_updates as f64 / m as f64,
                        counters,
                        stop_reason: StopReason::BeliefCriterion,
                        undetected_stops: undetected,
                    };
                }
                undetected += 1;
                consec_ok = 0;
            }
            if check_updates >= max_updates {
                break 'outer;
            }
        }
    }

    DecodeResult {
        success: false,
        hard_bits: hard,
        iterations_used: check_updates as f64 / m as f64,
        counters,
        stop_reason: StopReason::MaxIter,
        undetected_stops: undetected,
    }
}
