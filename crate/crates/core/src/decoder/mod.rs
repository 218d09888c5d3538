//! Decoder schedules sharing one interface.
//!
//! Every decoder maps `(graph, channel LLRs, config)` to a [`DecodeResult`].
//! Failure to converge is a result state, not an error; the `success` flag
//! is always syndrome-verified, never belief-only.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::graph::CodeGraph;
use crate::instrument::OpCounters;
use crate::kernels::phi;

pub mod cbp;
pub mod fbp;
pub mod lbp;
pub mod rbp;

pub use cbp::TraceRow;

/// The implemented message-passing schedules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Schedule {
    Fbp,
    Lbp,
    Rbp,
    SvnfRbp,
    Cbp,
    CbpMinSum,
}

impl Schedule {
    pub const ALL: [Schedule; 6] = [
        Schedule::Fbp,
        Schedule::Lbp,
        Schedule::Rbp,
        Schedule::SvnfRbp,
        Schedule::Cbp,
        Schedule::CbpMinSum,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Schedule::Fbp => "fbp",
            Schedule::Lbp => "lbp",
            Schedule::Rbp => "rbp",
            Schedule::SvnfRbp => "svnf-rbp",
            Schedule::Cbp => "cbp",
            Schedule::CbpMinSum => "cbp-minsum",
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Schedule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "fbp" => Ok(Schedule::Fbp),
            "lbp" => Ok(Schedule::Lbp),
            "rbp" => Ok(Schedule::Rbp),
            "svnf-rbp" | "svnf" => Ok(Schedule::SvnfRbp),
            "cbp" => Ok(Schedule::Cbp),
            "cbp-minsum" | "cbp-ms" => Ok(Schedule::CbpMinSum),
            other => Err(format!(
                "unknown schedule {other:?}; valid: fbp, lbp, rbp, svnf-rbp, cbp, cbp-minsum"
            )),
        }
    }
}

/// Length of the window of consecutive satisfied check-belief updates the
/// check-belief stopping criterion requires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopWindow {
    /// N consecutive updates (the default).
    CodewordLength,
    /// M consecutive updates, one full check sweep.
    CheckCount,
}

/// Decoder configuration shared by all schedules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoderConfig {
    /// Iteration budget; edge- and check-scheduled decoders convert it to
    /// the equivalent number of per-edge or per-check updates.
    pub max_iterations: usize,
    pub schedule: Schedule,
    /// Normalization factor of the min-sum variant.
    pub alpha: f64,
    /// When false, counters stay zero.
    pub count_ops: bool,
    /// Stop-window choice for the check-belief schedules.
    pub cbp_stop_window: StopWindow,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            max_iterations: 200,
            schedule: Schedule::Cbp,
            alpha: 0.75,
            count_ops: true,
            cbp_stop_window: StopWindow::CodewordLength,
        }
    }
}

impl DecoderConfig {
    pub fn with_schedule(schedule: Schedule) -> Self {
        DecoderConfig {
            schedule,
            ..DecoderConfig::default()
        }
    }
}

/// Why a decode stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// A periodic hard-decision syndrome test passed.
    SyndromeZero,
    /// The check-belief criterion fired and the syndrome verified.
    BeliefCriterion,
    /// Iteration budget exhausted.
    MaxIter,
}

/// Outcome of one decode.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    /// Syndrome-verified convergence flag.
    pub success: bool,
    pub hard_bits: Vec<u8>,
    /// Whole iterations for flooding/layered; fractional `updates / E` or
    /// `updates / M` for the edge- and check-scheduled decoders.
    pub iterations_used: f64,
    pub counters: OpCounters,
    pub stop_reason: StopReason,
    /// Times the belief criterion fired but the syndrome refuted it.
    pub undetected_stops: u64,
}

/// Decode one frame with the schedule selected in `cfg`.
pub fn decode(graph: &CodeGraph, llr: &[f64], cfg: &DecoderConfig) -> DecodeResult {
    match cfg.schedule {
        Schedule::Fbp => fbp::decode_fbp(graph, llr, cfg),
        Schedule::Lbp => lbp::decode_lbp(graph, llr, cfg),
        Schedule::Rbp => rbp::decode_rbp(graph, llr, cfg),
        Schedule::SvnfRbp => rbp::decode_svnf_rbp(graph, llr, cfg),
        Schedule::Cbp => cbp::decode_cbp(graph, llr, cfg),
        Schedule::CbpMinSum => cbp::decode_cbp_minsum(graph, llr, cfg),
    }
}

/// Shared-product aggregates of one check node: the phi-magnitude total and
/// the sign parity over its incoming V2C messages.
#[inline]
pub(crate) fn check_totals(q: impl Iterator<Item = f64>) -> (f64, bool) {
    let mut total = 0.0;
    let mut neg = false;
    for v in q {
        total += phi(v.abs());
        neg ^= v < 0.0;
    }
    (total, neg)
}

/// Leave-one-out C2V extraction from shared check aggregates: subtract the
/// edge's own phi term and sign from the totals.
#[inline]
pub(crate) fn extract_c2v(total_phi: f64, neg_parity: bool, q_edge: f64, phi_edge: f64) -> f64 {
    let sign = if neg_parity ^ (q_edge < 0.0) { -1.0 } else { 1.0 };
    sign * phi(total_phi - phi_edge)
}
