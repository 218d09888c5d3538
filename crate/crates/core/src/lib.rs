//! LDPC decoding with check-belief propagation and the classic schedules it
//! is measured against.
//!
//! The crate provides:
//!
//! * [`graph`] — Tanner graph construction, validation, and degree
//!   distributions; [`peg`] grows graphs by progressive edge growth and
//!   [`alist`] reads/writes the standard interchange format.
//! * [`kernels`] — the numerically hardened phi-domain scalar kernels all
//!   check-node processing is built from.
//! * [`channel`] — BPSK over AWGN with reproducible counter-based noise.
//! * [`decoder`] — flooding, layered, residual, silent-variable-node-free
//!   residual, and check-belief schedules behind one interface.
//! * [`instrument`] — operation counters plus the analytic complexity and
//!   memory models the measured counters are verified against.
//! * [`sim`] — paired Monte-Carlo BER/FER sweeps with deterministic,
//!   thread-count-independent aggregation.

pub mod alist;
pub mod channel;
pub mod decoder;
pub mod graph;
pub mod instrument;
pub mod kernels;
pub mod peg;
pub mod sim;

pub use alist::{load_alist, save_alist, AlistError};
pub use channel::ChannelConfig;
pub use decoder::{
    decode, DecodeResult, DecoderConfig, Schedule, StopReason, StopWindow, TraceRow,
};
pub use graph::{CodeGraph, DegreeDistribution, GraphError};
pub use instrument::{
    predict_memory, predict_total_complexity, predict_updates, verify_counters,
    ComplexityPrediction, CounterReport, MemoryModel, OpCounters, UpdateKind,
};
pub use kernels::{phi, psi_minus, psi_plus, saturate, MinSumState, LLR_MAX, PHI_MIN};
pub use peg::peg_construct;
pub use sim::{ber_monotonic_with_slack, emit_csv, emit_json, run_sweep, SweepReport, SweepRow, SweepSpec};
