//! Operation counting and the analytic complexity and memory models.
//!
//! The same accounting categories are used in two roles: decoders tally
//! *measured* update events (weighted by the per-update calculation costs of
//! the node degrees actually involved), and the `predict_*` functions
//! evaluate the closed-form *model* for a degree distribution. For the
//! deterministic schedules the two must agree exactly; for the
//! residual-scheduled family they agree in expectation.
//!
//! Comparisons are double-booked deliberately: the model charges a full
//! `E - 1` scan per residual commit, while the engine uses a lazy heap and
//! counts what it really executed in `engine_comparisons`. Reports carry
//! both numbers.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::decoder::Schedule;
use crate::graph::DegreeDistribution;

/// Message-update categories of the accounting model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum UpdateKind {
    V2C,
    C2V,
    B2V,
    C2B,
    Residual,
    Comparison,
    Dispatching,
}

impl UpdateKind {
    pub const ALL: [UpdateKind; 7] = [
        UpdateKind::V2C,
        UpdateKind::C2V,
        UpdateKind::B2V,
        UpdateKind::C2B,
        UpdateKind::Residual,
        UpdateKind::Comparison,
        UpdateKind::Dispatching,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            UpdateKind::V2C => "v2c",
            UpdateKind::C2V => "c2v",
            UpdateKind::B2V => "b2v",
            UpdateKind::C2B => "c2b",
            UpdateKind::Residual => "residual",
            UpdateKind::Comparison => "comparison",
            UpdateKind::Dispatching => "dispatching",
        }
    }

    fn index(&self) -> usize {
        *self as usize
    }
}

/// Tallies of update events and their scalar calculation costs.
///
/// `sums`, `products`, `comparisons` and `selections` follow the model's
/// per-update charges; `engine_comparisons` counts comparisons the
/// implementation actually performed where it is cheaper than the model.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OpCounters {
    pub sums: u64,
    pub products: u64,
    pub comparisons: u64,
    pub selections: u64,
    pub engine_comparisons: u64,
    updates: [u64; 7],
}

impl OpCounters {
    pub fn new() -> Self {
        OpCounters::default()
    }

    /// Record `events` updates of one kind together with their scalar costs.
    #[inline]
    pub fn add(
        &mut self,
        kind: UpdateKind,
        events: u64,
        sums: u64,
        products: u64,
        comparisons: u64,
        selections: u64,
    ) {
        self.updates[kind.index()] += events;
        self.sums += sums;
        self.products += products;
        self.comparisons += comparisons;
        self.selections += selections;
    }

    /// Update count of one kind.
    pub fn updates(&self, kind: UpdateKind) -> u64 {
        self.updates[kind.index()]
    }

    /// All update counts as a name-keyed map.
    pub fn updates_map(&self) -> BTreeMap<&'static str, u64> {
        UpdateKind::ALL
            .iter()
            .map(|k| (k.as_str(), self.updates(*k)))
            .collect()
    }

    /// Fold another tally into this one.
    pub fn accumulate(&mut self, other: &OpCounters) {
        self.sums += other.sums;
        self.products += other.products;
        self.comparisons += other.comparisons;
        self.selections += other.selections;
        self.engine_comparisons += other.engine_comparisons;
        for i in 0..self.updates.len() {
            self.updates[i] += other.updates[i];
        }
    }
}

/// Iteration-count factor of each schedule relative to flooding, used by the
/// total-complexity model (flooding 1, layered and check-belief 1/2,
/// residual family 1/4).
pub fn convergence_factor(schedule: Schedule) -> f64 {
    match schedule {
        Schedule::Fbp => 1.0,
        Schedule::Lbp => 0.5,
        Schedule::Cbp | Schedule::CbpMinSum => 0.5,
        Schedule::Rbp | Schedule::SvnfRbp => 0.25,
    }
}

/// Expected update events per iteration for each category.
pub fn predict_updates(
    dist: &DegreeDistribution,
    n_edges: usize,
    schedule: Schedule,
) -> BTreeMap<UpdateKind, f64> {
    let e = n_edges as f64;
    let mut map = BTreeMap::new();
    match schedule {
        Schedule::Fbp | Schedule::Lbp => {
            map.insert(UpdateKind::V2C, e);
            map.insert(UpdateKind::C2V, e);
            map.insert(UpdateKind::Dispatching, e);
        }
        Schedule::Rbp | Schedule::SvnfRbp => {
            let v2c: f64 = dist
                .lambda()
                .iter()
                .map(|&(d, f)| e * f * (d as f64 - 1.0))
                .sum();
            let residual: f64 = dist
                .lambda()
                .iter()
                .flat_map(|&(dv, fv)| {
                    dist.rho()
                        .iter()
                        .map(move |&(dc, fc)| e * fv * fc * (dv as f64 - 1.0) * (dc as f64 - 1.0))
                })
                .sum();
            map.insert(UpdateKind::V2C, v2c);
            map.insert(UpdateKind::C2V, e);
            map.insert(UpdateKind::Residual, residual);
            map.insert(UpdateKind::Comparison, e * (e - 1.0));
        }
        Schedule::Cbp | Schedule::CbpMinSum => {
            map.insert(UpdateKind::V2C, e);
            map.insert(UpdateKind::B2V, e);
            map.insert(UpdateKind::C2B, e);
        }
    }
    map
}

/// Total calculation counts predicted by the model for a complete decode,
/// i.e. per-iteration costs scaled by the schedule's convergence factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexityPrediction {
    pub sums: f64,
    pub products: f64,
    pub comparisons: f64,
    pub selections: f64,
}

/// Evaluate the total-complexity model: update events weighted by the
/// degree-dependent cost of each update, scaled by the convergence factor.
pub fn predict_total_complexity(
    dist: &DegreeDistribution,
    n_edges: usize,
    schedule: Schedule,
) -> ComplexityPrediction {
    let e = n_edges as f64;
    let factor = convergence_factor(schedule);
    let max_dc = dist.max_check_degree() as f64;
    let max_dv = dist.max_var_degree() as f64;
    let (sums, products, comparisons, selections) = match schedule {
        Schedule::Fbp => (2.0 * e, 2.0 * e, 0.0, e * max_dv.max(max_dc)),
        Schedule::Lbp => (2.0 * e, 2.0 * e, 0.0, e * max_dc),
        Schedule::Rbp | Schedule::SvnfRbp => {
            // V2C updates at a degree-d variable cost d - 1 sums each.
            let sums: f64 = dist
                .lambda()
                .iter()
                .map(|&(d, f)| e * f * (d as f64 - 1.0).powi(2))
                .sum();
            // Committed C2V updates cost d_c - 1 products; every residual
            // recomputation costs the same at its own check.
            let commit_products: f64 = dist
                .rho()
                .iter()
                .map(|&(d, f)| e * f * (d as f64 - 1.0))
                .sum();
            let residual_products: f64 = dist
                .lambda()
                .iter()
                .flat_map(|&(dv, fv)| {
                    dist.rho().iter().map(move |&(dc, fc)| {
                        e * fv * fc * (dv as f64 - 1.0) * (dc as f64 - 1.0).powi(2)
                    })
                })
                .sum();
            (
                sums,
                commit_products + residual_products,
                e * (e - 1.0),
                0.0,
            )
        }
        Schedule::Cbp | Schedule::CbpMinSum => (2.0 * e, 2.0 * e, 0.0, 0.0),
    };
    ComplexityPrediction {
        sums: sums * factor,
        products: products * factor,
        comparisons: comparisons * factor,
        selections: selections * factor,
    }
}

/// Storage model of one schedule, in message words plus the variable-depth
/// register pool the in-row/in-column scheduling needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MemoryModel {
    pub llr_cells: u64,
    pub c2v_cells: u64,
    pub v2c_cells: u64,
    pub residual_cells: u64,
    pub check_belief_cells: u64,
    /// Register words of the variable-depth dispatch pool.
    pub pool_register_cells: u64,
    pub q_bits: u64,
}

impl MemoryModel {
    /// General-memory footprint in bits.
    pub fn general_bits(&self) -> u64 {
        (self.llr_cells
            + self.c2v_cells
            + self.v2c_cells
            + self.residual_cells
            + self.check_belief_cells)
            * self.q_bits
    }

    /// Register footprint in bits.
    pub fn register_bits(&self) -> u64 {
        self.pool_register_cells * self.q_bits
    }

    /// Register-equivalent total: registers plus general memory discounted
    /// by the register area factor (a register costs `factor` general
    /// cells of area). Truncating division, matching the worked arithmetic
    /// this model reproduces.
    pub fn register_equivalent_total(&self, register_area_factor: u64) -> u64 {
        self.register_bits() + self.general_bits() / register_area_factor
    }

    /// Net register-bit saving of `self` relative to `other`: registers
    /// dropped minus the register-equivalent of the extra general memory.
    pub fn register_saving_vs(&self, other: &MemoryModel, register_area_factor: u64) -> i64 {
        let reg_delta = other.register_bits() as i64 - self.register_bits() as i64;
        let gen_delta = self.general_bits() as i64 - other.general_bits() as i64;
        reg_delta - gen_delta.div_euclid(register_area_factor as i64)
    }
}

/// Evaluate the per-schedule memory table for a code with `n` variables,
/// `m` checks and `e` edges decoded with `parallelism` concurrent node
/// processors and `q_bits`-wide messages.
#[allow(clippy::too_many_arguments)]
pub fn predict_memory(
    n: u64,
    m: u64,
    e: u64,
    parallelism: u64,
    q_bits: u64,
    max_dv: u64,
    max_dc: u64,
    schedule: Schedule,
) -> MemoryModel {
    let mut model = MemoryModel {
        llr_cells: n,
        c2v_cells: e,
        v2c_cells: 0,
        residual_cells: 0,
        check_belief_cells: 0,
        pool_register_cells: 0,
        q_bits,
    };
    match schedule {
        Schedule::Fbp => {
            model.v2c_cells = e;
            model.pool_register_cells = parallelism * max_dv.max(max_dc);
        }
        Schedule::Lbp => {
            model.pool_register_cells = parallelism * max_dc;
        }
        Schedule::Rbp | Schedule::SvnfRbp => {
            model.v2c_cells = e;
            model.residual_cells = e;
        }
        Schedule::Cbp | Schedule::CbpMinSum => {
            model.check_belief_cells = m;
        }
    }
    model
}

/// Comparison of measured update counts against the per-iteration model.
#[derive(Debug, Clone, Serialize)]
pub struct CounterReport {
    pub schedule: String,
    pub predicted: BTreeMap<String, f64>,
    pub measured: BTreeMap<String, u64>,
    pub deviation: BTreeMap<String, f64>,
    pub pass: bool,
}

/// Relative per-category deviation of measured update counts from the
/// prediction; passes when every predicted category is within `tolerance`.
pub fn verify_counters(
    schedule: Schedule,
    measured: &OpCounters,
    predicted: &BTreeMap<UpdateKind, f64>,
    tolerance: f64,
) -> CounterReport {
    let mut deviation = BTreeMap::new();
    let mut pass = true;
    for (&kind, &expect) in predicted {
        let got = measured.updates(kind) as f64;
        let dev = (got - expect).abs() / expect.abs().max(1.0);
        if dev > tolerance {
            pass = false;
        }
        deviation.insert(kind.as_str().to_string(), dev);
    }
    CounterReport {
        schedule: schedule.to_string(),
        predicted: predicted
            .iter()
            .map(|(k, &v)| (k.as_str().to_string(), v))
            .collect(),
        measured: measured
            .updates_map()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
        deviation,
        pass,
    }
}
