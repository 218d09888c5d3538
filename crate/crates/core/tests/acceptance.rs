//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `--nocapture` to see them).
//!
//! Criteria 4-6 share one Monte-Carlo run on the N=1024 benchmark code; it
//! is seeded and block-deterministic, so every asserted number reproduces
//! exactly. Expect a few minutes of wall time for that run.

use std::sync::OnceLock;

use cbp_core::{
    ber_monotonic_with_slack, decode, emit_csv, peg_construct, phi, predict_memory,
    predict_total_complexity, predict_updates, psi_minus, psi_plus, run_sweep, verify_counters,
    CodeGraph, DecoderConfig, DegreeDistribution, Schedule, SweepReport, SweepRow, SweepSpec,
    UpdateKind, LLR_MAX,
};

// ---------------------------------------------------------------------------
// shared fixtures
// ---------------------------------------------------------------------------

/// Benchmark code: N=1024 rate-1/2 (3,6) progressive-edge-growth graph.
fn benchmark_graph() -> &'static CodeGraph {
    static GRAPH: OnceLock<CodeGraph> = OnceLock::new();
    GRAPH.get_or_init(|| {
        let dist = DegreeDistribution::regular(3, 6).unwrap();
        peg_construct(1024, 512, &dist, 1).unwrap()
    })
}

/// Operating point: LBP frame error rate must land in [5e-3, 2e-2] here.
const OPERATING_POINT_DB: f64 = 1.9;
const MC_SEED: u64 = 20250810;

/// The shared paired Monte-Carlo run for criteria 4, 5, and 6.
fn monte_carlo() -> &'static SweepReport {
    static REPORT: OnceLock<SweepReport> = OnceLock::new();
    REPORT.get_or_init(|| {
        let mut spec = SweepSpec::new(
            Schedule::ALL.to_vec(),
            vec![OPERATING_POINT_DB],
            MC_SEED,
        );
        spec.min_frame_errors = 100;
        spec.max_frames = 10_000;
        run_sweep(benchmark_graph(), &spec)
    })
}

fn mc_row(schedule: Schedule) -> &'static SweepRow {
    monte_carlo()
        .rows
        .iter()
        .find(|r| r.schedule == schedule)
        .expect("schedule present in the Monte-Carlo report")
}

struct TestRng(u64);

impl TestRng {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) / 9_007_199_254_740_992.0
    }

    fn llr(&mut self, lo: f64, hi: f64) -> f64 {
        let mag = lo + (hi - lo) * self.uniform();
        if self.next_u64() & 1 == 0 {
            mag
        } else {
            -mag
        }
    }
}

/// Direct batch evaluation of a check belief (sign product, phi-sum).
fn batch_belief(q: &[f64]) -> f64 {
    let mut sign = 1.0;
    let mut sum = 0.0;
    for &v in q {
        if v < 0.0 {
            sign = -sign;
        }
        sum += phi(v.abs());
    }
    sign * phi(sum)
}

// ---------------------------------------------------------------------------
// criterion 1: kernel exactness
// ---------------------------------------------------------------------------

#[test]
fn criterion_1_kernel_exactness() {
    // phi self-reciprocity on a 10^4-point grid.
    for i in 1..=10_000 {
        let x = LLR_MAX * i as f64 / 10_000.0;
        let err = (phi(phi(x)) - x).abs();
        assert!(
            err <= 1e-6 * x.max(1.0),
            "phi self-reciprocity broken at x={x}: {err:e}"
        );
    }

    // psi_plus recursion equals the batch form for degrees 3..=20,
    // 10^3 random vectors per degree.
    let mut rng = TestRng(0xACCE_0001);
    for degree in 3..=20 {
        for _ in 0..1000 {
            let q: Vec<f64> = (0..degree).map(|_| rng.llr(0.05, 12.0)).collect();
            let mut acc = LLR_MAX;
            for &v in &q {
                acc = psi_plus(acc, v);
            }
            let batch = batch_belief(&q);
            let rel = (acc - batch).abs() / batch.abs().max(1.0);
            assert!(
                rel < 1e-5,
                "recursion {acc} != batch {batch} at degree {degree}"
            );
        }
    }

    // psi_minus leave-one-out equals brute-force recomputation, degrees
    // up to 8; near-cancellation degenerates (others' fold close to the
    // saturation rail, where the phi difference underflows) must stay
    // under 0.1% of trials and are excluded from the comparison.
    let mut trials = 0u64;
    let mut degenerate = 0u64;
    for degree in 3..=8 {
        for _ in 0..2000 {
            let q: Vec<f64> = (0..degree).map(|_| rng.llr(0.3, 8.0)).collect();
            let total = batch_belief(&q);
            for i in 0..degree {
                trials += 1;
                let others: Vec<f64> = q
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, &x)| x)
                    .collect();
                let brute = batch_belief(&others);
                if brute.abs() > LLR_MAX - 1.0 {
                    degenerate += 1;
                    continue;
                }
                let loo = psi_minus(total, q[i]);
                assert!(
                    (loo - brute).abs() < 1e-4,
                    "leave-one-out {loo} vs brute {brute} (degree {degree})"
                );
            }
        }
    }
    let degenerate_rate = degenerate as f64 / trials as f64;
    assert!(
        degenerate_rate < 1e-3,
        "degenerate set too large: {degenerate_rate}"
    );
    println!(
        "ACCEPTANCE 1 kernel exactness: PASS \
         (phi grid 1e4, recursion degrees 3-20 x 1e3, {trials} leave-one-out trials, \
         degenerate rate {degenerate_rate:.2e})"
    );
}

// ---------------------------------------------------------------------------
// criterion 2: update-count exactness
// ---------------------------------------------------------------------------

#[test]
fn criterion_2_update_count_exactness() {
    let graphs: Vec<(&str, CodeGraph)> = vec![
        (
            "hamming(7,4)",
            CodeGraph::from_check_adjacency(
                7,
                vec![vec![0, 3, 4, 6], vec![1, 3, 5, 6], vec![2, 4, 5, 6]],
            )
            .unwrap(),
        ),
        ("peg N=128 (3,6)", {
            let dist = DegreeDistribution::regular(3, 6).unwrap();
            peg_construct(128, 64, &dist, 1).unwrap()
        }),
    ];
    let mut rng = TestRng(0xACCE_0002);
    for (name, graph) in &graphs {
        let e = graph.n_edges() as u64;
        let llr: Vec<f64> = (0..graph.n_variables()).map(|_| rng.llr(0.1, 2.0)).collect();
        for schedule in [Schedule::Cbp, Schedule::CbpMinSum] {
            let mut cfg = DecoderConfig::with_schedule(schedule);
            cfg.max_iterations = 1;
            let res = decode(graph, &llr, &cfg);
            for kind in [UpdateKind::B2V, UpdateKind::V2C, UpdateKind::C2B] {
                assert_eq!(
                    res.counters.updates(kind),
                    e,
                    "{name}/{schedule}: {kind:?} count"
                );
            }
        }
        for schedule in [Schedule::Fbp, Schedule::Lbp] {
            let mut cfg = DecoderConfig::with_schedule(schedule);
            cfg.max_iterations = 1;
            let res = decode(graph, &llr, &cfg);
            assert_eq!(res.counters.updates(UpdateKind::V2C), e, "{name}/{schedule}");
            assert_eq!(res.counters.updates(UpdateKind::C2V), e, "{name}/{schedule}");
        }
    }

    // The verify report agrees at zero tolerance for one full iteration.
    let (_, graph) = &graphs[1];
    let dist = DegreeDistribution::regular(3, 6).unwrap();
    let llr: Vec<f64> = (0..graph.n_variables()).map(|_| rng.llr(0.1, 2.0)).collect();
    let mut cfg = DecoderConfig::with_schedule(Schedule::Cbp);
    cfg.max_iterations = 1;
    let res = decode(graph, &llr, &cfg);
    let predicted = predict_updates(&dist, graph.n_edges(), Schedule::Cbp);
    let report = verify_counters(Schedule::Cbp, &res.counters, &predicted, 0.0);
    assert!(report.pass, "verify_counters report: {report:?}");

    // Residual-family counts on a regular graph are exact per commit:
    // (dv-1) V2C and (dv-1)(dc-1) residual updates, E-1 model comparisons.
    let mut cfg = DecoderConfig::with_schedule(Schedule::Rbp);
    cfg.max_iterations = 3;
    let res = decode(graph, &llr, &cfg);
    let commits = res.counters.updates(UpdateKind::C2V);
    assert!(commits > 0);
    assert_eq!(res.counters.updates(UpdateKind::V2C), commits * 2);
    assert_eq!(res.counters.updates(UpdateKind::Residual), commits * 10);
    assert_eq!(
        res.counters.updates(UpdateKind::Comparison),
        commits * (graph.n_edges() as u64 - 1)
    );
    println!("ACCEPTANCE 2 update-count exactness: PASS (both graphs, all schedules, zero deviation)");
}

// ---------------------------------------------------------------------------
// criterion 3: analytic table reproduction
// ---------------------------------------------------------------------------

#[test]
fn criterion_3_analytic_tables() {
    let e = 10_000usize;
    let ef = e as f64;
    let regular = DegreeDistribution::regular(3, 6).unwrap();
    let irregular = DegreeDistribution::new(
        vec![(2, 0.45), (3, 0.3708), (4, 0.0307), (12, 0.1485)],
        vec![(5, 0.5467), (6, 0.4533)],
    )
    .unwrap();

    let sig3 = |got: f64, want: f64, what: &str| {
        assert!(
            (got - want).abs() <= want.abs() * 5e-3 + 1e-12,
            "{what}: {got} vs {want}"
        );
    };

    // Regular (3,6) total-complexity cells, per edge.
    for (schedule, sums, products, comparisons, selections) in [
        (Schedule::Fbp, 2.0, 2.0, 0.0, 6.0),
        (Schedule::Lbp, 1.0, 1.0, 0.0, 3.0),
        (Schedule::Rbp, 1.0, 13.75, ef * (ef - 1.0) / 4.0 / ef, 0.0),
        (Schedule::SvnfRbp, 1.0, 13.75, ef * (ef - 1.0) / 4.0 / ef, 0.0),
        (Schedule::Cbp, 1.0, 1.0, 0.0, 0.0),
        (Schedule::CbpMinSum, 1.0, 1.0, 0.0, 0.0),
    ] {
        let c = predict_total_complexity(&regular, e, schedule);
        sig3(c.sums / ef, sums, &format!("(3,6) {schedule} sums"));
        sig3(c.products / ef, products, &format!("(3,6) {schedule} products"));
        sig3(c.comparisons / ef, comparisons, &format!("(3,6) {schedule} comparisons"));
        sig3(c.selections / ef, selections, &format!("(3,6) {schedule} selections"));
    }

    // Irregular cells.
    for (schedule, sums, products, selections) in [
        (Schedule::Fbp, 2.0, 2.0, 12.0),
        (Schedule::Lbp, 1.0, 1.0, 3.0),
        (Schedule::Rbp, 5.04, 15.76, 0.0),
        (Schedule::SvnfRbp, 5.04, 15.76, 0.0),
        (Schedule::Cbp, 1.0, 1.0, 0.0),
    ] {
        let c = predict_total_complexity(&irregular, e, schedule);
        sig3(c.sums / ef, sums, &format!("irregular {schedule} sums"));
        sig3(c.products / ef, products, &format!("irregular {schedule} products"));
        sig3(c.selections / ef, selections, &format!("irregular {schedule} selections"));
    }

    // Memory worked example: P=384, M=46P, pool depth 19, 8-bit messages,
    // register area factor 10.
    let p = 384;
    let m = 46 * p;
    let (n, edges) = (2 * m, 10 * m);
    let lbp = predict_memory(n, m, edges, p, 8, 19, 19, Schedule::Lbp);
    let fbp = predict_memory(n, m, edges, p, 8, 19, 19, Schedule::Fbp);
    let cbp = predict_memory(n, m, edges, p, 8, 19, 19, Schedule::Cbp);
    assert_eq!(lbp.register_bits(), 58_368);
    assert_eq!(fbp.register_bits(), 58_368);
    assert_eq!(cbp.check_belief_cells * cbp.q_bits, 141_312);
    assert_eq!((cbp.check_belief_cells * cbp.q_bits) / 10, 14_131);
    assert_eq!(cbp.register_saving_vs(&lbp, 10), 44_237);
    println!(
        "ACCEPTANCE 3 analytic tables: PASS \
         (regular & irregular complexity cells to 3 s.f.; 58368/141312/14131/44237 exact)"
    );
}

// ---------------------------------------------------------------------------
// criteria 4-6: the desk-scale Monte-Carlo
// ---------------------------------------------------------------------------

#[test]
fn criterion_4_error_rate_parity() {
    let lbp = mc_row(Schedule::Lbp);
    let cbp = mc_row(Schedule::Cbp);
    let minsum = mc_row(Schedule::CbpMinSum);

    // Paired-frame discipline: every schedule decoded the same frames.
    assert!(monte_carlo().rows.iter().all(|r| r.frames == lbp.frames));
    assert!(
        monte_carlo()
            .rows
            .iter()
            .all(|r| r.frame_errors >= 100 || r.frames == 10_000),
        "minimum error count not reached"
    );

    assert!(
        (5e-3..=2e-2).contains(&lbp.fer),
        "operating point invalid: LBP FER {} at {OPERATING_POINT_DB} dB",
        lbp.fer
    );
    let cbp_ratio = cbp.fer / lbp.fer;
    assert!(
        (0.5..=2.0).contains(&cbp_ratio),
        "CBP FER {} vs LBP FER {}: ratio {cbp_ratio}",
        cbp.fer,
        lbp.fer
    );
    let ms_ratio = minsum.fer / cbp.fer;
    assert!(
        (1.0 / 3.0..=3.0).contains(&ms_ratio),
        "min-sum FER {} vs CBP FER {}: ratio {ms_ratio}",
        minsum.fer,
        cbp.fer
    );
    println!(
        "ACCEPTANCE 4 error-rate parity: PASS \
         (LBP FER {:.4}, CBP/LBP {:.2}, minsum/CBP {:.2}, {} frames)",
        lbp.fer, cbp_ratio, ms_ratio, lbp.frames
    );
}

#[test]
fn criterion_5a_convergence_fbp_over_cbp() {
    let fbp = mc_row(Schedule::Fbp);
    let cbp = mc_row(Schedule::Cbp);
    let ratio = fbp.avg_iterations / cbp.avg_iterations;
    let pass = (1.5..=2.7).contains(&ratio);
    println!(
        "ACCEPTANCE 5a convergence FBP/CBP in [1.5, 2.7]: {} (measured {ratio:.2}: FBP {:.1}, CBP {:.1})",
        if pass { "PASS" } else { "FAIL" },
        fbp.avg_iterations,
        cbp.avg_iterations
    );
    assert!(
        pass,
        "FBP/CBP iteration ratio {ratio:.3} outside [1.5, 2.7]. \
         With failures counted at the 200-iteration budget (the report's \
         averaging convention) FBP/LBP itself is only ~1.6 at this block \
         length, and the check-belief stop criterion spends stop_window/M \
         extra sweeps confirming convergence, so the ratio cannot reach 1.5 \
         anywhere in the allowed operating window; see the convergence data \
         printed above."
    );
}

#[test]
fn criterion_5b_convergence_cbp_over_lbp() {
    let cbp = mc_row(Schedule::Cbp);
    let lbp = mc_row(Schedule::Lbp);
    let ratio = cbp.avg_iterations / lbp.avg_iterations;
    let pass = (0.8..=1.3).contains(&ratio);
    println!(
        "ACCEPTANCE 5b convergence CBP/LBP in [0.8, 1.3]: {} (measured {ratio:.2}: CBP {:.1}, LBP {:.1})",
        if pass { "PASS" } else { "FAIL" },
        cbp.avg_iterations,
        lbp.avg_iterations
    );
    assert!(pass, "CBP/LBP iteration ratio {ratio:.3} outside [0.8, 1.3]");
}

#[test]
fn criterion_5c_convergence_cbp_over_rbp() {
    let cbp = mc_row(Schedule::Cbp);
    let rbp = mc_row(Schedule::Rbp);
    let svnf = mc_row(Schedule::SvnfRbp);
    let ratio = cbp.avg_iterations / rbp.avg_iterations;
    let pass = (1.4..=2.9).contains(&ratio);
    println!(
        "ACCEPTANCE 5c convergence CBP/RBP in [1.4, 2.9]: {} (measured {ratio:.2}: CBP {:.1}, RBP {:.1})",
        if pass { "PASS" } else { "FAIL" },
        cbp.avg_iterations,
        rbp.avg_iterations
    );
    // The residual variants are grouped by the model; the paired run pins
    // SVNF at RBP's speed within a factor of two (round-robin dispatch is
    // measurably slower than targeted dispatch at this block length).
    let svnf_ratio = svnf.avg_iterations / rbp.avg_iterations;
    assert!(
        (1.0..=1.8).contains(&svnf_ratio),
        "SVNF/RBP iteration ratio {svnf_ratio:.3} outside the frozen [1.0, 1.8]"
    );
    println!("           SVNF-RBP/RBP grouping: {svnf_ratio:.2} (frozen window [1.0, 1.8])");
    assert!(pass, "CBP/RBP iteration ratio {ratio:.3} outside [1.4, 2.9]");
}

#[test]
fn criterion_6_soundness() {
    // success => zero syndrome is asserted inside the sweep (debug) and
    // here via the public invariant: a success with bit errors on the
    // all-zero codeword could only be an undetected wrong codeword, which
    // the frame-error accounting already counts as an error. What remains
    // is the belief-criterion reliability: fires refuted by the syndrome
    // must stay under 1% of declared successes.
    for schedule in [Schedule::Cbp, Schedule::CbpMinSum] {
        let row = mc_row(schedule);
        let successes = row.frames - row.frame_errors;
        assert!(
            (row.undetected_stops as f64) < 0.01 * successes as f64,
            "{schedule}: {} undetected belief fires vs {} successes",
            row.undetected_stops,
            successes
        );
    }
    // And every schedule's bit errors are consistent with its frame errors.
    for row in &monte_carlo().rows {
        assert!(row.bit_errors <= row.frame_errors * 1024);
        assert!(row.ber <= row.fer);
    }
    let cbp = mc_row(Schedule::Cbp);
    let ms = mc_row(Schedule::CbpMinSum);
    println!(
        "ACCEPTANCE 6 soundness: PASS (undetected stops: cbp {}, minsum {} over {} frames)",
        cbp.undetected_stops, ms.undetected_stops, cbp.frames
    );
}

// ---------------------------------------------------------------------------
// criterion 7: reproducibility
// ---------------------------------------------------------------------------

#[test]
fn criterion_7_reproducibility() {
    let dist = DegreeDistribution::regular(3, 6).unwrap();
    let graph = peg_construct(128, 64, &dist, 1).unwrap();
    let mut spec = SweepSpec::new(
        vec![Schedule::Cbp, Schedule::Lbp, Schedule::Rbp],
        vec![2.0, 3.0],
        12345,
    );
    spec.min_frame_errors = 5;
    spec.max_frames = 1024;
    let a = emit_csv(&run_sweep(&graph, &spec));
    let b = emit_csv(&run_sweep(&graph, &spec));
    assert_eq!(a, b, "sweep CSV must be byte-identical across reruns");
    assert!(a.lines().count() > 1);
    println!("ACCEPTANCE 7 reproducibility: PASS (byte-identical CSV across reruns)");
}

// ---------------------------------------------------------------------------
// supporting sweep properties
// ---------------------------------------------------------------------------

#[test]
fn minsum_matches_exact_cbp_iterations_at_low_error_rates() {
    // In the low-error-rate region the normalized-min approximation tracks
    // the exact kernels closely, so the iteration averages agree within
    // 10%.
    let dist = DegreeDistribution::regular(3, 6).unwrap();
    let graph = peg_construct(128, 64, &dist, 1).unwrap();
    let mut spec = SweepSpec::new(vec![Schedule::Cbp, Schedule::CbpMinSum], vec![5.0], 4242);
    spec.min_frame_errors = 1;
    spec.max_frames = 512;
    let report = run_sweep(&graph, &spec);
    let cbp = &report.rows[0];
    let ms = &report.rows[1];
    assert_eq!(cbp.fer, 0.0);
    assert_eq!(ms.fer, 0.0);
    let ratio = ms.avg_iterations / cbp.avg_iterations;
    assert!(
        (0.9..=1.1).contains(&ratio),
        "min-sum {} vs exact {} iterations",
        ms.avg_iterations,
        cbp.avg_iterations
    );
}

#[test]
fn sweep_ber_monotonic_with_statistical_slack() {
    let dist = DegreeDistribution::regular(3, 6).unwrap();
    let graph = peg_construct(128, 64, &dist, 1).unwrap();
    let mut spec = SweepSpec::new(vec![Schedule::Cbp, Schedule::Fbp], vec![1.0, 2.0, 3.0, 4.0], 777);
    spec.min_frame_errors = 30;
    spec.max_frames = 4096;
    let report = run_sweep(&graph, &spec);
    for schedule in [Schedule::Cbp, Schedule::Fbp] {
        let rows: Vec<&SweepRow> = report
            .rows
            .iter()
            .filter(|r| r.schedule == schedule)
            .collect();
        assert!(
            ber_monotonic_with_slack(&rows, graph.n_variables()),
            "{schedule}: BER not monotone: {:?}",
            rows.iter().map(|r| r.ber).collect::<Vec<_>>()
        );
    }
}
