//! `cbp`: construct LDPC codes, decode frames, run Monte-Carlo sweeps, and
//! print complexity reports.
//!
//! Exit codes: 0 success, 1 usage error, 2 IO/parse error, 3 internal
//! invariant violation.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use cbp_core::decoder::cbp::decode_cbp_traced;
use cbp_core::{
    decode, emit_csv, emit_json, load_alist, peg_construct, predict_memory,
    predict_total_complexity, run_sweep, save_alist, CodeGraph, ChannelConfig, DecoderConfig,
    DegreeDistribution, Schedule, StopWindow, SweepSpec,
};

#[derive(Parser)]
#[command(name = "cbp", version, about = "LDPC decoding with check-belief propagation")]
struct Cli {
    /// Worker threads for frame-parallel sweeps (default: all cores).
    /// Results are identical for any thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a Tanner graph by progressive edge growth and write it as
    /// an alist file.
    Construct(ConstructArgs),
    /// Decode a single frame and print the result.
    Decode(DecodeArgs),
    /// Run a Monte-Carlo BER/FER sweep over Eb/N0 points and schedules.
    Sweep(SweepArgs),
    /// Print the analytic per-schedule calculation and memory models.
    ComplexityReport(ReportArgs),
}

#[derive(Args)]
struct ConstructArgs {
    /// Number of variable nodes (block length).
    #[arg(long)]
    n: usize,
    /// Number of check nodes.
    #[arg(long)]
    m: usize,
    /// Regular degrees as "dv,dc".
    #[arg(long, value_name = "DV,DC")]
    regular: Option<String>,
    /// Variable-side degree distribution as "deg:fraction,..." (edge view).
    #[arg(long, value_name = "SPEC", requires = "rho", conflicts_with = "regular")]
    lambda: Option<String>,
    /// Check-side degree distribution as "deg:fraction,...".
    #[arg(long, value_name = "SPEC", requires = "lambda", conflicts_with = "regular")]
    rho: Option<String>,
    /// Construction seed (recorded for reproducibility; the deterministic
    /// tie-breaking makes the result seed-invariant).
    #[arg(long)]
    seed: u64,
    /// Output alist path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DecodeArgs {
    /// Alist file of the code.
    #[arg(long)]
    code: PathBuf,
    /// Schedule: fbp, lbp, rbp, svnf-rbp, cbp, cbp-minsum.
    #[arg(long)]
    schedule: String,
    /// File with one channel LLR per line (N lines).
    #[arg(long, conflicts_with_all = ["ebn0", "frame"])]
    llr: Option<PathBuf>,
    /// Generate the frame from the channel model at this Eb/N0 (dB).
    #[arg(long, requires = "seed")]
    ebn0: Option<f64>,
    /// Channel seed for --ebn0.
    #[arg(long)]
    seed: Option<u64>,
    /// Frame index for --ebn0.
    #[arg(long, default_value_t = 0)]
    frame: u64,
    /// Normalization factor of the min-sum variant.
    #[arg(long, default_value_t = 0.75)]
    alpha: f64,
    #[arg(long, default_value_t = 200)]
    max_iters: usize,
    /// Stop window for the check-belief schedules: "n" or "m".
    #[arg(long, default_value = "n")]
    stop_window: String,
    /// Write the per-check-update belief trajectory as CSV (check-belief
    /// schedules only).
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Alist file of the code.
    #[arg(long, required_unless_present = "spec")]
    code: Option<PathBuf>,
    /// Comma-separated schedules, or "all".
    #[arg(long, required_unless_present = "spec")]
    schedules: Option<String>,
    /// Comma-separated Eb/N0 points in dB.
    #[arg(long, required_unless_present = "spec")]
    ebn0: Option<String>,
    /// Frames accumulate until every schedule has this many frame errors.
    #[arg(long, default_value_t = 100)]
    min_errors: u64,
    #[arg(long, default_value_t = 1_000_000)]
    max_frames: u64,
    /// Channel seed.
    #[arg(long, required_unless_present = "spec")]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0.75)]
    alpha: f64,
    #[arg(long, default_value_t = 200)]
    max_iters: usize,
    /// Stop window for the check-belief schedules: "n" or "m".
    #[arg(long, default_value = "n")]
    stop_window: String,
    /// JSON bundle carrying all sweep parameters (replaces the flags above).
    #[arg(long, conflicts_with_all = ["code", "schedules", "ebn0", "seed"])]
    spec: Option<PathBuf>,
    /// CSV output path.
    #[arg(long)]
    csv: PathBuf,
    /// Optional JSON output path.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Alist file; degree distribution and sizes are taken from the graph.
    #[arg(long)]
    code: Option<PathBuf>,
    /// Regular degrees as "dv,dc" (alternative to --code).
    #[arg(long, value_name = "DV,DC", conflicts_with = "code")]
    regular: Option<String>,
    /// Variable-side distribution "deg:fraction,..." (with --rho).
    #[arg(long, requires = "rho", conflicts_with_all = ["code", "regular"])]
    lambda: Option<String>,
    #[arg(long)]
    rho: Option<String>,
    /// Comma-separated schedules, or "all".
    #[arg(long, default_value = "all")]
    schedules: String,
    /// Edge count E for absolute numbers (taken from --code when given).
    #[arg(long)]
    edges: Option<u64>,
    /// Block length N for the memory table (from --code when given).
    #[arg(long)]
    n: Option<u64>,
    /// Check count M for the memory table (from --code when given).
    #[arg(long)]
    m: Option<u64>,
    /// Parallel node processors of the memory model.
    #[arg(long, default_value_t = 384)]
    parallelism: u64,
    /// Message width in bits.
    #[arg(long, default_value_t = 8)]
    qbits: u64,
    /// Area of one register in units of general memory cells.
    #[arg(long, default_value_t = 10)]
    area_factor: u64,
    /// Optional JSON output path.
    #[arg(long)]
    json: Option<PathBuf>,
}

enum CliError {
    Usage(String),
    Io(String),
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(1),
            CliError::Io(_) => ExitCode::from(2),
            CliError::Internal(_) => ExitCode::from(3),
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Internal(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are successful exits
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
            let _ = e.print();
            return code;
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    let result = match cli.command {
        Command::Construct(args) => cmd_construct(args),
        Command::Decode(args) => cmd_decode(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::ComplexityReport(args) => cmd_complexity_report(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn parse_pair(s: &str, what: &str) -> Result<(usize, usize), CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(CliError::Usage(format!("{what} must be \"a,b\", got {s:?}")));
    }
    let a = parts[0]
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("{what}: bad integer {:?}", parts[0])))?;
    let b = parts[1]
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("{what}: bad integer {:?}", parts[1])))?;
    Ok((a, b))
}

fn parse_terms(s: &str, what: &str) -> Result<Vec<(usize, f64)>, CliError> {
    s.split(',')
        .map(|term| {
            let (d, f) = term
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("{what}: term {term:?} is not deg:frac")))?;
            let d = d
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{what}: bad degree {d:?}")))?;
            let f = f
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{what}: bad fraction {f:?}")))?;
            Ok((d, f))
        })
        .collect()
}

fn parse_distribution(
    regular: &Option<String>,
    lambda: &Option<String>,
    rho: &Option<String>,
) -> Result<DegreeDistribution, CliError> {
    if let Some(reg) = regular {
        let (dv, dc) = parse_pair(reg, "--regular")?;
        DegreeDistribution::regular(dv, dc).map_err(|e| CliError::Usage(e.to_string()))
    } else if let (Some(l), Some(r)) = (lambda, rho) {
        DegreeDistribution::new(parse_terms(l, "--lambda")?, parse_terms(r, "--rho")?)
            .map_err(|e| CliError::Usage(e.to_string()))
    } else {
        Err(CliError::Usage(
            "specify --regular dv,dc or both --lambda and --rho".into(),
        ))
    }
}

fn parse_schedules(s: &str) -> Result<Vec<Schedule>, CliError> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(Schedule::ALL.to_vec());
    }
    s.split(',')
        .map(|name| Schedule::from_str(name.trim()).map_err(CliError::Usage))
        .collect()
}

fn parse_stop_window(s: &str) -> Result<StopWindow, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "n" | "codeword-length" => Ok(StopWindow::CodewordLength),
        "m" | "check-count" => Ok(StopWindow::CheckCount),
        other => Err(CliError::Usage(format!(
            "unknown stop window {other:?}; valid: n, m"
        ))),
    }
}

fn load_graph(path: &PathBuf) -> Result<CodeGraph, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    load_alist(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn cmd_construct(args: ConstructArgs) -> Result<(), CliError> {
    let dist = parse_distribution(&args.regular, &args.lambda, &args.rho)?;
    let graph = peg_construct(args.n, args.m, &dist, args.seed)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    graph
        .validate()
        .map_err(|e| CliError::Internal(format!("constructed graph is invalid: {e}")))?;
    fs::write(&args.out, save_alist(&graph))
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", args.out.display())))?;
    let girth = graph
        .girth()
        .map(|g| g.to_string())
        .unwrap_or_else(|| "none (acyclic)".into());
    println!(
        "N={} M={} E={} girth={girth}",
        graph.n_variables(),
        graph.n_checks(),
        graph.n_edges()
    );
    Ok(())
}

fn read_llr_file(path: &PathBuf, n: usize) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let values: Result<Vec<f64>, CliError> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Io(format!("{}:{}: not a real number: {l:?}", path.display(), i + 1)))
        })
        .collect();
    let values = values?;
    if values.len() != n {
        return Err(CliError::Io(format!(
            "{}: expected {n} values, found {}",
            path.display(),
            values.len()
        )));
    }
    Ok(values)
}

fn cmd_decode(args: DecodeArgs) -> Result<(), CliError> {
    let graph = load_graph(&args.code)?;
    let schedule = Schedule::from_str(&args.schedule).map_err(CliError::Usage)?;
    let llr = if let Some(path) = &args.llr {
        read_llr_file(path, graph.n_variables())?
    } else if let Some(ebn0) = args.ebn0 {
        let channel = ChannelConfig {
            eb_n0_db: ebn0,
            code_rate: graph.rate(),
            seed: args.seed.expect("clap enforces --seed with --ebn0"),
        };
        let y = channel.transmit(&vec![0u8; graph.n_variables()], args.frame);
        channel.prior_llr(&y)
    } else {
        return Err(CliError::Usage(
            "provide --llr FILE or --ebn0 DB --seed S [--frame K]".into(),
        ));
    };

    let cfg = DecoderConfig {
        max_iterations: args.max_iters,
        schedule,
        alpha: args.alpha,
        count_ops: true,
        cbp_stop_window: parse_stop_window(&args.stop_window)?,
    };
    let result = if let Some(trace_path) = &args.trace {
        if !matches!(schedule, Schedule::Cbp | Schedule::CbpMinSum) {
            return Err(CliError::Usage(
                "--trace records check beliefs and needs --schedule cbp or cbp-minsum".into(),
            ));
        }
        let (result, trace) = decode_cbp_traced(&graph, &llr, &cfg);
        let mut csv = String::from("update_index,check,check_belief,satisfied\n");
        for row in &trace {
            let _ = writeln!(
                csv,
                "{},{},{},{}",
                row.update_index, row.check, row.check_belief, row.satisfied
            );
        }
        fs::write(trace_path, csv)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", trace_path.display())))?;
        result
    } else {
        decode(&graph, &llr, &cfg)
    };

    println!("schedule: {schedule}");
    println!("success: {}", result.success);
    println!("stop_reason: {:?}", result.stop_reason);
    println!("iterations_used: {}", result.iterations_used);
    let weight: u32 = result.hard_bits.iter().map(|&b| b as u32).sum();
    println!("decision_weight: {weight}");
    println!(
        "ops: sums={} products={} comparisons={} selections={} engine_comparisons={}",
        result.counters.sums,
        result.counters.products,
        result.counters.comparisons,
        result.counters.selections,
        result.counters.engine_comparisons
    );
    for (kind, count) in result.counters.updates_map() {
        if count > 0 {
            println!("updates.{kind}: {count}");
        }
    }
    if result.undetected_stops > 0 {
        println!("undetected_stops: {}", result.undetected_stops);
    }
    Ok(())
}

/// JSON bundle mirroring the sweep flags, for reproducible reruns.
#[derive(Deserialize)]
struct SweepSpecFile {
    code: String,
    schedules: Vec<String>,
    ebn0_db: Vec<f64>,
    #[serde(default = "default_min_errors")]
    min_frame_errors: u64,
    #[serde(default = "default_max_frames")]
    max_frames: u64,
    seed: u64,
    #[serde(default = "default_alpha")]
    alpha: f64,
    #[serde(default = "default_max_iterations")]
    max_iterations: usize,
    #[serde(default = "default_stop_window")]
    stop_window: String,
}

fn default_min_errors() -> u64 {
    100
}
fn default_max_frames() -> u64 {
    1_000_000
}
fn default_alpha() -> f64 {
    0.75
}
fn default_max_iterations() -> usize {
    200
}
fn default_stop_window() -> String {
    "n".into()
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let (graph, spec) = if let Some(spec_path) = &args.spec {
        let text = fs::read_to_string(spec_path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", spec_path.display())))?;
        let file: SweepSpecFile = serde_json::from_str(&text)
            .map_err(|e| CliError::Io(format!("{}: {e}", spec_path.display())))?;
        let graph = load_graph(&PathBuf::from(&file.code))?;
        let schedules = parse_schedules(&file.schedules.join(","))?;
        let mut spec = SweepSpec::new(schedules, file.ebn0_db, file.seed);
        spec.min_frame_errors = file.min_frame_errors;
        spec.max_frames = file.max_frames;
        spec.alpha = file.alpha;
        spec.max_iterations = file.max_iterations;
        spec.cbp_stop_window = parse_stop_window(&file.stop_window)?;
        (graph, spec)
    } else {
        let code = args.code.as_ref().expect("clap enforces --code");
        let graph = load_graph(code)?;
        let schedules = parse_schedules(args.schedules.as_deref().expect("clap"))?;
        let points: Result<Vec<f64>, CliError> = args
            .ebn0
            .as_deref()
            .expect("clap")
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("bad Eb/N0 value {p:?}")))
            })
            .collect();
        let mut spec = SweepSpec::new(schedules, points?, args.seed.expect("clap"));
        spec.min_frame_errors = args.min_errors;
        spec.max_frames = args.max_frames;
        spec.alpha = args.alpha;
        spec.max_iterations = args.max_iters;
        spec.cbp_stop_window = parse_stop_window(&args.stop_window)?;
        (graph, spec)
    };
    if spec.eb_n0_db.is_empty() {
        return Err(CliError::Usage("at least one Eb/N0 point required".into()));
    }
    if spec.min_frame_errors < 1 {
        return Err(CliError::Usage("--min-errors must be at least 1".into()));
    }

    let report = run_sweep(&graph, &spec);
    let csv = emit_csv(&report);
    fs::write(&args.csv, &csv)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", args.csv.display())))?;
    if let Some(json_path) = &args.json {
        fs::write(json_path, emit_json(&report))
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", json_path.display())))?;
    }

    println!(
        "{:<11} {:>7} {:>8} {:>10} {:>12} {:>12} {:>10}",
        "schedule", "ebn0", "frames", "errors", "ber", "fer", "avg_iters"
    );
    for row in &report.rows {
        println!(
            "{:<11} {:>7} {:>8} {:>10} {:>12.4e} {:>12.4e} {:>10.2}",
            row.schedule.to_string(),
            row.eb_n0_db,
            row.frames,
            row.frame_errors,
            row.ber,
            row.fer,
            row.avg_iterations
        );
    }
    Ok(())
}

fn cmd_complexity_report(args: ReportArgs) -> Result<(), CliError> {
    let (dist, n, m, e) = if let Some(code) = &args.code {
        let graph = load_graph(code)?;
        let dist = distribution_of(&graph);
        (
            dist,
            graph.n_variables() as u64,
            graph.n_checks() as u64,
            graph.n_edges() as u64,
        )
    } else {
        let dist = parse_distribution(&args.regular, &args.lambda, &args.rho)?;
        let e = args.edges.unwrap_or(10_000);
        let n = args
            .n
            .unwrap_or_else(|| (e as f64 * dist.lambda_inv_moment()).round() as u64);
        let m = args
            .m
            .unwrap_or_else(|| (e as f64 * dist.rho_inv_moment()).round() as u64);
        (dist, n, m, e)
    };
    let schedules = parse_schedules(&args.schedules)?;
    let max_dv = dist.max_var_degree() as u64;
    let max_dc = dist.max_check_degree() as u64;

    println!("distribution: lambda={:?} rho={:?}", dist.lambda(), dist.rho());
    println!("N={n} M={m} E={e} P={} q={} bits", args.parallelism, args.qbits);
    println!(
        "{:<11} {:>10} {:>12} {:>16} {:>12} | {:>13} {:>13} {:>13}",
        "schedule", "sums/E", "products/E", "comparisons", "selections/E", "general_bits", "register_bits", "reg_equiv"
    );
    let mut json_rows = Vec::new();
    for &schedule in &schedules {
        let c = predict_total_complexity(&dist, e as usize, schedule);
        let mem = predict_memory(n, m, e, args.parallelism, args.qbits, max_dv, max_dc, schedule);
        let comparisons = if c.comparisons == 0.0 {
            "0".to_string()
        } else {
            format!("{:.4e}", c.comparisons)
        };
        println!(
            "{:<11} {:>10.3} {:>12.3} {:>16} {:>12.3} | {:>13} {:>13} {:>13}",
            schedule.to_string(),
            c.sums / e as f64,
            c.products / e as f64,
            comparisons,
            c.selections / e as f64,
            mem.general_bits(),
            mem.register_bits(),
            mem.register_equivalent_total(args.area_factor)
        );
        json_rows.push(serde_json::json!({
            "schedule": schedule,
            "complexity": c,
            "memory": mem,
            "register_equivalent_total": mem.register_equivalent_total(args.area_factor),
        }));
    }
    if let Some(path) = &args.json {
        let doc = serde_json::json!({
            "n": n, "m": m, "e": e,
            "parallelism": args.parallelism,
            "q_bits": args.qbits,
            "register_area_factor": args.area_factor,
            "schedules": json_rows,
        });
        fs::write(path, serde_json::to_string_pretty(&doc).expect("serializable"))
            .map_err(|err| CliError::Io(format!("cannot write {}: {err}", path.display())))?;
    }
    Ok(())
}

/// Edge-perspective degree distribution measured from a concrete graph.
fn distribution_of(graph: &CodeGraph) -> DegreeDistribution {
    use std::collections::BTreeMap;
    let e = graph.n_edges() as f64;
    let mut lambda: BTreeMap<usize, f64> = BTreeMap::new();
    for v in 0..graph.n_variables() {
        let d = graph.var_degree(v);
        *lambda.entry(d).or_insert(0.0) += d as f64 / e;
    }
    let mut rho: BTreeMap<usize, f64> = BTreeMap::new();
    for c in 0..graph.n_checks() {
        let d = graph.check_degree(c);
        *rho.entry(d).or_insert(0.0) += d as f64 / e;
    }
    DegreeDistribution::new(lambda.into_iter().collect(), rho.into_iter().collect())
        .expect("graph-measured distribution is always valid")
}
