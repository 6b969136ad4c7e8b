//! Command-line front end: synthesize, lower, verify, report, sweep, and
//! export.
//!
//! Exit codes: 0 on success (including a passing verification), 1 when
//! verification finds a counterexample, 2 on usage or configuration
//! errors. The only environment variables honored are `QCLA_SEED` (seed
//! override, beaten by `--seed`) and `QCLA_LOG` (set to `debug` or
//! `trace` for progress messages on stderr); everything else is a flag,
//! and reports embed the instance, strategy, tool version, and seed so
//! every table is regenerable from its own header.

use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qcla::decomp::UncomputeMode;
use qcla::modadd::{synth_modadd, Instance};
use qcla::qasm::export_qasm;
use qcla::resource::{
    model_kq_t, model_t_depth, optimal_t_width, reference_costs, report_for, schedule_t_width,
    synth_distillation, ResourceReport, DEFAULT_CG, REPORT_SCHEMA,
};
use qcla::sim::{verify_circuit, verify_functional, VerifyOptions, VerifyScope};
use qcla::strategy::{lower, lower_blocks, Strategy};

#[derive(Parser)]
#[command(
    name = "qcla",
    version,
    about = "Controlled modular adder synthesis and resource estimation"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Synthesize a circuit and emit it as QASM-2.0-subset text.
    Synth(SynthArgs),
    /// Emit the resource report for one lowered instance.
    Report(ReportArgs),
    /// Check the modular-sum contract on simulated inputs.
    Verify(VerifyArgs),
    /// Tabulate modeled and scheduled T-depth against the T-width budget.
    #[command(name = "sweep-kqt")]
    SweepKqt(SweepArgs),
    /// Emit the magic-state distillation gadget summary.
    #[command(name = "distill-report")]
    DistillReport(DistillArgs),
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum Format {
    Text,
    Json,
    Csv,
    Qasm,
}

#[derive(ValueEnum, Clone, Copy)]
enum Level {
    /// Toffoli variants kept as blocks.
    Block,
    /// Fully expanded primitive gates.
    Primitive,
}

#[derive(ValueEnum, Clone, Copy)]
enum Uncompute {
    /// Inverse-circuit uncomputation.
    Unitary,
    /// X-basis measurement with a classically conditioned CZ.
    Measure,
}

impl From<Uncompute> for UncomputeMode {
    fn from(u: Uncompute) -> Self {
        match u {
            Uncompute::Unitary => UncomputeMode::UnitaryUncompute,
            Uncompute::Measure => UncomputeMode::MeasurementUncompute,
        }
    }
}

#[derive(Args)]
struct InstanceArgs {
    /// Register width in bits.
    #[arg(long)]
    n: usize,
    /// Modulus, in decimal; sampled from the seed when omitted.
    #[arg(long, value_parser = parse_biguint)]
    modulus: Option<BigUint>,
    /// Addend, in decimal; sampled from the seed when omitted.
    #[arg(long, value_parser = parse_biguint)]
    addend: Option<BigUint>,
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    /// Decomposition strategy.
    #[arg(long, default_value = "ours-ftq", value_parser = parse_strategy)]
    strategy: Strategy,
    /// Lowering level.
    #[arg(long, value_enum, default_value_t = Level::Primitive)]
    level: Level,
    /// Uncomputation style for paired relative-phase blocks.
    #[arg(long, value_enum, default_value_t = Uncompute::Measure)]
    uncompute: Uncompute,
    /// Instance-sampling seed; beats QCLA_SEED.
    #[arg(long)]
    seed: Option<u64>,
    /// Output format (qasm or json).
    #[arg(long, value_enum, default_value_t = Format::Qasm)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    /// Decomposition strategy; vmi reports the closed-form reference model.
    #[arg(long, default_value = "ours-ftq", value_parser = parse_strategy)]
    strategy: Strategy,
    /// Instance-sampling seed; beats QCLA_SEED.
    #[arg(long)]
    seed: Option<u64>,
    /// Output format (json, csv, or text).
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    /// Decomposition strategy.
    #[arg(long, default_value = "ours-ftq", value_parser = parse_strategy)]
    strategy: Strategy,
    /// Uncomputation style.
    #[arg(long, value_enum, default_value_t = Uncompute::Measure)]
    uncompute: Uncompute,
    /// Sample this many cases instead of checking exhaustively.
    #[arg(long)]
    samples: Option<usize>,
    /// Seed for instance and input sampling; beats QCLA_SEED.
    #[arg(long)]
    seed: Option<u64>,
    /// Fault injection: delete this block from the lowered circuit first.
    #[arg(long)]
    drop_block: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    /// Register widths, comma separated.
    #[arg(long, required = true, value_delimiter = ',', num_args = 1..)]
    n: Vec<usize>,
    /// Smallest T width.
    #[arg(long, default_value_t = 1)]
    n_t_min: usize,
    /// Largest T width.
    #[arg(long, default_value_t = 64)]
    n_t_max: usize,
    /// Distillation qubits charged per magic-state consumer.
    #[arg(long, default_value_t = DEFAULT_CG)]
    c_g: usize,
    /// Strategy whose lowered circuit is scheduled.
    #[arg(long, default_value = "ours-ftq", value_parser = parse_strategy)]
    strategy: Strategy,
    /// Instance-sampling seed; beats QCLA_SEED.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct DistillArgs {
    /// Output format (json or text).
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn parse_biguint(s: &str) -> Result<BigUint, String> {
    s.parse()
        .map_err(|_| format!("not a decimal integer: `{s}`"))
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse()
}

fn log(msg: &str) {
    if matches!(
        std::env::var("QCLA_LOG").as_deref(),
        Ok("debug") | Ok("trace")
    ) {
        eprintln!("qcla: {msg}");
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, String> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("QCLA_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| format!("QCLA_SEED is not an unsigned integer: `{v}`")),
        Err(_) => Ok(0),
    }
}

fn resolve_instance(args: &InstanceArgs, seed: u64) -> Result<Instance, String> {
    let inst = match (&args.modulus, &args.addend) {
        (Some(m), Some(a)) => {
            Instance::new(args.n, m.clone(), a.clone()).map_err(|e| e.to_string())?
        }
        (None, None) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Instance::sample(args.n, &mut rng).map_err(|e| e.to_string())?
        }
        _ => return Err("--modulus and --addend must be given together".into()),
    };
    log(&format!(
        "instance n={} N={} a={}",
        inst.n, inst.modulus, inst.addend
    ));
    Ok(inst)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| e.to_string())
}

fn csv_to_string(wtr: csv::Writer<Vec<u8>>) -> Result<String, String> {
    let bytes = wtr.into_inner().map_err(|e| e.to_string())?;
    String::from_utf8(bytes).map_err(|e| e.to_string())
}

fn cmd_synth(args: SynthArgs) -> Result<ExitCode, String> {
    let seed = resolve_seed(args.seed)?;
    let inst = resolve_instance(&args.inst, seed)?;
    let synthesized = synth_modadd(&inst).map_err(|e| e.to_string())?;
    let circ = match args.level {
        Level::Block => lower_blocks(&synthesized, args.strategy, args.uncompute.into()),
        Level::Primitive => lower(&synthesized, args.strategy, args.uncompute.into()),
    }
    .map_err(|e| e.to_string())?;
    log(&format!(
        "{} blocks over {} wires",
        circ.blocks.len(),
        circ.width()
    ));
    let text = match args.format {
        Format::Qasm => export_qasm(&circ),
        Format::Json => to_json(&circ)?,
        _ => return Err("synth emits qasm or json".into()),
    };
    emit(&text, args.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn render_report_text(report: &ResourceReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "strategy       {}", report.strategy);
    let _ = writeln!(
        out,
        "instance       n={} N={} a={}",
        report.instance.n, report.instance.modulus, report.instance.addend
    );
    let _ = writeln!(out, "seed           {}", report.seed);
    let _ = writeln!(
        out,
        "toffoli        {} (depth {})",
        report.toffoli_count, report.toffoli_depth
    );
    let _ = writeln!(
        out,
        "t              {} (depth {})",
        report.t_count, report.t_depth
    );
    let _ = writeln!(
        out,
        "cnot           {} (depth {})",
        report.cnot_count, report.cnot_depth
    );
    let _ = writeln!(
        out,
        "qubits         {} (+{} classical)",
        report.qubit_count, report.classical_bits
    );
    let _ = writeln!(out, "kq_t           {}", report.kq_t);
    let _ = writeln!(out, "kq_cx          {}", report.kq_cx);
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:<8} {:<10} {:<10} {:>8} {:>8}",
        "section", "round", "cost", "count", "depth"
    );
    for row in &report.per_round {
        if row.gate != "toffoli" {
            continue;
        }
        let _ = writeln!(
            out,
            "{:<8} {:<10} {:<10} {:>8} {:>8}",
            row.section, row.round, row.cost, row.count, row.depth
        );
    }
    out
}

fn report_csv(report: &ResourceReport) -> Result<String, String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["round", "gate", "cost", "count", "depth"])
        .map_err(|e| e.to_string())?;
    for row in &report.per_round {
        wtr.write_record([
            row.round.as_str(),
            row.gate.as_str(),
            row.cost.as_str(),
            &row.count.to_string(),
            &row.depth.to_string(),
        ])
        .map_err(|e| e.to_string())?;
    }
    csv_to_string(wtr)
}

fn cmd_report(args: ReportArgs) -> Result<ExitCode, String> {
    let seed = resolve_seed(args.seed)?;
    let inst = resolve_instance(&args.inst, seed)?;
    if args.strategy == Strategy::VanMeterItohRef {
        let value = serde_json::json!({
            "schema": REPORT_SCHEMA,
            "version": env!("CARGO_PKG_VERSION"),
            "strategy": args.strategy.name(),
            "model": true,
            "instance": {
                "n": inst.n,
                "modulus": inst.modulus.to_string(),
                "addend": inst.addend.to_string(),
            },
            "seed": seed,
            "reference": reference_costs(inst.n),
        });
        return match args.format {
            Format::Json => {
                print!("{}", to_json(&value)?);
                Ok(ExitCode::SUCCESS)
            }
            _ => Err("the reference model reports json only".into()),
        };
    }
    let report = report_for(&inst, args.strategy, seed).map_err(|e| e.to_string())?;
    let text = match args.format {
        Format::Json => to_json(&report)?,
        Format::Csv => report_csv(&report)?,
        Format::Text => render_report_text(&report),
        Format::Qasm => return Err("report emits json, csv, or text".into()),
    };
    print!("{text}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, String> {
    let seed = resolve_seed(args.seed)?;
    let inst = resolve_instance(&args.inst, seed)?;
    let opts = VerifyOptions {
        scope: match args.samples {
            Some(k) => VerifyScope::Sampled(k),
            None => VerifyScope::Exhaustive,
        },
        seed,
        run_seeds: vec![seed],
    };
    let verdict = match args.drop_block {
        None => verify_functional(&inst, args.strategy, args.uncompute.into(), &opts)
            .map_err(|e| e.to_string())?,
        Some(idx) => {
            let synthesized = synth_modadd(&inst).map_err(|e| e.to_string())?;
            let blocks = lower_blocks(&synthesized, args.strategy, args.uncompute.into())
                .map_err(|e| e.to_string())?;
            if idx >= blocks.blocks.len() {
                return Err(format!(
                    "--drop-block {idx} out of range; the circuit has {} blocks",
                    blocks.blocks.len()
                ));
            }
            log(&format!("dropping block {idx} of {}", blocks.blocks.len()));
            verify_circuit(&blocks.without_block(idx), &inst, &opts)
        }
    };
    print!("{}", to_json(&verdict)?);
    Ok(if verdict.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_sweep_kqt(args: SweepArgs) -> Result<ExitCode, String> {
    if args.n_t_min == 0 || args.n_t_min > args.n_t_max {
        return Err("need 1 <= n-t-min <= n-t-max".into());
    }
    let seed = resolve_seed(args.seed)?;
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record([
        "n",
        "n_T",
        "model_t_depth",
        "scheduled_t_depth",
        "kq_t",
        "optimum",
    ])
    .map_err(|e| e.to_string())?;
    for &n in &args.n {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = Instance::sample(n, &mut rng).map_err(|e| e.to_string())?;
        log(&format!("n={n}: N={} a={}", inst.modulus, inst.addend));
        let synthesized = synth_modadd(&inst).map_err(|e| e.to_string())?;
        let circ = lower(
            &synthesized,
            args.strategy,
            UncomputeMode::MeasurementUncompute,
        )
        .map_err(|e| e.to_string())?;
        let best = optimal_t_width(n, args.c_g);
        for n_t in args.n_t_min..=args.n_t_max {
            let scheduled = schedule_t_width(&circ, n_t).map_err(|e| e.to_string())?;
            wtr.write_record([
                n.to_string(),
                n_t.to_string(),
                format!("{:.2}", model_t_depth(n, n_t)),
                scheduled.to_string(),
                format!("{:.2}", model_kq_t(n, n_t, args.c_g)),
                (n_t == best).to_string(),
            ])
            .map_err(|e| e.to_string())?;
        }
    }
    print!("{}", csv_to_string(wtr)?);
    Ok(ExitCode::SUCCESS)
}

fn cmd_distill_report(args: DistillArgs) -> Result<ExitCode, String> {
    let (_, report) = synth_distillation();
    match args.format {
        Format::Json => print!("{}", to_json(&report)?),
        Format::Text => {
            println!("qubits {}", report.qubit_count);
            println!("cnot   {}", report.cnot_count);
            println!("depth  {}", report.depth);
        }
        _ => return Err("distill-report emits json or text".into()),
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.cmd {
        Cmd::Synth(args) => cmd_synth(args),
        Cmd::Report(args) => cmd_report(args),
        Cmd::Verify(args) => cmd_verify(args),
        Cmd::SweepKqt(args) => cmd_sweep_kqt(args),
        Cmd::DistillReport(args) => cmd_distill_report(args),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
