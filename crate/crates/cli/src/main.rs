//! `mcflow`: decide multi-commodity flow feasibility from the command line.
//!
//! Exit codes: 0 feasible / ok, 1 infeasible / check failed / disagreement,
//! 2 undecided, 10 usage or parse error, 11 flow-dump dimension error or
//! missing flow file, 12 instance too large for the oracle.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mcflow_core::{
    certify::FEASIBLE_FLOW_TOL, check_feasible, classify_default, desk_instance, format_trace_csv,
    format_verdict, generate_random_instance, oracle_feasibility, parse_flow_dump, solve,
    FlowDumpError, GeneratorParams, Init, Instance, Method, Profiles, SolverConfig, VerdictKind,
};

const EXIT_USAGE: u8 = 10;
const EXIT_DIMENSION: u8 = 11;
const EXIT_ORACLE: u8 = 12;

#[derive(Parser)]
#[command(
    name = "mcflow",
    version,
    about = "Multi-commodity flow feasibility via stable pseudo-flows"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and print the verdict report.
    Solve {
        /// Instance file; stdin when omitted or `-`.
        input: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write the convergence trace as CSV.
        #[arg(long, value_name = "PATH")]
        trace: Option<PathBuf>,
    },
    /// Check a flow dump against capacity, conservation and nonnegativity.
    Check {
        input: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        flow: PathBuf,
        #[arg(long, default_value_t = FEASIBLE_FLOW_TOL)]
        tol: f64,
    },
    /// Print a seeded random instance.
    Generate(GenerateArgs),
    /// Compare verdicts against the exact oracle.
    Verify {
        input: Option<PathBuf>,
        /// Verify N generated desk-scale instances instead of an input file.
        #[arg(long, value_name = "N")]
        random: Option<usize>,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Pgd,
    Coord,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    Zero,
    Random,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, value_enum, default_value = "coord")]
    method: MethodArg,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "zero")]
    init: InitArg,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig, Failure> {
        let cfg = SolverConfig {
            method: match self.method {
                MethodArg::Pgd => Method::Pgd,
                MethodArg::Coord => Method::Coordinate,
            },
            tol: self.tol,
            max_iters: self.max_iters,
            seed: self.seed,
            init: match self.init {
                InitArg::Zero => Init::Zero,
                InitArg::Random => Init::Random,
            },
            ..Default::default()
        };
        cfg.validate().map_err(|e| Failure::usage(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 6)]
    vertices: usize,
    #[arg(long, default_value_t = 10)]
    arcs: usize,
    #[arg(long, default_value_t = 3)]
    commodities: usize,
    #[arg(long, default_value_t = 1.0)]
    cap_min: f64,
    #[arg(long, default_value_t = 5.0)]
    cap_max: f64,
    #[arg(long, default_value_t = 1.0)]
    demand_min: f64,
    #[arg(long, default_value_t = 5.0)]
    demand_max: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Draw integer capacities and demands.
    #[arg(long)]
    integer: bool,
    /// Forbid parallel arcs.
    #[arg(long)]
    simple: bool,
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            msg: msg.into(),
        }
    }
}

fn read_input(path: Option<&Path>) -> Result<String, Failure> {
    let mut text = String::new();
    match path {
        None => io::stdin().read_to_string(&mut text).map(|_| ()),
        Some(p) if p.as_os_str() == "-" => io::stdin().read_to_string(&mut text).map(|_| ()),
        Some(p) => fs::read_to_string(p).map(|t| text = t),
    }
    .map_err(|e| Failure::usage(format!("cannot read input: {e}")))?;
    Ok(text)
}

fn load_instance(path: Option<&Path>) -> Result<Instance, Failure> {
    let text = read_input(path)?;
    Instance::parse(&text).map_err(|e| Failure::usage(format!("parse error: {e}")))
}

fn verdict_code(kind: VerdictKind) -> u8 {
    match kind {
        VerdictKind::Feasible => 0,
        VerdictKind::Infeasible => 1,
        VerdictKind::Undecided => 2,
    }
}

fn cmd_solve(
    input: Option<&Path>,
    solver: &SolverArgs,
    trace: Option<&Path>,
) -> Result<u8, Failure> {
    let inst = load_instance(input)?;
    let cfg = solver.config()?;
    let result =
        solve(&inst, &cfg, &Profiles::identity()).map_err(|e| Failure::usage(e.to_string()))?;
    if let Some(path) = trace {
        fs::write(path, format_trace_csv(&result.trace))
            .map_err(|e| Failure::usage(format!("cannot write trace: {e}")))?;
    }
    let verdict = classify_default(&inst, &result, cfg.tol);
    let mut out = io::stdout().lock();
    let _ = write!(out, "{}", format_verdict(&inst, &verdict));
    let _ = writeln!(out, "iterations {}", result.iterations);
    let _ = writeln!(out, "converged {}", result.converged);
    Ok(verdict_code(verdict.kind))
}

fn cmd_check(input: Option<&Path>, flow: &Path, tol: f64) -> Result<u8, Failure> {
    let inst = load_instance(input)?;
    let text = fs::read_to_string(flow).map_err(|e| Failure {
        code: EXIT_DIMENSION,
        msg: format!("cannot read flow file {}: {e}", flow.display()),
    })?;
    let dump = parse_flow_dump(&inst, &text).map_err(|e| Failure {
        code: match e {
            FlowDumpError::Dimension { .. } => EXIT_DIMENSION,
            FlowDumpError::Syntax { .. } => EXIT_USAGE,
        },
        msg: format!("flow file: {e}"),
    })?;
    let c = check_feasible(&inst, &dump.flows, tol);
    println!("ok {}", c.ok);
    println!("max_capacity_violation {}", c.max_capacity_violation);
    println!(
        "max_conservation_violation {}",
        c.max_conservation_violation
    );
    println!("min_flow {}", c.min_flow);
    Ok(if c.ok { 0 } else { 1 })
}

fn cmd_generate(args: &GenerateArgs) -> Result<u8, Failure> {
    let inst = generate_random_instance(&GeneratorParams {
        vertices: args.vertices,
        arcs: args.arcs,
        commodities: args.commodities,
        capacity: (args.cap_min, args.cap_max),
        demand: (args.demand_min, args.demand_max),
        integral: args.integer,
        allow_parallel: !args.simple,
        seed: args.seed,
    })
    .map_err(|e| Failure::usage(e.to_string()))?;
    print!("{}", inst.to_text());
    Ok(0)
}

fn cmd_verify(
    input: Option<&Path>,
    random: Option<usize>,
    solver: &SolverArgs,
) -> Result<u8, Failure> {
    let cfg = solver.config()?;
    let instances: Vec<Instance> = match random {
        Some(n) => (0..n).map(|i| desk_instance(solver.seed, i)).collect(),
        None => vec![load_instance(input)?],
    };
    let mut out = io::stdout().lock();
    let _ = writeln!(
        out,
        "{:>5} {:>10} {:>10} {:>6} {:>22}",
        "index", "verdict", "oracle", "agree", "objective"
    );
    let (mut agree, mut disagree, mut undecided) = (0usize, 0usize, 0usize);
    for (i, inst) in instances.iter().enumerate() {
        let truth = oracle_feasibility(inst).map_err(|e| Failure {
            code: EXIT_ORACLE,
            msg: e.to_string(),
        })?;
        let result =
            solve(inst, &cfg, &Profiles::identity()).map_err(|e| Failure::usage(e.to_string()))?;
        let verdict = classify_default(inst, &result, cfg.tol);
        let mark = match verdict.kind {
            VerdictKind::Undecided => {
                undecided += 1;
                "-"
            }
            kind if (kind == VerdictKind::Feasible) == truth => {
                agree += 1;
                "yes"
            }
            _ => {
                disagree += 1;
                "NO"
            }
        };
        let oracle = if truth { "FEASIBLE" } else { "INFEASIBLE" };
        let _ = writeln!(
            out,
            "{i:>5} {:>10} {oracle:>10} {mark:>6} {:>22}",
            verdict.kind.as_str(),
            verdict.summary.objective
        );
    }
    let _ = writeln!(
        out,
        "agree {agree} disagree {disagree} undecided {undecided}"
    );
    Ok(if disagree == 0 { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let outcome = match &cli.command {
        Command::Solve {
            input,
            solver,
            trace,
        } => cmd_solve(input.as_deref(), solver, trace.as_deref()),
        Command::Check { input, flow, tol } => cmd_check(input.as_deref(), flow, *tol),
        Command::Generate(args) => cmd_generate(args),
        Command::Verify {
            input,
            random,
            solver,
        } => cmd_verify(input.as_deref(), *random, solver),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("mcflow: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
