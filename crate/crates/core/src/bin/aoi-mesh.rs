use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use aoi_mesh::experiment::{compare, parse_spec, run, ExperimentSpec, Mode, SpecError};

const EXIT_PARSE: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_IO: u8 = 4;

/// Age-of-information simulation and analysis for random-access networks.
#[derive(Parser)]
#[command(name = "aoi-mesh", version = env!("AOI_GIT_DESCRIBE"))]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo simulation.
    Simulate(RunArgs),
    /// Per-topology mean-field fixed point.
    Meanfield(RunArgs),
    /// Distribution-level fixed point and network AoI.
    Analyze(RunArgs),
    /// All three methods side by side.
    Sweep(RunArgs),
    /// Compare a column of one result file with a column of another.
    Compare(CompareArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment file.
    #[arg(long)]
    spec: PathBuf,
    /// Overrides the seed in the experiment file.
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV; defaults to the file's `output_path`, else stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, default_value = "sim_aoi")]
    column_a: String,
    /// Defaults to `column_a`.
    #[arg(long)]
    column_b: Option<String>,
    /// Largest acceptable relative gap.
    #[arg(long, default_value_t = 0.10)]
    tolerance: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate(a) => run_mode(Mode::Simulate, a),
        Command::Meanfield(a) => run_mode(Mode::Meanfield, a),
        Command::Analyze(a) => run_mode(Mode::Analyze, a),
        Command::Sweep(a) => run_mode(Mode::Sweep, a),
        Command::Compare(a) => run_compare(a),
    }
}

fn load(mode: Mode, args: &RunArgs) -> Result<ExperimentSpec, ExitCode> {
    let mut spec = match parse_spec(&args.spec) {
        Ok(s) => s,
        Err(e @ SpecError::Io { .. }) => {
            eprintln!("error: {e}");
            return Err(ExitCode::from(EXIT_IO));
        }
        Err(e) => {
            eprintln!("error: {}: {e}", args.spec.display());
            return Err(ExitCode::from(EXIT_PARSE));
        }
    };
    if mode == Mode::Sweep && spec.sweep.is_none() {
        eprintln!("error: {}: sweep needs sweep_axis and sweep_values", args.spec.display());
        return Err(ExitCode::from(EXIT_PARSE));
    }
    spec.mode = mode;
    if let Some(seed) = args.seed {
        spec.base = spec.base.with(|c| c.seed = seed).expect("seed has no range");
    }
    if let Some(out) = &args.out {
        spec.output_path = Some(out.clone());
    }
    Ok(spec)
}

fn run_mode(mode: Mode, args: RunArgs) -> ExitCode {
    let spec = match load(mode, &args) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let out = run(&spec);
    let written = match &spec.output_path {
        Some(p) => fs::write(p, &out.csv),
        None => io::stdout().write_all(out.csv.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: writing output: {e}");
        return ExitCode::from(EXIT_IO);
    }
    for r in &out.rows {
        if !r.flags.is_empty() {
            let at = r.swept_value.map(|v| format!(" at {v}")).unwrap_or_default();
            eprintln!("warning: row{at}: {}", r.flags.join(";"));
        }
    }
    if out.all_failed() {
        eprintln!("error: every row failed");
        return ExitCode::from(EXIT_SOLVER);
    }
    ExitCode::SUCCESS
}

fn run_compare(args: CompareArgs) -> ExitCode {
    let read = |p: &PathBuf| {
        fs::read_to_string(p).map_err(|e| {
            eprintln!("error: cannot read {}: {e}", p.display());
            ExitCode::from(EXIT_IO)
        })
    };
    let (a, b) = match (read(&args.a), read(&args.b)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(c), _) | (_, Err(c)) => return c,
    };
    let column_b = args.column_b.as_deref().unwrap_or(&args.column_a);
    match compare(&a, &b, &args.column_a, column_b, args.tolerance) {
        Ok(rep) => {
            print!("{}", rep.render());
            if rep.within_tolerance() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_PARSE)
        }
    }
}
