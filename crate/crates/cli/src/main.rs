use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use esdlab_core::config::{OutputFormat, RunConfig};
use esdlab_core::dynamics::Trajectory;
use esdlab_core::report::{execute, matrix_json, Command};
use esdlab_core::{Error, Family, FlipOp};

#[derive(Parser)]
#[command(
    name = "esdlab",
    version,
    about = "Entanglement sudden death under amplitude damping with local flips"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Negativity along p' for one flip point
    Evolve(Opts),
    /// Death point in p' with solver details
    Boundary(Opts),
    /// Avoid / delay / hasten verdicts across p_n, with regime edges as footer
    Scan(Opts),
    /// Outcome pattern of the nine qubit-qutrit flips for both qubit-qutrit families
    Table1(Opts),
    /// Negativity over the (p, p') unit square
    Surface(Opts),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Opts {
    /// state-i, state-ii or two-qutrit
    #[arg(long)]
    family: Option<Family>,
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    ratio_a: Option<f64>,
    #[arg(long)]
    ratio_b: Option<f64>,
    /// I, X, F01, F02, F102 or F201
    #[arg(long)]
    op_a: Option<FlipOp>,
    #[arg(long)]
    op_b: Option<FlipOp>,
    /// Damping applied before the flip
    #[arg(long)]
    pn: Option<f64>,
    #[arg(long)]
    pn_step: Option<f64>,
    #[arg(long)]
    pprime_step: Option<f64>,
    /// Bisection width for regime edges
    #[arg(long)]
    tol: Option<f64>,
    /// Negativity threshold treated as zero
    #[arg(long)]
    zero_tol: Option<f64>,
    /// Points per axis for `surface`
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// Start from a JSON config file; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the effective config as JSON and continue
    #[arg(long)]
    write_config: Option<PathBuf>,
    /// Dump the post-flip density matrix as JSON [re, im] pairs
    #[arg(long)]
    dump_state: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Numeric(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numeric() {
            Failure::Numeric(e.to_string())
        } else {
            Failure::Config(e.to_string())
        }
    }
}

fn build_config(o: &Opts) -> Result<RunConfig, Failure> {
    let mut cfg = match &o.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                Failure::Config(format!("config: cannot read {}: {e}", path.display()))
            })?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::for_family(o.family.unwrap_or(Family::StateI)),
    };
    if let Some(f) = o.family {
        if f != cfg.family {
            let fresh = RunConfig::for_family(f);
            cfg.family = f;
            cfg.x = fresh.x;
            cfg.ratio_a = fresh.ratio_a;
            cfg.ratio_b = fresh.ratio_b;
        }
    }
    macro_rules! set {
        ($($field:ident <- $opt:ident),*) => { $(if let Some(v) = o.$opt { cfg.$field = v; })* };
    }
    set!(x <- x, ratio_a <- ratio_a, ratio_b <- ratio_b, op_a <- op_a, op_b <- op_b,
         p_n <- pn, pn_step <- pn_step, pprime_step <- pprime_step, tol <- tol,
         zero_tol <- zero_tol, grid <- grid, workers <- workers);
    if let Some(f) = o.format {
        cfg.format = match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        };
    }
    if let Some(out) = &o.out {
        cfg.out = Some(out.display().to_string());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(command: Command, o: &Opts) -> Result<(), Failure> {
    let cfg = build_config(o)?;
    if let Some(path) = &o.write_config {
        fs::write(path, cfg.to_json() + "\n")
            .map_err(|e| Failure::Other(format!("{}: {e}", path.display())))?;
    }
    if let Some(path) = &o.dump_state {
        let rho = Trajectory::prepare(&cfg.schedule()?)?.state_at(0.0)?;
        let text = serde_json::to_string(&matrix_json(rho.matrix())).expect("json serializes");
        fs::write(path, text + "\n")
            .map_err(|e| Failure::Other(format!("{}: {e}", path.display())))?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Failure::Other(e.to_string()))?;
    let table = pool.install(|| execute(command, &cfg))?;
    let text = table.render(command, &cfg);
    match &cfg.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Other(format!("{path}: {e}")))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, opts) = match &cli.command {
        Cmd::Evolve(o) => (Command::Evolve, o),
        Cmd::Boundary(o) => (Command::Boundary, o),
        Cmd::Scan(o) => (Command::Scan, o),
        Cmd::Table1(o) => (Command::Table1, o),
        Cmd::Surface(o) => (Command::Surface, o),
    };
    match run(command, opts) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("esdlab: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(m)) => {
            eprintln!("esdlab: numeric failure: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Other(m)) => {
            eprintln!("esdlab: {m}");
            ExitCode::from(1)
        }
    }
}
