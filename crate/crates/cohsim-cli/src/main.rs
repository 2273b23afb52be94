//! `cohsim` - stage-resolved coherence profiles for quantum communication
//! circuits.
//!
//! Exit codes: 0 success, 1 diagnostics (parse or parameter problems),
//! 2 simulation errors.

mod commands;
mod input_spec;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "cohsim",
    about = "Stage-resolved relative-entropy-of-coherence simulator",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a .qc circuit file and emit its coherence profile.
    Run(RunArgs),
    /// Generate a built-in protocol circuit, optionally running it.
    Protocol(ProtocolArgs),
    /// Sweep a parameter and emit one CSV row per value.
    Sweep(SweepArgs),
    /// Run a verification suite and print per-check PASS/FAIL lines.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to the .qc circuit file.
    circuit: std::path::PathBuf,
    /// Per-qubit initializer: `zero`, `one`, `plus`, or `bloch(theta,gamma)`.
    /// A single token broadcasts to every qubit; otherwise give a
    /// comma-separated list matching the qubit count.
    #[arg(long, default_value = "zero")]
    input: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output path; stdout when omitted.
    #[arg(long)]
    output: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct ProtocolArgs {
    /// One of: teleport, superdense, swap, repeater, w, ghz.
    name: String,
    /// Gadget count (teleport) or state size (w, ghz).
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Message angle theta in radians (teleport).
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    /// Message angle gamma in radians (teleport).
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    /// Werner resource parameter in [0, 1] (teleport).
    #[arg(long, default_value_t = 1.0)]
    werner: f64,
    /// Classical bit pair for superdense coding, e.g. `10`.
    #[arg(long, default_value = "00")]
    bits: String,
    /// Number of elementary links (repeater).
    #[arg(long, default_value_t = 2)]
    links: usize,
    /// Swap order for the repeater.
    #[arg(long, value_enum, default_value_t = Mode::Sequential)]
    mode: Mode,
    /// Parallel window width `s` (repeater, parallel mode).
    #[arg(long, default_value_t = 1)]
    parallel_swaps: usize,
    /// Write the generated circuit to this .qc file.
    #[arg(long)]
    emit: Option<std::path::PathBuf>,
    /// Simulate the circuit and emit the coherence profile.
    #[arg(long)]
    run: bool,
    /// Print the coherence of the prepared state (w, ghz).
    #[arg(long)]
    emit_coherence: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Profile output path; stdout when omitted.
    #[arg(long)]
    output: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// One of: angle, size, werner, schedule.
    kind: String,
    /// Range start (angle sweeps; radians of phi).
    #[arg(long)]
    start: Option<f64>,
    /// Range stop, inclusive.
    #[arg(long)]
    stop: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    steps: Option<usize>,
    /// Explicit comma-separated values (size, werner, schedule sweeps).
    #[arg(long)]
    values: Option<String>,
    /// Gadget count for angle/werner sweeps.
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long)]
    output: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// One of: all, additivity, scaling, branching, budget, holevo, monotone.
    #[arg(default_value = "all")]
    suite: String,
    /// Seed for the randomized suites; defaults to COHSIM_SEED or 7.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Sequential,
    Parallel,
}

/// Failure classes mapped to exit codes.
enum Failure {
    /// Bad input from the user: parse diagnostics, unknown names, bad specs.
    Diagnostics(String),
    /// The simulation itself failed.
    Simulation(String),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Diagnostics(_) => 1,
            Failure::Simulation(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Diagnostics(m) | Failure::Simulation(m) => m,
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests are successes; everything else is a
            // usage diagnostic.
            let _ = err.print();
            let code = if err.use_stderr() { 1 } else { 0 };
            std::process::exit(code);
        }
    };
    let result = match cli.command {
        Command::Run(args) => commands::run(&args),
        Command::Protocol(args) => commands::protocol(&args),
        Command::Sweep(args) => commands::sweep(&args),
        Command::Verify(args) => commands::verify(&args),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            std::process::exit(failure.exit_code());
        }
    }
}

/// Default seed: --seed flag, then COHSIM_SEED, then 7.
fn resolve_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var("COHSIM_SEED")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(7)
}
