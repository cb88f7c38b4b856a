use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use ftbqc::brickwork::BrickworkError;
use ftbqc::compiler::CompileError;
use ftbqc::ledger::LedgerError;
use ftbqc::protocol::ProtocolError;

mod commands;
mod source;
mod verify;

/// Blind quantum computation workbench: compile circuits to brickwork
/// layouts, run the client/server protocols, and account for their cost.
///
/// Circuits are text files or built-ins: qcla:<bits>, toffoli. Layouts are
/// JSON documents written by `compile`, or identity:<rows>x<layers>.
///
/// Exit status: 0 success, 2 bad input or configuration, 3 protocol abort,
/// 4 uncorrectable channel error, 5 check mismatch, 1 anything else.
#[derive(Parser)]
#[command(name = "ftbqc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a circuit to a brickwork layout and gate tallies.
    Compile(CompileArgs),
    /// Run a protocol on a circuit or layout.
    Run(RunArgs),
    /// Print resource reports and the three ratio tables.
    Estimate(EstimateArgs),
    /// Run one of the built-in property suites with fixed seeds.
    Verify(VerifyArgs),
}

#[derive(Args)]
pub struct CompileArgs {
    /// Circuit file or built-in name.
    pub circuit: String,
    /// Directory for the layout and tally files.
    #[arg(long, env = "FTBQC_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProtocolArg {
    /// Unencoded brickwork protocol.
    Bfk,
    /// Client prepares encoded qubits.
    Protocol1,
    /// Server prepares all eight candidates, client selects.
    Bsa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Exact,
    Tally,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BufferArg {
    EightQubit,
    MeasureAndDiscard,
}

#[derive(Args)]
pub struct RunArgs {
    /// Circuit file, layout JSON, or built-in name.
    pub source: String,
    /// Seed for every random draw; required here or in the config file.
    #[arg(long)]
    pub seed: Option<u64>,
    /// TOML file with seed, protocol, backend, buffer_mode and a [channel] table.
    /// Command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Protocol to run [default: bfk].
    #[arg(long, value_enum)]
    pub protocol: Option<ProtocolArg>,
    /// `exact` simulates amplitudes (small layouts only); `tally` only counts [default: exact].
    #[arg(long, value_enum)]
    pub backend: Option<BackendArg>,
    /// Client buffer policy for the BSA protocol.
    #[arg(long, value_enum)]
    pub buffer_mode: Option<BufferArg>,
    /// Depolarizing probability per transmitted physical qubit.
    #[arg(long)]
    pub depolarizing: Option<f64>,
    /// Drop probability per classical message.
    #[arg(long)]
    pub classical_loss: Option<f64>,
    /// Resends of a dropped message before the run aborts.
    #[arg(long)]
    pub max_retransmits: Option<u32>,
    /// Also push this many qubits through the physical Steane pipeline
    /// (exact backend, encoded protocols).
    #[arg(long)]
    pub physical_checks: Option<usize>,
    /// Pad the layout with identity layers to ROWSxLAYERS.
    #[arg(long)]
    pub census: Option<String>,
    /// Input state for the exact backend: plus, zero, random, or basis:<index>.
    #[arg(long, default_value = "plus")]
    pub input: String,
    /// Directory for transcript and ledger files.
    #[arg(long, env = "FTBQC_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Text,
    Csv,
    Json,
}

#[derive(Args)]
pub struct EstimateArgs {
    /// Circuit file, layout JSON, or built-in name.
    pub source: String,
    /// Use this ROWSxLAYERS census instead of the compiled one.
    #[arg(long)]
    pub census: Option<String>,
    /// Diff every total and table cell against the embedded reference values.
    #[arg(long)]
    pub paper_check: bool,
    /// Output format for the reports and tables.
    #[arg(long, value_enum, default_value = "text")]
    pub format: FormatArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Simcore,
    Steane,
    Brickwork,
    Equivalence,
    Blindness,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Which suite to run.
    #[arg(value_enum)]
    pub suite: Suite,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Brickwork(#[from] BrickworkError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0} check(s) failed")]
    Mismatch(usize),
    #[error("uncorrectable channel error")]
    Uncorrectable,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Compile(_) | CliError::Brickwork(_) | CliError::Ledger(_) => 2,
            CliError::Protocol(ProtocolError::Aborted { .. }) => 3,
            CliError::Protocol(ProtocolError::Invariant(_) | ProtocolError::Leak(_)) => 1,
            CliError::Protocol(_) => 2,
            CliError::Io { .. } => 1,
            CliError::Uncorrectable => 4,
            CliError::Mismatch(_) => 5,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compile(a) => commands::compile(a),
        Command::Run(a) => commands::run(a),
        Command::Estimate(a) => commands::estimate(a),
        Command::Verify(a) => verify::run(a.suite),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
