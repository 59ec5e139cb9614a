//! `symwit`: Dicke states, witnesses and measurement schedules from the
//! command line.
//!
//! Exit codes: 0 on success, 2 for usage and input errors, 3 when a
//! numerical routine fails. Errors go to stderr as one JSON object.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "symwit", version, about = "Entanglement witnesses for symmetric multi-qubit states")]
struct Cli {
    /// Seed for every random choice; overrides `seed` in the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Flat `key = value` file of solver and evaluation settings.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Amplitudes of the Dicke state with `m` excitations.
    Dicke {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Measurement schedule of a witness.
    Compile {
        /// Catalog name or witness JSON file.
        #[arg(long)]
        witness: String,
    },
    /// Closed-form and enumerated setting counts.
    SettingsBound {
        #[arg(long)]
        n: usize,
    },
    /// Built-in decompositions of Dicke projectors (D63, D42).
    Canned {
        #[arg(long)]
        name: String,
    },
    /// Inspect and evaluate witnesses.
    #[command(subcommand)]
    Witness(WitnessCommand),
    /// Same as `witness tolerance`.
    Tolerance(ToleranceArgs),
    /// Witness coefficients with the largest noise tolerance in a span of
    /// collective powers.
    OptimizeWitness(OptimizeArgs),
    /// Maximum of an observable over PPT states.
    PptMax(BoundArgs),
    /// Seesaw maximum of an observable over biseparable pure states.
    BisepMax(BoundArgs),
    /// Noise tolerance of the moment witness as a function of q (CSV).
    QScan {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0.0)]
        q_min: f64,
        #[arg(long, default_value_t = 4.0)]
        q_max: f64,
        #[arg(long, default_value_t = 0.1)]
        q_step: f64,
    },
    /// Fidelity and its witness bound along a noise path (CSV).
    FidelityCurve {
        #[arg(long)]
        witness: String,
        #[arg(long, default_value = "white")]
        noise: String,
        /// Number of evenly spaced noise fractions on [0, 1].
        #[arg(long, default_value_t = 101)]
        grid: usize,
    },
    /// Sample counts for a witness schedule (NDJSON).
    Simulate {
        #[arg(long)]
        witness: String,
        #[arg(long, default_value = "white")]
        noise: String,
        /// Noise fraction mixed into the target state.
        #[arg(long, default_value_t = 0.0)]
        p: f64,
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
    },
    /// Witness value, bootstrap error and fidelity bound from counts.
    EvalCounts {
        #[arg(long)]
        witness: String,
        /// NDJSON counts file.
        #[arg(long)]
        data: PathBuf,
        /// Per-qubit outcome relabeling, e.g. `++-+`; overrides the config.
        #[arg(long, allow_hyphen_values = true)]
        sign_map: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
enum WitnessCommand {
    /// Formula, coefficients and constants of a witness.
    Show {
        witness: String,
    },
    /// Expectation value on the target mixed with noise.
    Eval {
        witness: String,
        #[arg(long, default_value = "white")]
        noise: String,
        #[arg(long, default_value_t = 0.0)]
        p: f64,
    },
    /// Largest noise fraction the witness still detects.
    Tolerance(ToleranceArgs),
}

#[derive(Debug, Args)]
struct ToleranceArgs {
    /// Catalog name or witness JSON file.
    #[arg(long)]
    witness: String,
    /// `white` or `nw`.
    #[arg(long, default_value = "white")]
    noise: String,
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    /// Axes of the collective powers, e.g. `xy` or `xyz`.
    #[arg(long, default_value = "xyz")]
    axes: String,
    #[arg(long, default_value = "white")]
    noise: String,
    /// Include odd powers.
    #[arg(long)]
    odd_powers: bool,
    #[arg(long, default_value = "optimized")]
    name: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ObservableKind {
    /// `J_x² + J_y² − q (J_z − ⟨J_z⟩)²` with `⟨J_z⟩` of the Dicke state.
    Moment,
    /// Projector onto the Dicke state.
    Projector,
}

#[derive(Debug, Args)]
struct BoundArgs {
    #[arg(long, value_enum, default_value_t = ObservableKind::Moment)]
    observable: ObservableKind,
    #[arg(long)]
    n: usize,
    /// Excitations of the reference Dicke state; defaults to `n/2`.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    q: f64,
    /// Qubits on one side of the cut, e.g. `0,1`; all cuts when absent.
    #[arg(long, value_delimiter = ',')]
    side: Option<Vec<usize>>,
}

/// Bad input detected by the CLI itself.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn report(kind: &str, message: &str) {
    let body = serde_json::json!({ "error": kind, "message": message });
    eprintln!("{body}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            report("usage", e.to_string().trim());
            return ExitCode::from(2);
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let numerical = e.downcast_ref::<symwit::Error>().is_some_and(|e| e.is_numerical());
            let kind = if numerical {
                "numerical"
            } else if e.downcast_ref::<UsageError>().is_some() {
                "usage"
            } else {
                "input"
            };
            report(kind, &format!("{e:#}"));
            ExitCode::from(if numerical { 3 } else { 2 })
        }
    }
}
