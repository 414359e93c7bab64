//! `hamlower`: compile circuits and lower Hamiltonians to 2-local lattice form.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use hamlower_core::Error;

#[derive(Parser, Debug)]
#[command(name = "hamlower", version, about = "Hamiltonian lowering compiler")]
struct Cli {
    #[command(flatten)]
    opts: Options,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand. All of them are echoed into the report.
#[derive(Args, Debug, Clone, Serialize)]
pub struct Options {
    /// Fixed Δ for the first serial round.
    #[arg(long, global = true, conflicts_with = "epsilon")]
    pub delta: Option<f64>,
    /// Growth of Δ from one serial round to the next when Δ is fixed.
    #[arg(long, global = true)]
    pub delta_growth: Option<f64>,
    /// Target ε; Δ then follows the Δ-choice formula.
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// The constant C₂ of the Δ-choice formula.
    #[arg(long, global = true, default_value_t = std::f64::consts::SQRT_2)]
    pub c2: f64,
    /// Δ for 3-to-2 rounds in ε mode.
    #[arg(long, global = true, default_value_t = 1e6)]
    pub three_to_two_delta: f64,
    /// Numerical tolerance for degeneracy and energy comparisons.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Largest number of qubits handed to dense linear algebra.
    #[arg(long, global = true, default_value_t = 12)]
    pub dense_cap: usize,
    /// Real-axis samples for the self-energy sup.
    #[arg(long, global = true, default_value_t = 16)]
    pub z_samples: usize,
    /// Routing refinements for `embed`; bisection steps past the grid for `scan-gap`.
    #[arg(long, global = true)]
    pub grid_refinements: Option<usize>,
    /// Seed for randomized instances.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Circuit JSON to the 5-local clock Hamiltonian and its layout.
    Compile {
        circuit: PathBuf,
    },
    /// k-local Hamiltonian to a 2-local one through gadget rounds.
    Gadgetize {
        hamiltonian: PathBuf,
    },
    /// Remove crossings and high degrees from a drawn 2-local Hamiltonian.
    Planarize {
        hamiltonian: PathBuf,
        /// Drawing: a JSON list of `{"x": .., "y": ..}`, one per qubit.
        #[arg(long)]
        coords: PathBuf,
    },
    /// Route a planar degree-3 drawing onto the square lattice and subdivide to unit couplings.
    Embed {
        hamiltonian: PathBuf,
        #[arg(long)]
        coords: PathBuf,
    },
    /// Certify every round of a plan, or seeded random instances, against the bound checkers.
    Verify {
        plan: Option<PathBuf>,
        /// Number of random subdivision instances to check instead of a plan.
        #[arg(long)]
        random: Option<usize>,
    },
    /// Spectral gap along a polynomial path.
    ScanGap {
        path: PathBuf,
        /// Uniform grid size.
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// Re-run a plan file and report the hash of the result.
    Replay {
        plan: PathBuf,
    },
}

/// Exit status for an error, by the kind of failure.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::DenseDimensionExceeded { .. } | Error::RoutingFailed { .. } | Error::NoConvergence { .. } => 4,
        _ => 3,
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("HAMLOWER_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        // A second initialization only happens in tests; ignoring it is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    configure_threads();
    let result = match &cli.command {
        Command::Compile { circuit } => commands::compile(&cli.opts, circuit),
        Command::Gadgetize { hamiltonian } => commands::gadgetize(&cli.opts, hamiltonian),
        Command::Planarize { hamiltonian, coords } => commands::planarize(&cli.opts, hamiltonian, coords),
        Command::Embed { hamiltonian, coords } => commands::embed(&cli.opts, hamiltonian, coords),
        Command::Verify { plan, random } => commands::verify(&cli.opts, plan.as_deref(), *random),
        Command::ScanGap { path, points } => commands::scan_gap(&cli.opts, path, *points),
        Command::Replay { plan } => commands::replay(&cli.opts, plan),
    };
    match result {
        Ok(commands::Outcome::Pass) => ExitCode::SUCCESS,
        Ok(commands::Outcome::BoundFailure) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error [{}]: {e}", e.module());
            ExitCode::from(exit_code(&e))
        }
    }
}
