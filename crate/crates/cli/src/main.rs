mod commands;
mod config;
mod projector;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use commands::Init;
use config::{CommonArgs, RunConfig};

/// Symmetry projectors for qubit-mapped fermionic states.
#[derive(Parser)]
#[command(name = "symproj", version)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Apply a projector to a state and report success probability and fidelity
    Project {
        #[arg(long, value_enum, default_value = "random")]
        init: Init,
        /// Pauli-sum text file for a user operator (GQSVT only)
        #[arg(long)]
        operator: Option<PathBuf>,
        /// Distinct eigenvalues of --operator
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        spectrum: Option<Vec<f64>>,
    },
    /// Fidelity against quadrature node count (N_beta for s_ms, N_phi otherwise)
    ScanNodes {
        #[arg(long, value_enum, default_value = "parity")]
        init: Init,
        #[arg(long)]
        max: Option<usize>,
        #[arg(long, default_value_t = 3)]
        states: usize,
        /// Also write a gnuplot script next to --out
        #[arg(long)]
        plot: bool,
    },
    /// Fidelity against rotation precision for each rounding scope
    ScanPrecision {
        #[arg(long, value_enum, default_value = "half-filled")]
        init: Init,
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        #[arg(long, default_value_t = 10)]
        states: usize,
        #[arg(long)]
        plot: bool,
    },
    /// Gate counts over a list of register sizes, with power-log fits
    Resources {
        #[arg(long)]
        plot: bool,
    },
    /// Projector cost estimates for FeMoco active spaces
    Femoco {
        #[arg(long)]
        orbitals: Option<usize>,
        #[arg(long)]
        electrons: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        spin: Option<f64>,
    },
    /// Amplitude amplification of the number projector against the closed form
    AaDemo {
        #[arg(long)]
        rounds: Option<usize>,
    },
    /// Phase sequences
    Phases {
        #[command(subcommand)]
        cmd: PhasesCmd,
    },
}

#[derive(Subcommand)]
enum PhasesCmd {
    /// Write the phase sequence for the configured projector as JSON
    Export,
}

fn run(cli: Cli) -> Result<bool> {
    let cfg = RunConfig::resolve(&cli.common)?;
    if let Some(j) = cfg.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global()?;
    }
    match cli.cmd {
        Cmd::Project { init, operator, spectrum } => commands::project(&cfg, init, operator.as_deref(), spectrum.as_deref()),
        Cmd::ScanNodes { init, max, states, plot } => commands::scan_nodes(&cfg, init, max, states, plot),
        Cmd::ScanPrecision { init, eps, states, plot } => commands::scan_precision(&cfg, init, eps.as_deref(), states, plot),
        Cmd::Resources { plot } => commands::resources(&cfg, plot),
        Cmd::Femoco { orbitals, electrons, spin } => commands::femoco(&cfg, orbitals, electrons, spin),
        Cmd::AaDemo { rounds } => commands::aa_demo(&cfg, rounds),
        Cmd::Phases { cmd: PhasesCmd::Export } => commands::phases_export(&cfg),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
