//! `ggqd`: geometric global quantum discord of two-qubit states.
//!
//! Exit codes: 0 success, 2 validation failure, 3 parse failure,
//! 4 unwritable output, 5 oracle disagreement.

mod commands;
mod format;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "ggqd",
    version,
    about = "Geometric global quantum discord of two-qubit states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Solver overrides, mapped 1:1 onto `SolverConfig`.
#[derive(Debug, Clone, Args)]
struct SolverFlags {
    /// Angular step of the fast b-grid (radians).
    #[arg(long, value_name = "RAD")]
    b_grid_step: Option<f64>,
    /// Angular step of the 4-angle oracle grid (radians).
    #[arg(long, value_name = "RAD")]
    oracle_step: Option<f64>,
    /// Simplex stopping tolerance on the objective.
    #[arg(long, value_name = "TOL")]
    refine_tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the discord of a state file.
    Compute {
        input: PathBuf,
        /// fast, oracle, xstate or both.
        #[arg(long, default_value = "fast")]
        method: String,
        /// Accept matrices with negative eigenvalues.
        #[arg(long)]
        allow_nonphysical: bool,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Sweep one parameter of a state family and write a CSV table.
    Sweep {
        #[arg(long)]
        family: String,
        /// Name of the swept parameter, e.g. C3 or p.
        #[arg(long)]
        param: String,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        step: f64,
        /// Fixed parameters of the family.
        #[arg(long = "set", value_name = "NAME=VALUE")]
        fixed: Vec<String>,
        #[arg(long, default_value = "fast")]
        method: String,
        #[arg(long)]
        allow_nonphysical: bool,
        #[arg(long, env = "GGQD_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        output: PathBuf,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Report how far a state file is from a physical density matrix.
    Validate {
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Compare the fast solver with the brute-force oracle.
    Oracle {
        input: PathBuf,
        #[arg(long)]
        allow_nonphysical: bool,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Write a state file for a named family.
    Gen {
        #[arg(long)]
        family: String,
        #[arg(long = "set", value_name = "NAME=VALUE")]
        params: Vec<String>,
        #[arg(long, env = "GGQD_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        output: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compute {
            input,
            method,
            allow_nonphysical,
            json,
            solver,
        } => commands::compute(&input, &method, allow_nonphysical, json, &solver.into()),
        Command::Sweep {
            family,
            param,
            from,
            to,
            step,
            fixed,
            method,
            allow_nonphysical,
            seed,
            output,
            solver,
        } => commands::sweep(
            &commands::SweepSpec {
                family,
                param_name: param,
                from,
                to,
                step,
                fixed,
                method,
                seed,
                allow_nonphysical,
                output_path: output,
            },
            &solver.into(),
        ),
        Command::Validate { input, json } => commands::validate(&input, json),
        Command::Oracle {
            input,
            allow_nonphysical,
            json,
            solver,
        } => commands::oracle(&input, allow_nonphysical, json, &solver.into()),
        Command::Gen {
            family,
            params,
            seed,
            output,
        } => commands::gen(&family, &params, seed, &output),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

impl From<SolverFlags> for commands::ConfigOverrides {
    fn from(f: SolverFlags) -> Self {
        Self {
            b_grid_step: f.b_grid_step,
            oracle_step: f.oracle_step,
            refine_tol: f.refine_tol,
        }
    }
}
