mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::CommonArgs;

/// Loewner energy of Jordan curves: energy reports, frame verification,
/// convergence tables and closed-form constant audits.
#[derive(Parser)]
#[command(name = "loewner", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the energy report of a curve (all formula routes + residuals)
    Energy(CommonArgs),
    /// Run the frame-identity verification suite on a curve
    Frames(CommonArgs),
    /// Convergence table over the shrink family and quadrature resolution
    Convergence(CommonArgs),
    /// Check every closed-form constant against its computed value
    Audit(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Energy(args) => commands::cmd_energy(&args),
        Command::Frames(args) => commands::cmd_frames(&args),
        Command::Convergence(args) => commands::cmd_convergence(&args),
        Command::Audit(args) => commands::cmd_audit(&args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err
                .downcast_ref::<loewner::Error>()
                .map(|e| e.exit_code() as u8)
                .unwrap_or(2);
            ExitCode::from(code)
        }
    }
}
