use boxmom::cli::{run, ExperimentKind, RunOptions};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Momentum spectra, Robin-boundary time evolution and uncertainty
/// diagnostics for a particle confined to a bounded region.
#[derive(Parser)]
#[command(name = "boxmom", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Strict JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for artifacts (created if missing).
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the seed declared in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for parallelizable stages.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Momentum ladders of line sections (k_n = πn/L + θ).
    Spectrum(CommonArgs),
    /// Sampled eigenmode tables on a line section.
    Modes(CommonArgs),
    /// Crank–Nicolson time evolution with Robin boundary conditions.
    Evolve(CommonArgs),
    /// Evolution plus Ehrenfest residuals and the boundary force.
    Ehrenfest(CommonArgs),
    /// The measurable uncertainty inequality on random smooth states.
    Uncertainty(CommonArgs),
    /// Simultaneous-measurability verdict and joint-mode residuals.
    Commute(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Spectrum(a) => (ExperimentKind::Spectrum, a),
        Command::Modes(a) => (ExperimentKind::Modes, a),
        Command::Evolve(a) => (ExperimentKind::Evolve, a),
        Command::Ehrenfest(a) => (ExperimentKind::Ehrenfest, a),
        Command::Uncertainty(a) => (ExperimentKind::Uncertainty, a),
        Command::Commute(a) => (ExperimentKind::Commute, a),
    };
    if args.threads == 0 {
        eprintln!("error: --threads must be at least 1");
        return ExitCode::from(2);
    }
    let opts = RunOptions {
        out_dir: args.out,
        seed: args.seed,
        threads: args.threads,
    };
    match run(kind, &args.config, &opts) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
