//! Entry point: `fransim <subcommand> --config <path> [overrides...]`.
//!
//! Exit codes: 0 success, 1 configuration/validation failure (including
//! unreadable config and unwritable output), 2 runtime failure.

mod config;
mod run;
mod summary;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand as ClapSubcommand};

use config::{assemble, parse_angle, parse_file_config, FileConfig, Subcommand};

#[derive(Parser)]
#[command(
    name = "fransim",
    version,
    about = "Polarization-frequency tagged interferometer bench: fringes, coincidences, CHSH, Monte Carlo"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(ClapSubcommand)]
enum Cmd {
    /// Single-detector fringe table over a common phase axis
    LocalFringe(CommonArgs),
    /// Coincidence-rate sweep with overlay curves
    CoincidenceScan(CommonArgs),
    /// Grid search plus refinement for the maximal CHSH S
    Chsh(CommonArgs),
    /// Seeded photon-pair sampling with estimator/analytic comparison
    Montecarlo(CommonArgs),
    /// Built-in invariant suite
    Selftest(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Path to a key = value config file (may be empty for defaults)
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path (default: <subcommand>.csv)
    #[arg(long)]
    output: Option<PathBuf>,
    /// Sampler seed
    #[arg(long)]
    seed: Option<u64>,
    /// Evaluation mode: paper | strict
    #[arg(long)]
    mode: Option<String>,
    /// Output format: csv | json-summary
    #[arg(long)]
    format: Option<String>,
    /// Monte Carlo trial count
    #[arg(long)]
    trials: Option<u64>,
    /// CHSH search grid step (angle literal, e.g. pi/32)
    #[arg(long)]
    grid_step: Option<String>,
}

fn subcommand_of(cmd: &Cmd) -> Subcommand {
    match cmd {
        Cmd::LocalFringe(_) => Subcommand::LocalFringe,
        Cmd::CoincidenceScan(_) => Subcommand::CoincidenceScan,
        Cmd::Chsh(_) => Subcommand::Chsh,
        Cmd::Montecarlo(_) => Subcommand::Montecarlo,
        Cmd::Selftest(_) => Subcommand::Selftest,
    }
}

fn common_of(cmd: &Cmd) -> &CommonArgs {
    match cmd {
        Cmd::LocalFringe(c)
        | Cmd::CoincidenceScan(c)
        | Cmd::Chsh(c)
        | Cmd::Montecarlo(c)
        | Cmd::Selftest(c) => c,
    }
}

/// Flags override config-file keys.
fn apply_overrides(fc: &mut FileConfig, args: &CommonArgs) -> Result<(), String> {
    if let Some(path) = &args.output {
        fc.output = Some(path.clone());
    }
    if let Some(seed) = args.seed {
        fc.seed = Some(seed);
    }
    if let Some(mode) = &args.mode {
        fc.mode = Some(mode.parse()?);
    }
    if let Some(format) = &args.format {
        fc.format = Some(format.parse()?);
    }
    if let Some(trials) = args.trials {
        fc.trials = Some(trials);
    }
    if let Some(step) = &args.grid_step {
        fc.grid_step = Some(parse_angle(step).map_err(|e| format!("--grid-step: {e}"))?);
    }
    Ok(())
}

fn drive(cli: &Cli) -> Result<(), run::RunError> {
    let sub = subcommand_of(&cli.cmd);
    let args = common_of(&cli.cmd);

    let text = std::fs::read_to_string(&args.config).map_err(|e| {
        run::RunError::Validation(format!(
            "cannot read config '{}': {e}",
            args.config.display()
        ))
    })?;
    let mut fc = parse_file_config(&text).map_err(|e| run::RunError::Validation(e.to_string()))?;
    apply_overrides(&mut fc, args).map_err(run::RunError::Validation)?;
    let run_cfg = assemble(sub, &fc).map_err(|e| run::RunError::Validation(e.to_string()))?;
    run::execute(&run_cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match drive(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
