use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gapsense::{
    cmd_fit, cmd_reproduce, cmd_simulate, default_out, load_config, FitKind, Overrides, Report, Result, Target,
    EXIT_INPUT,
};

#[derive(Parser)]
#[command(
    name = "gapsense",
    version,
    about = "Participation sweeps, loss fits and figure reproduction for vacuum-gap capacitors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: out/<command>).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Uniform grid spacing in nm for every gap.
    #[arg(long, global = true)]
    grid_spacing: Option<f64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configured (variant, gap) sweep.
    Simulate,
    /// Fit a measurement CSV.
    Fit {
        #[arg(long, value_enum)]
        kind: FitKind,
    },
    /// Regenerate one figure or table end to end.
    Reproduce {
        #[arg(value_enum)]
        target: Target,
    },
}

fn run(cli: Cli) -> Result<Report> {
    let overrides =
        Overrides { seed: cli.common.seed, grid_spacing_nm: cli.common.grid_spacing, threads: cli.common.threads };
    let cfg = load_config(cli.common.config.as_deref(), &overrides)?;
    let name = match &cli.command {
        Command::Simulate => "simulate".to_string(),
        Command::Fit { kind } => format!("fit_{}", kind.name()),
        Command::Reproduce { target } => target.name().to_string(),
    };
    let out = cli.common.out.unwrap_or_else(|| default_out(&name));
    match cli.command {
        Command::Simulate => cmd_simulate(&cfg, Some(&out)),
        Command::Fit { kind } => cmd_fit(&cfg, kind, Some(&out)),
        Command::Reproduce { target } => cmd_reproduce(&cfg, target, Some(&out)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(report) => {
            print!("{}", report.summary());
            if report.error_code != 0 {
                eprintln!("some sweep points failed; see failed_points in report.json");
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
