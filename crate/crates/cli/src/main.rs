//! Command-line front end.
//!
//! Exit status: 0 when every check is within tolerance, 1 when a check
//! fails, 2 for config or argument errors, 3 for constraint violations and 4
//! for numerical failures.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dirac_atm::nonrel::LimitFamily;
use dirac_atm::{PotentialSpec, RunConfig};

use commands::{Failure, Outcome, Run};

#[derive(Parser)]
#[command(
    name = "dirac-atm",
    version,
    about = "Bound states of the 1D Dirac equation with a scalar potential"
)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for output files (overrides the config).
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    residual_tol: Option<f64>,
    #[arg(long, global = true)]
    cross_check_tol: Option<f64>,
    #[arg(long, global = true)]
    reference_tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct StateArgs {
    /// Potential shorthand, e.g. `quadratic:b=0.5` or `square:half_width=2,height=6`.
    #[arg(long)]
    potential: Option<String>,
    /// Quantum number; repeat for several.
    #[arg(long = "n")]
    n: Vec<usize>,
    /// Energy window in units of the rest energy.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    window: Option<Vec<f64>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Harmonic,
    Linear,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the quantization condition and cross-check against shooting.
    Eigen(StateArgs),
    /// Evaluate the quantization integral on shooting eigenstates.
    Verify(StateArgs),
    /// Linear-well table: transcendental roots, integral roots and reference values.
    Table1 {
        #[arg(long, default_values_t = [1.0, 2.0])]
        alpha: Vec<f64>,
        #[arg(long, default_value_t = 5)]
        levels: usize,
    },
    /// Quantization integral of the linear well against nu.
    Fig2 {
        #[arg(long, default_values_t = [1.0, 2.0])]
        alpha: Vec<f64>,
    },
    /// Dirac against Schrödinger levels along shrinking level spacing.
    Limits {
        #[arg(long, value_enum, default_values_t = [Family::Harmonic, Family::Linear])]
        family: Vec<Family>,
        #[arg(long = "n", default_value_t = 0)]
        n: usize,
    },
    /// Bound-state property suite.
    Props(StateArgs),
}

fn configure(cli: &Cli) -> Result<Run, Failure> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    if let Command::Eigen(a) | Command::Verify(a) | Command::Props(a) = &cli.command {
        if let Some(text) = &a.potential {
            config.potential = Some(PotentialSpec::parse_shorthand(text)?);
            // shorthand mesh paths are relative to the working directory
            config.base_dir = None;
        }
        if !a.n.is_empty() {
            config.run.levels = a.n.clone();
        }
        if let Some(w) = &a.window {
            config.run.window = Some([w[0], w[1]]);
        }
    }
    let t = &mut config.tolerances;
    t.residual = cli.residual_tol.unwrap_or(t.residual);
    t.cross_check = cli.cross_check_tol.unwrap_or(t.cross_check);
    t.reference = cli.reference_tol.unwrap_or(t.reference);
    if let Some(dir) = &cli.output_dir {
        config.run.output_dir = dir.clone();
    }
    config.validate()?;
    let output_dir = match (&config.base_dir, cli.output_dir.is_some()) {
        (Some(base), false) if config.run.output_dir.is_relative() => {
            base.join(&config.run.output_dir)
        }
        _ => config.run.output_dir.clone(),
    };
    Ok(Run { config, output_dir })
}

fn execute(cli: &Cli, run: &Run) -> Outcome {
    match &cli.command {
        Command::Eigen(_) => commands::eigen(run),
        Command::Verify(_) => commands::verify(run),
        Command::Table1 { alpha, levels } => commands::table1(run, alpha, *levels),
        Command::Fig2 { alpha } => commands::fig2(run, alpha),
        Command::Limits { family, n } => {
            let families: Vec<LimitFamily> = family
                .iter()
                .map(|f| match f {
                    Family::Harmonic => LimitFamily::Harmonic,
                    Family::Linear => LimitFamily::Linear,
                })
                .collect();
            commands::limits(run, &families, *n)
        }
        Command::Props(_) => commands::props(run),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure(&cli).and_then(|run| execute(&cli, &run));
    match result {
        Ok(checks) => {
            let failed = checks.iter().filter(|c| !c.passed).count();
            for c in &checks {
                let verdict = if c.passed { "ok  " } else { "FAIL" };
                println!("{verdict} {}: {}", c.name, c.detail);
            }
            if failed == 0 {
                println!("all {} checks passed", checks.len());
                ExitCode::SUCCESS
            } else {
                println!("{failed} of {} checks failed", checks.len());
                ExitCode::from(1)
            }
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
