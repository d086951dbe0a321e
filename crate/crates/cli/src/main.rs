mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nonlocal_core::laplace::ContourParams;

use config::GridSection;
use run::{run_invert, run_solve, run_verify, CliError, Options};

/// Solve linear nonlocal equations f(d/dt) phi = J on t >= 0.
#[derive(Parser)]
#[command(name = "nonlocal", version)]
struct Cli {
    /// Only print errors.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Directory for the output files.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configured problem; writes a CSV and a JSON report.
    Solve(RunArgs),
    /// Apply f(d/dt) to a closed-form solution and report the residual.
    Verify(RunArgs),
    /// Invert a Laplace transform given as an expression in s; CSV to stdout.
    Invert {
        /// Transform, e.g. "1/(s^2 + 1)".
        expr: String,
        #[arg(long, default_value_t = 1.0)]
        abscissa: f64,
        #[arg(long, default_value_t = 200.0)]
        half_height: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = 0.0)]
        t_start: f64,
        #[arg(long, default_value_t = 10.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1001)]
        n_points: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage mistakes are input errors, like a bad config
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result: Result<(), CliError> = match &cli.command {
        Command::Solve(a) => run_solve(
            &a.config,
            &Options {
                out_dir: a.out_dir.clone(),
                quiet: cli.quiet,
            },
        ),
        Command::Verify(a) => run_verify(
            &a.config,
            &Options {
                out_dir: a.out_dir.clone(),
                quiet: cli.quiet,
            },
        ),
        Command::Invert {
            expr,
            abscissa,
            half_height,
            step,
            t_start,
            t_end,
            n_points,
        } => {
            let contour = ContourParams {
                abscissa: *abscissa,
                half_height: *half_height,
                step: *step,
                ..ContourParams::default()
            };
            let grid = GridSection {
                t_start: *t_start,
                t_end: *t_end,
                n_points: *n_points,
            };
            run_invert(expr, &contour, &grid, &mut std::io::stdout().lock(), cli.quiet)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
