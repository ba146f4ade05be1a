use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mfw_core::analysis::{FitWindow, RateModel};
use mfw_cli::commands::{self, RunFlags};
use mfw_cli::CliError;

#[derive(Parser)]
#[command(name = "mfw", version, about = "Multiobjective Frank-Wolfe experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem file and write history.csv and summary.txt.
    Run {
        problem: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        record_theta_tilde: bool,
    },
    /// Run a worked example (1a, 1b, 3 or 4) with plots and a rate report.
    Example {
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a rate model to the merit of a history.
    Rates {
        history: PathBuf,
        #[arg(long)]
        model: RateModel,
        /// Iteration range `a:b`; defaults to the tail.
        #[arg(long)]
        window: Option<String>,
        /// Problem file supplying the reference point.
        #[arg(long)]
        problem: Option<PathBuf>,
    },
    /// Check the per-iteration inequalities of a history.
    Verify { history: PathBuf, problem: PathBuf },
    /// Compare the subproblem solver against the grid oracle.
    OracleCheck {
        problem: PathBuf,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn dispatch(cmd: Command) -> Result<String, CliError> {
    match cmd {
        Command::Run {
            problem,
            out,
            max_iters,
            tol,
            record_theta_tilde,
        } => commands::cmd_run(
            &problem,
            &out,
            &RunFlags {
                max_iters,
                tol,
                record_theta_tilde,
            },
        ),
        Command::Example { name, out } => commands::cmd_example(&name, &out),
        Command::Rates {
            history,
            model,
            window,
            problem,
        } => {
            let window = match window {
                Some(w) => commands::parse_window(&w)?,
                None => FitWindow::Tail,
            };
            commands::cmd_rates(&history, model, window, problem.as_deref())
        }
        Command::Verify { history, problem } => commands::cmd_verify(&history, &problem),
        Command::OracleCheck { problem, trials, seed } => commands::cmd_oracle_check(&problem, trials, seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            if let CliError::Verification(text) = &e {
                print!("{text}");
                eprintln!("verification failed");
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
