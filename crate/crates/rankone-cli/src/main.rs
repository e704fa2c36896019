use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rankone::ModelName;
use rankone_cli::report::write_report;
use rankone_cli::{eval, run_suite, Settings, Suite};

#[derive(Parser)]
#[command(name = "rankone", version, about = "Identity checks for rank-one symmetric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an identity suite and write a JSON report.
    Verify {
        suite: Suite,
        #[arg(long, value_parser = parse_model)]
        model: Option<ModelName>,
        #[arg(long, env = "RANKONE_CONFIG")]
        config: Option<PathBuf>,
        /// Directory receiving the report and index.json.
        #[arg(long, default_value = "rankone-reports")]
        report: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Evaluate a single quantity, e.g. `eval c H2R z=rho`.
    Eval {
        expr: String,
        #[arg(allow_hyphen_values = true)]
        args: Vec<String>,
    },
}

fn parse_model(s: &str) -> Result<ModelName, String> {
    s.parse().map_err(|e: rankone::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify { suite, model, config, report, seed, workers } => {
            let mut settings = match Settings::load(config.as_deref(), model) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            if let Some(seed) = seed {
                settings.run.seed = seed;
            }
            if let Some(w) = workers {
                if w == 0 {
                    eprintln!("error: --workers must be at least 1");
                    return ExitCode::from(2);
                }
                settings.run.workers = w;
            }
            let result = match run_suite(suite, &settings) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            print!("{}", result.table());
            match write_report(&report, &result) {
                Ok(path) => println!("report: {}", path.display()),
                Err(e) => {
                    eprintln!("error: cannot write report to {}: {e}", report.display());
                    return ExitCode::from(2);
                }
            }
            if result.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Eval { expr, args } => match eval::evaluate(&expr, &args) {
            Ok(v) => {
                println!("{v}");
                ExitCode::SUCCESS
            }
            Err(e @ eval::EvalError::Compute(_)) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
    }
}
