mod config;
mod curate;
mod git;
mod pipeline;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use config::ConfigArgs;
use mergeprompt_core::editseq::{compress, edit_script};
use mergeprompt_core::eval::{curve_csv, fit_density, AccuracyCurve, FitOptions};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "mergeprompt", version, about = "Resolve merge conflicts with few-shot prompts")]
struct Cli {
    /// More log output (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mine conflict descriptions from history and compiler diagnostics.
    Curate(curate::CurateArgs),
    /// Print the assembled prompt for one example.
    Prompt {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        id: String,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Sample candidate resolutions for every example in a corpus.
    Resolve {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// StringMerge candidates (no model involved).
    Baseline {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Score candidates against the corpus ground truth.
    Eval {
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        /// Largest trial count on the curve (default: fewest candidates of any record).
        #[arg(long)]
        k: Option<usize>,
        /// Also fit a solve-probability density to the curve.
        #[arg(long)]
        fit: bool,
        /// Report file (stdout if omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write the curve as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Fit a solve-probability density to an accuracy curve.
    FitCurve {
        /// CSV with an `accuracy` column, a JSON array, or a run report.
        #[arg(long)]
        curve: PathBuf,
        #[command(flatten)]
        fit: FitArgs,
    },
    /// Compressed edit sequence between two lines.
    Editseq {
        before: String,
        after: String,
        /// Print the uncompressed operations as well.
        #[arg(long)]
        ops: bool,
    },
}

#[derive(Debug, clap::Args)]
struct FitArgs {
    #[arg(long, default_value_t = FitOptions::default().grid)]
    grid: usize,
    #[arg(long, default_value_t = FitOptions::default().iterations)]
    iterations: usize,
    #[arg(long, default_value_t = FitOptions::default().learning_rate)]
    learning_rate: f64,
}

impl FitArgs {
    fn options(&self) -> FitOptions {
        FitOptions {
            grid: self.grid,
            iterations: self.iterations,
            learning_rate: self.learning_rate,
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Curate(args) => {
            let failed = curate::run(&args)?;
            return Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(2) });
        }
        Command::Prompt { corpus, id, config } => pipeline::print_prompt(&config.resolve()?, &corpus, &id)?,
        Command::Resolve { corpus, output, config } => pipeline::resolve(&config.resolve()?, &corpus, &output)?,
        Command::Baseline { corpus, output, config } => pipeline::baseline(&config.resolve()?, &corpus, &output)?,
        Command::Eval {
            candidates,
            corpus,
            k,
            fit,
            output,
            csv,
            config,
        } => {
            let cfg = config.resolve()?;
            let options = pipeline::EvalOptions {
                k,
                fit: fit.then(FitOptions::default),
            };
            let report = pipeline::evaluate(&cfg, &candidates, &corpus, &options)?;
            let json = serde_json::to_string_pretty(&report)? + "\n";
            match output {
                Some(path) => std::fs::write(&path, json).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{json}"),
            }
            if let Some(path) = csv {
                let curve = AccuracyCurve {
                    solved: report.solved.clone(),
                    total: report.total,
                };
                std::fs::write(&path, curve_csv(&curve)).with_context(|| format!("writing {}", path.display()))?;
            }
            let k = report.curve.len();
            eprintln!(
                "accuracy@{k}: {}/{} = {:.3}",
                report.solved.last().copied().unwrap_or(0),
                report.total,
                report.curve.last().copied().unwrap_or(0.0)
            );
        }
        Command::FitCurve { curve, fit } => {
            let observed = pipeline::read_curve(&curve)?;
            let result = fit_density(&observed, &fit.options())?;
            let json = serde_json::json!({
                "grid": result.model.grid,
                "weights": result.model.weights,
                "mass_near_zero": result.mass_near_zero,
                "mass_near_one": result.mass_near_one,
                "loss": result.loss,
            });
            println!("{}", serde_json::to_string_pretty(&json)?);
        }
        Command::Editseq { before, after, ops } => {
            let script = edit_script(&before, &after);
            println!("{}", compress(&script));
            if ops {
                let raw: String = script.iter().map(|op| op.symbol()).collect();
                println!("{raw}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
