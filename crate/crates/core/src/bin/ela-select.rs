use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ela_select::pipeline::{self, Overrides, PipelineConfig, WORKERS_ENV};
use ela_select::{Error, Result};

/// Landscape features and feature-based algorithm selection.
#[derive(Parser, Debug)]
#[command(name = "ela-select", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample every suite instance and write per-instance and per-problem features.
    Features(Common),
    /// Ingest runs and write ERT tables, the sanity report and the portfolio.
    Performance(Common),
    /// Grid search with leave-one-function-out cross-validation.
    Train(Common),
    /// Summary table, scatter data, confusion table and ERT ratios.
    Report(Common),
    /// Every step in order.
    RunAll(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// TOML pipeline configuration.
    #[arg(long, short)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    design_mult: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run log CSV; synthetic runs are generated by `run-all` when omitted.
    #[arg(long)]
    runs: Option<PathBuf>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
}

impl Common {
    fn config(&self) -> Result<PipelineConfig> {
        let base = match &self.config {
            Some(p) => PipelineConfig::load(p)?,
            None => PipelineConfig::default(),
        };
        base.apply(&Overrides {
            seed: self.seed,
            epsilon: self.epsilon,
            design_mult: self.design_mult,
            out: self.out.clone(),
            runs: self.runs.clone(),
        })
    }
}

fn run(cli: Cli) -> Result<()> {
    let (Command::Features(c)
    | Command::Performance(c)
    | Command::Train(c)
    | Command::Report(c)
    | Command::RunAll(c)) = &cli.command;
    let config = c.config()?;
    if let Some(n) = c.workers {
        if n == 0 {
            return Err(Error::Config("worker count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Internal(e.to_string()))?;
    }
    match &cli.command {
        Command::Features(_) => {
            let (inst, agg) = pipeline::cmd_features(&config)?;
            println!("{} instance rows, {} problem rows", inst.rows.len(), agg.rows.len());
        }
        Command::Performance(_) => {
            let p = pipeline::cmd_performance(&config)?;
            println!("portfolio: {}", p.members.join(", "));
        }
        Command::Train(_) => {
            let t = pipeline::cmd_train(&config)?;
            println!("best: {} (mean relERT {:.3})", t.best_name, t.best.mean_relert);
        }
        Command::Report(_) => {
            let r = pipeline::cmd_report(&config)?;
            print!("{}", r.summary.to_markdown());
        }
        Command::RunAll(_) => {
            let r = pipeline::run_all(&config)?;
            print!("{}", r.summary.to_markdown());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(_) => ExitCode::from(3),
    }
}
