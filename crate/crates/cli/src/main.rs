use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use shimorin_cli::{run, Overrides, RunConfig, TaskStatus};

#[derive(Parser)]
#[command(name = "shimorin", version, about = "Shimorin kernels, induced weights and h-profile fits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the tasks of a JSON configuration and write the report.
    Run {
        /// JSON run configuration.
        #[arg(long)]
        config: PathBuf,
        /// Output directory, created if missing.
        #[arg(long)]
        out: PathBuf,
        /// Highest coefficient index; overrides `max-n`.
        #[arg(long)]
        max_n: Option<usize>,
        /// Matching and series tolerance; overrides `tol`.
        #[arg(long)]
        tol: Option<f64>,
        /// h-grid size for fits; overrides `grid-points`.
        #[arg(long)]
        grid_points: Option<usize>,
        /// Kernel evaluation point, `x=<real>`; repeatable.
        #[arg(long = "eval", value_name = "x=<real>", value_parser = parse_eval)]
        eval: Vec<f64>,
    },
}

fn parse_eval(arg: &str) -> Result<f64> {
    let Some(value) = arg.strip_prefix("x=") else {
        bail!("expected x=<real>, got {arg}");
    };
    value.trim().parse().with_context(|| format!("not a real number: {value}"))
}

fn main() -> ExitCode {
    match try_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn try_main() -> Result<ExitCode> {
    let Command::Run { config, out, max_n, tol, grid_points, eval } = Cli::parse().command;
    let mut cfg = RunConfig::from_path(&config)?;
    cfg.apply(&Overrides { max_n, tol, grid_points, eval_points: eval })?;
    let outcome = run(&cfg, &out).with_context(|| format!("run failed writing to {}", out.display()))?;
    for (task, timing) in outcome.report.tasks.iter().zip(&outcome.timings) {
        match task.status {
            TaskStatus::Ok => println!("{:<15} ok     {:>9.3}s", task.task.to_string(), timing.seconds),
            TaskStatus::Error => println!(
                "{:<15} error  {:>9.3}s  {}",
                task.task.to_string(),
                timing.seconds,
                task.error.as_deref().unwrap_or("")
            ),
        }
    }
    println!("report: {}", out.join("report.json").display());
    Ok(if outcome.report.succeeded() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
