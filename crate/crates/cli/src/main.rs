use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use hetnet_drag::harness::{run_experiment, summarize, workers_from_env, AgentKind, ExperimentSpec, Summary, WORKERS_VAR};

/// Small-cell activation experiments.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment spec and write CSV and JSON outputs.
    #[command(after_help = "Worker threads: set DRAG_WORKERS (default: number of CPUs).")]
    Run {
        #[arg(long)]
        spec: PathBuf,
        /// Output directory; overrides `out` in the spec.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// drag, ql, tact_style, sota, all_on or all_off
        #[arg(long)]
        agent: Option<AgentKind>,
        #[arg(long)]
        days: Option<usize>,
        #[arg(long)]
        traces: Option<usize>,
    },
    /// Print the summary of a finished run directory.
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

fn print_summary(s: &Summary) {
    println!(
        "{} / {}: {} days, {} traces, seed {}",
        s.agent, s.experiment, s.days, s.traces, s.seed
    );
    for p in &s.points {
        let label = p.value.map_or_else(|| "-".to_string(), |v| v.to_string());
        print!(
            "  point {:2} value {:>5}  final {}-day normalized cost {:.4} +/- {:.4} ({} complete)",
            p.point, label, s.final_days, p.mean, p.std, p.complete_traces
        );
        if let Some(f) = p.visited_pair_fraction {
            print!("  visited pairs {:.3e}", f);
        }
        println!();
    }
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Run {
            spec,
            out,
            seed,
            agent,
            days,
            traces,
        } => {
            let mut s = ExperimentSpec::from_file(&spec).map_err(|e| format!("{}: {e}", spec.display()))?;
            if let Some(v) = seed {
                s.seed = v;
            }
            if let Some(v) = agent {
                s.agent = v;
            }
            if let Some(v) = days {
                s.days = v;
            }
            if let Some(v) = traces {
                s.traces = v;
            }
            let out = out
                .or_else(|| s.out.clone())
                .ok_or("no output directory: pass --out or set `out` in the spec")?;
            let workers = workers_from_env();
            eprintln!(
                "running {} traces x {} points of {} on {workers} worker(s) ({WORKERS_VAR})",
                s.traces,
                s.sweep_points().len(),
                s.agent
            );
            let start = Instant::now();
            let result = run_experiment(&s, &out, workers).map_err(|e| e.to_string())?;
            eprintln!("done in {:.1?}, wrote {}", start.elapsed(), out.display());
            print_summary(&result.summary);
        }
        Command::Summarize { input } => {
            let s = summarize(&input).map_err(|e| format!("{}: {e}", input.display()))?;
            print_summary(&s);
            print!("{}", s.to_json());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
