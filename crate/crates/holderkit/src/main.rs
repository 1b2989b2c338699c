//! Thin command-line front-end over [`holderkit::cli`].

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use holderkit::cli::{parse_config, run, AnalysisKind, AnalysisOutcome, RunConfig};

#[derive(Parser)]
#[command(name = "holderkit", version, about = "Hölder regularity analysis of Gaussian processes")]
struct Args {
    #[command(subcommand)]
    command: Command,

    /// Output directory (overrides the config's `out_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Exit nonzero when any condition verdict is violated.
    #[arg(long, global = true)]
    strict: bool,

    /// Rayon thread-pool size (results are identical for any value).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the config's analysis list and write report.json.
    Analyze { config: PathBuf },
    /// Generate sample paths only (paths.csv), ignoring other analyses.
    Simulate { config: PathBuf },
    /// Run the config's analysis list and print the report to stdout.
    Report { config: PathBuf },
}

fn load(path: &PathBuf) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(n) = args.threads {
        // Ignore failure: the global pool may already exist in tests.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let (config_path, print_json, simulate_only) = match &args.command {
        Command::Analyze { config } => (config, false, false),
        Command::Simulate { config } => (config, false, true),
        Command::Report { config } => (config, true, false),
    };
    let mut config = match load(config_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if simulate_only {
        config.analyses = vec![AnalysisKind::Simulate];
    }
    let out_dir = args
        .out
        .or_else(|| config.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let report = match run(&config, &out_dir) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    if print_json {
        match serde_json::to_string_pretty(&report) {
            Ok(json) => println!("{json}"),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
        }
    } else {
        for a in &report.analyses {
            let status = match &a.outcome {
                AnalysisOutcome::Error { message } => format!("error: {message}"),
                AnalysisOutcome::Verdicts { verdicts } => {
                    if verdicts.iter().all(|v| v.holds) {
                        "holds".to_string()
                    } else {
                        "violated".to_string()
                    }
                }
                _ => "ok".to_string(),
            };
            println!("{:<24} {:>10.1} ms  {status}", a.name, a.wall_clock_ms);
        }
        println!("report written to {}", out_dir.join("report.json").display());
    }
    if args.strict && report.has_violation() {
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}
