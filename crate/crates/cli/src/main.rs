use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use semiclass_cli::config::parse_override;
use semiclass_cli::{run_all, run_suite, CliError, ExperimentConfig, RunReport, SUITES};

/// Run semiclassical experiment suites and write their artifacts.
#[derive(Parser, Debug)]
#[command(name = "semiclass-lab", version)]
struct Args {
    /// Suite name, `all`, or `list`.
    #[arg(long)]
    experiment: Option<String>,
    /// key=value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Override a config key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Run the suites of `all` concurrently.
    #[arg(long)]
    parallel: bool,
    /// Write binary state containers where a suite produces states.
    #[arg(long)]
    dump_state: bool,
}

fn print(report: &RunReport) {
    print!("{}", report.summary());
    println!(
        "{}: {} in {:.1} s",
        report.experiment,
        if report.passed { "PASS" } else { "FAIL" },
        report.wall_time_s
    );
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Ok(v) = std::env::var("SEMICLASS_LAB_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("warning: could not size thread pool: {e}");
                }
            }
            _ => eprintln!("warning: ignoring SEMICLASS_LAB_THREADS={v}"),
        }
    }
    match run(args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(args: Args) -> Result<bool, CliError> {
    let mut overrides = Vec::new();
    for s in &args.set {
        overrides.push(parse_override(s)?);
    }
    if let Some(e) = &args.experiment {
        overrides.push(("experiment".to_string(), e.clone()));
    }
    if let Some(o) = &args.out {
        overrides.push(("out".to_string(), o.display().to_string()));
    }
    if let Some(s) = args.seed {
        overrides.push(("seed".to_string(), s.to_string()));
    }
    if args.dump_state {
        overrides.push(("dump_state".to_string(), "true".to_string()));
    }
    let config = ExperimentConfig::load(args.config.as_deref(), &overrides)?;
    match config.experiment.as_deref() {
        None | Some("list") => {
            for s in SUITES {
                println!("{s}");
            }
            Ok(true)
        }
        Some("all") => {
            let mut ok = true;
            for (name, result) in run_all(&config, args.parallel) {
                match result {
                    Ok(r) => {
                        print(&r);
                        ok &= r.passed;
                    }
                    Err(e) => {
                        eprintln!("{name}: error: {e}");
                        ok = false;
                    }
                }
            }
            Ok(ok)
        }
        Some(name) => {
            let report = run_suite(name, &config)?;
            print(&report);
            Ok(report.passed)
        }
    }
}
