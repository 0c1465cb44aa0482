use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use majorant::suite::{run_suite, ConfigError, SuiteConfig};

/// Run numerical verification suites and print a JSON or CSV report.
#[derive(Debug, Parser)]
#[command(name = "verify", version, allow_negative_numbers = true)]
struct Args {
    /// Suite name; same as `--suite`
    #[arg(value_name = "SUITE", conflicts_with = "suite")]
    suite_pos: Option<String>,
    /// ball, op-bessel, discrete-ball, lemmas, lattice, entropy, certificates or all
    #[arg(long)]
    suite: Option<String>,
    /// Integer list, e.g. `2..64` or `2,3,5`
    #[arg(long)]
    n: Option<String>,
    /// Float list, e.g. `2..64:0.5`
    #[arg(long)]
    p: Option<String>,
    /// Exponents for the Ball and Bessel suites
    #[arg(long)]
    s: Option<String>,
    /// Entropy orders; `inf` is accepted
    #[arg(long)]
    q: Option<String>,
    /// Lattice dimension range, e.g. `1..6`
    #[arg(long)]
    dims: Option<String>,
    /// Largest lattice box side
    #[arg(long = "max-side")]
    max_side: Option<String>,
    /// Number of random lattice boxes
    #[arg(long)]
    boxes: Option<String>,
    /// Points in transport contraction grids
    #[arg(long)]
    grid: Option<String>,
    /// Minimum error budget for equality records
    #[arg(long)]
    tol: Option<String>,
    /// Seed for randomized suites
    #[arg(long)]
    seed: Option<String>,
    /// Worker threads; defaults to MAJORANT_JOBS, then the CPU count
    #[arg(long)]
    jobs: Option<String>,
    /// json or csv
    #[arg(long)]
    output: Option<String>,
    /// Flat `key = value` file; command-line flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

fn build_config(args: &Args) -> Result<SuiteConfig, ConfigError> {
    let mut cfg = SuiteConfig::default();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::BadValue { key: "config".into(), reason: format!("{}: {e}", path.display()) })?;
        cfg.apply_file(&text)?;
    }
    if let Ok(jobs) = std::env::var("MAJORANT_JOBS") {
        if args.jobs.is_none() {
            cfg.set("jobs", &jobs)?;
        }
    }
    let flags = [
        ("suite", &args.suite_pos),
        ("suite", &args.suite),
        ("n", &args.n),
        ("p", &args.p),
        ("s", &args.s),
        ("q", &args.q),
        ("dims", &args.dims),
        ("max_side", &args.max_side),
        ("boxes", &args.boxes),
        ("grid", &args.grid),
        ("tol", &args.tol),
        ("seed", &args.seed),
        ("jobs", &args.jobs),
        ("output", &args.output),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match build_config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("verify: {e}");
            return ExitCode::from(2);
        }
    };
    match run_suite(&cfg) {
        Ok(run) => {
            print!("{}", run.render());
            eprintln!("verify: {}/{} checks passed", run.passed(), run.records.len());
            ExitCode::from(run.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("verify: {e}");
            ExitCode::from(2)
        }
    }
}
