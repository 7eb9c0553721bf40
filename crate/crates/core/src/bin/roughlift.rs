// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use roughlift::experiment::{emit, parse_config, run, Kind};
use roughlift::Error;

#[derive(Parser)]
#[command(name = "roughlift", version, about = "Renormalised rough-path lift experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the algebraic and oracle suites and print pass/fail per suite.
    Identities(RunArgs),
    /// Magnetic small-mass experiment over an ε schedule.
    Magnetic(RunArgs),
    /// Lead-lag fBm experiment over a resolution schedule.
    Leadlag(RunArgs),
    /// Tabulate ψ(n, K) against its bound.
    Psi(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Override the config's base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (outputs do not depend on this).
    #[arg(long)]
    threads: Option<usize>,
}

fn execute(kind: Kind, args: &RunArgs) -> Result<bool, Error> {
    let mut cfg = parse_config(kind, &args.config)?;
    if let Some(seed) = args.seed {
        cfg = cfg.with_seed(seed);
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(k) = args.threads {
        if k == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        pool = pool.num_threads(k);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let outcome = pool.install(|| run(&cfg))?;
    if kind == Kind::Identities {
        for row in &outcome.report.rows {
            let line: Vec<String> = row.iter().map(|c| c.render()).collect();
            println!("{}", line.join("  "));
        }
    }
    for path in emit(&outcome.report, &args.out)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(outcome.all_pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Identities(a) => (Kind::Identities, a),
        Command::Magnetic(a) => (Kind::Magnetic, a),
        Command::Leadlag(a) => (Kind::Leadlag, a),
        Command::Psi(a) => (Kind::Psi, a),
    };
    match execute(kind, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: some identity suites failed");
            ExitCode::from(1)
        }
        Err(e @ Error::Config(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
