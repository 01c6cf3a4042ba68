//! Command-line front end: `bound`, `simulate`, `sweep`, `visibility`,
//! `window`, `m3check`, `verify`.
//!
//! Exit codes: 0 success, 1 invalid input, 2 verification failure.

mod commands;
mod config;
mod format;

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use commands::CmdError;
use config::{
    overlay, parse_config_file, parse_float_list, parse_noise_file, parse_noise_pair,
    parse_selections, resolve, RawScenario,
};

#[derive(Parser)]
#[command(
    name = "chainstar",
    version,
    about = "Chained n-locality inequalities in (n, m, k) star networks with sequential weak measurements"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form bound S_j for each selection
    Bound(ScenarioArgs),
    /// Brute-force density-operator evaluation of S_j (prints the I_l terms)
    Simulate(ScenarioArgs),
    /// CSV sweep of the bounds over G, or over v at fixed G with --visibility
    Sweep(SweepArgs),
    /// Critical visibility for simultaneous violation under source noise
    Visibility(VisibilityArgs),
    /// Simultaneous-violation window in the precision factor G
    Window(WindowArgs),
    /// Best simultaneous value for three sequential observers per branch
    M3check(M3Args),
    /// Run every built-in cross-check and pinned-value test
    Verify,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Config file: key = value lines with optional [branch i] sections
    #[arg(long)]
    config: Option<PathBuf>,
    /// Branch count n
    #[arg(long)]
    n: Option<usize>,
    /// Observers per branch m
    #[arg(long)]
    m: Option<usize>,
    /// Settings per observer k
    #[arg(long)]
    k: Option<usize>,
    /// Symmetric precision factors, comma-separated, one per weak stage
    #[arg(long)]
    g: Option<String>,
    /// Symmetric quality factors (default: the optimal trade-off sqrt(1-G^2))
    #[arg(long)]
    f: Option<String>,
    /// Selections: 'all', one tuple '1,2', or digit strings '11,12,21,22'
    #[arg(long)]
    j: Option<String>,
    /// Shared source noise as 'v,r'
    #[arg(long)]
    noise: Option<String>,
    /// Per-source noise file: one 'v r' line per source
    #[arg(long)]
    noise_file: Option<PathBuf>,
    /// Also write the results as CSV to this path
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Branch count n
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Observers per branch (the sweep is defined for m = 2)
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Settings per observer k
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Selections: 'all' or digit strings
    #[arg(long, default_value = "all")]
    j: String,
    /// Grid start
    #[arg(long, default_value_t = 0.0)]
    from: f64,
    /// Grid end
    #[arg(long, default_value_t = 1.0)]
    to: f64,
    /// Number of grid intervals (steps + 1 rows)
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Sweep visibility at fixed G instead of sweeping G
    #[arg(long)]
    visibility: bool,
    /// Fixed precision factor for --visibility
    #[arg(long)]
    g: Option<f64>,
    /// Colored fractions for --visibility, comma-separated
    #[arg(long, default_value = "0,0.3333333333333333,1")]
    r: String,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VisibilityArgs {
    /// Branch count n
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Settings per observer k
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Shared colored fraction r
    #[arg(long, default_value_t = 0.0)]
    r: f64,
    /// Bisection tolerance on v
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Args)]
struct WindowArgs {
    /// Branch count n
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Settings per observer k
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Selections: 'all' or digit strings
    #[arg(long, default_value = "all")]
    j: String,
    /// Bisection tolerance on G
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct M3Args {
    /// Branch count n
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Settings per observer k
    #[arg(long, default_value_t = 2)]
    k: usize,
}

fn scenario_to_raw(args: &ScenarioArgs) -> Result<RawScenario, CmdError> {
    let mut raw = RawScenario {
        n: args.n,
        m: args.m,
        k: args.k,
        j: args.j.clone(),
        ..RawScenario::default()
    };
    if let Some(g) = &args.g {
        raw.g = Some(parse_float_list(g)?);
    }
    if let Some(f) = &args.f {
        raw.f = Some(parse_float_list(f)?);
    }
    if let Some(noise) = &args.noise {
        raw.noise = Some(parse_noise_pair(noise)?);
    }
    if let Some(path) = &args.noise_file {
        raw.noise_rows = Some(parse_noise_file(path)?);
    }
    Ok(raw)
}

fn resolve_scenario(args: &ScenarioArgs) -> Result<config::Resolved, CmdError> {
    let flags = scenario_to_raw(args)?;
    let merged = match &args.config {
        Some(path) => overlay(parse_config_file(path)?, flags),
        None => flags,
    };
    Ok(resolve(merged)?)
}

fn run(cli: Cli) -> Result<(), CmdError> {
    match cli.command {
        Command::Bound(args) => {
            let resolved = resolve_scenario(&args)?;
            commands::bound(&resolved, args.out.as_deref())
        }
        Command::Simulate(args) => {
            let resolved = resolve_scenario(&args)?;
            commands::simulate(&resolved, args.out.as_deref())
        }
        Command::Sweep(args) => {
            if args.m != 2 {
                return Err(CmdError::Invalid(
                    "sweep is defined for m = 2 scenarios".into(),
                ));
            }
            if args.visibility {
                let r_list = parse_float_list(&args.r)?;
                commands::sweep_visibility(
                    args.n,
                    args.k,
                    args.g.unwrap_or(0.8),
                    &r_list,
                    args.from,
                    args.to,
                    args.steps,
                    args.out.as_deref(),
                )
            } else {
                if args.g.is_some() {
                    return Err(CmdError::Invalid(
                        "--g only applies to --visibility mode (G is the swept variable otherwise)"
                            .into(),
                    ));
                }
                let selections = parse_selections(&args.j, args.n, 2)?;
                commands::sweep_precision(
                    args.n,
                    args.k,
                    &selections,
                    args.from,
                    args.to,
                    args.steps,
                    args.out.as_deref(),
                )
            }
        }
        Command::Visibility(args) => commands::visibility(args.n, args.k, args.r, args.tol),
        Command::Window(args) => {
            let selections = parse_selections(&args.j, args.n, 2)?;
            commands::window(args.n, args.k, &selections, args.tol)
        }
        Command::M3check(args) => commands::m3check(args.n, args.k),
        Command::Verify => commands::verify_suite(),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            std::process::exit(0);
        }
        Err(e) => {
            let _ = e.print();
            std::process::exit(1);
        }
    };
    match run(cli) {
        Ok(()) => {}
        Err(CmdError::Invalid(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
        Err(CmdError::Verification) => std::process::exit(2),
    }
}
