use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use orbifold_cli::{parse_scenario_with, resolve_scenario_path, run_command, Command, Options};
use orbifold_core::poisson::Route;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RouteArg {
    Evaluator,
    Closed,
}

/// Exact Hochschild and Poisson computations for polynomial functions on a
/// representation crossed with a finite group.
#[derive(Parser, Debug)]
#[command(name = "orbifold", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Scenario file, or the name of a bundled scenario
    scenario: PathBuf,
    /// Coefficient degree bound
    #[arg(long)]
    degree: Option<u32>,
    /// hbar order for star products
    #[arg(long)]
    order: Option<usize>,
    #[arg(long, value_enum)]
    route: Option<RouteArg>,
    /// Also write the machine-readable report to this file
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Print key<TAB>value lines instead of the human-readable report
    #[arg(long)]
    machine: bool,
    /// Override a [params] entry, e.g. --set n=3
    #[arg(long = "set", value_name = "NAME=EXPR")]
    set: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut overrides = BTreeMap::new();
    for s in &cli.set {
        match s.split_once('=') {
            Some((k, v)) => {
                overrides.insert(k.trim().to_string(), v.trim().to_string());
            }
            None => {
                eprintln!("error: --set expects NAME=EXPR, got '{}'", s);
                return ExitCode::from(2);
            }
        }
    }
    let path = resolve_scenario_path(&cli.scenario);
    let scenario = match parse_scenario_with(&path, &overrides) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {}", e);
            return ExitCode::from(2);
        }
    };
    let opts = Options {
        degree: cli.degree,
        order: cli.order,
        route: cli.route.map(|r| match r {
            RouteArg::Evaluator => Route::Evaluator,
            RouteArg::Closed => Route::ClosedForm,
        }),
        seed: cli.seed,
    };
    let report = match run_command(cli.command, &scenario, &opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}", e);
            return ExitCode::from(2);
        }
    };
    if let Some(p) = &cli.report {
        if let Err(e) = std::fs::write(p, report.machine()) {
            eprintln!("error: cannot write {}: {}", p.display(), e);
            return ExitCode::from(2);
        }
    }
    if cli.machine {
        print!("{}", report.machine());
    } else {
        print!("{}", report.human());
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
