use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use navdop_cli::scenario::{parse_grid, Catalogs, RawScenario, Scenario};
use navdop_cli::{plot, run_report, sweep, table3, CliError};

#[derive(Parser)]
#[command(name = "navdop", version, about = "Deep-space navigation dilution of precision")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct Common {
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long, value_parser = ["mars", "neptune", "custom"])]
    preset: Option<String>,
    /// Tracking span [days].
    #[arg(long)]
    days: Option<String>,
    /// Override any scenario key, e.g. --set optical.camera=mid-level.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Reserved; all computations are deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a scenario at its initial angle.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep an initial angle, the span p, or time t.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = ["alpha0", "beta0", "xi0", "p", "t"])]
        var: Option<String>,
        /// start:stop:count or a comma list.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mars and Neptune comparison against the reference table.
    Table3 {
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long, default_value_t = 360)]
        points: usize,
    },
    /// Write a gnuplot script for a figure analog.
    Plot {
        /// One or more CSV files, comma separated.
        csv: String,
        figure: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(common: &Common, extra: &[String]) -> Result<Scenario, CliError> {
    let mut raw = match &common.scenario {
        Some(p) => RawScenario::load(p)?,
        None => RawScenario::default(),
    };
    if let Some(p) = &common.preset {
        raw.set(&format!("preset={p}"))?;
    }
    if let Some(d) = &common.days {
        raw.set(&format!("days={d}"))?;
    }
    for kv in common.set.iter().chain(extra) {
        raw.set(kv)?;
    }
    let s = Scenario::from_raw(&raw, &Catalogs::from_env()?)?;
    for w in &s.warnings {
        eprintln!("warning: {w}");
    }
    Ok(s)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { common, out } => {
            let s = load(&common, &[])?;
            let (report, csv) = run_report(&s)?;
            print!("{report}");
            if let (Some(path), Some(csv)) = (out, csv) {
                std::fs::write(path, csv)?;
            }
        }
        Command::Sweep { common, var, grid, out } => {
            let mut extra = Vec::new();
            if let Some(v) = var {
                if v == "t" {
                    extra.push("sweep.output=stm_error".to_string());
                }
                extra.push(format!("sweep.var={v}"));
            }
            if let Some(g) = grid {
                parse_grid(&g)?;
                extra.push(format!("sweep.grid={g}"));
            }
            let s = load(&common, &extra)?;
            emit(&sweep::sweep_csv(&s)?, out.as_deref())?;
        }
        Command::Table3 { scenario, points } => {
            let raw = match scenario {
                Some(p) => RawScenario::load(&p)?,
                None => RawScenario::default(),
            };
            if points == 0 {
                return Err(CliError::Validation("points must be positive".into()));
            }
            let rows = table3::table3_rows(&raw, &Catalogs::from_env()?, points)?;
            print!("{}", table3::render(&rows));
        }
        Command::Plot { csv, figure, out } => {
            let paths: Vec<String> = csv.split(',').map(|s| s.trim().to_string()).collect();
            emit(&plot::plot_script(&paths, &figure)?, out.as_deref())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.report());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
