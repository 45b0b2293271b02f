use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use scenario_cli::{
    bundled_scenario, parse_scenario, render_csv, render_records, render_text, run_scenario,
    BUNDLED,
};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Records,
}

/// Runs scenario files against the operator-algebra workbench.
#[derive(Debug, Parser)]
#[command(name = "ncscn", version, about)]
struct Cli {
    /// Path to a scenario file, or the name of a bundled scenario.
    #[arg(long)]
    scenario: Option<String>,

    /// Directory for CSV profile artifacts.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Report format.
    #[arg(long, value_enum, default_value = "text")]
    format: Format,

    /// Override the scenario tolerance.
    #[arg(long)]
    tol: Option<f64>,

    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,

    /// List bundled scenarios and exit.
    #[arg(long)]
    list_bundled: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if cli.list_bundled {
        for (name, _) in BUNDLED {
            println!("{name}");
        }
        return ExitCode::SUCCESS;
    }

    let Some(source) = cli.scenario else {
        eprintln!("error: --scenario <path-or-name> is required (or --list-bundled)");
        return ExitCode::from(2);
    };

    let text = match bundled_scenario(&source) {
        Some(text) => text.to_string(),
        None => match std::fs::read_to_string(&source) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read scenario {source:?}: {e}");
                return ExitCode::from(2);
            }
        },
    };

    let mut scenario = match parse_scenario(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(tol) = cli.tol {
        scenario.tol = tol;
    }
    if let Some(seed) = cli.seed {
        scenario.seed = seed;
    }

    let report = run_scenario(&scenario);

    if let Some(out) = &cli.out {
        if let Err(e) = std::fs::create_dir_all(out) {
            eprintln!("error: cannot create output directory {out:?}: {e}");
            return ExitCode::from(2);
        }
        for record in &report.records {
            if let Some(table) = &record.table {
                let path = out.join(format!("{}.csv", table.name));
                if let Err(e) = std::fs::write(&path, render_csv(table)) {
                    eprintln!("error: cannot write {path:?}: {e}");
                    return ExitCode::from(2);
                }
            }
        }
    }

    match cli.format {
        Format::Text => print!("{}", render_text(&report)),
        Format::Records => print!("{}", render_records(&report)),
    }

    ExitCode::from(report.exit_code() as u8)
}
