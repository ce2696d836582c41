use clap::Parser;
use gkdeform_cli::{exit, parse_scenario, run, Mode, Scenario};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "gkdeform", version, about = "Exact generalized Kähler deformation checks on flat tori")]
struct Args {
    mode: Mode,
    /// Scenario JSON; optional for `surfaces`.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Print the aligned text table to stderr as well.
    #[arg(long)]
    table: bool,
}

fn load(args: &Args) -> Result<Scenario, String> {
    let mut sc = match &args.scenario {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            parse_scenario(&text).map_err(|e| e.to_string())?
        }
        None if args.mode == Mode::Surfaces => Scenario::default(),
        None => return Err("--scenario is required for this mode".into()),
    };
    if let Some(s) = args.seed {
        sc.seed = s;
    }
    if let Some(t) = args.trials {
        sc.trials = t;
    }
    Ok(sc)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let sc = match load(&args) {
        Ok(sc) => sc,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit::SCHEMA as u8);
        }
    };
    let report = match run(&sc, args.mode) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit::SCHEMA as u8);
        }
    };
    let text = report.to_json();
    match &args.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &text) {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(exit::SCHEMA as u8);
            }
        }
        None => println!("{text}"),
    }
    if args.table {
        eprintln!("{}", report.text_table());
    }
    for m in &report.messages {
        eprintln!("{m}");
    }
    ExitCode::from(report.exit_code as u8)
}
