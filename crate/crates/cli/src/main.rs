use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use twistlab_cli::{execute, Cli, EXIT_CONFIG, EXIT_FAIL, EXIT_PASS};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match cli.into_config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("twistlab: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let outcome = match execute(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("twistlab {}: {e}", cfg.command.name());
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };

    if let Some(csv) = &outcome.csv {
        match &cfg.output_path {
            Some(path) => {
                if let Err(e) = std::fs::write(path, csv) {
                    eprintln!("twistlab: cannot write {}: {e}", path.display());
                    return ExitCode::from(EXIT_CONFIG as u8);
                }
            }
            None => {
                let _ = std::io::stdout().write_all(csv.as_bytes());
            }
        }
    }
    let summary = outcome.summary.join("\n");
    if cfg.output_path.is_some() || outcome.csv.is_none() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    ExitCode::from(if outcome.passed { EXIT_PASS } else { EXIT_FAIL } as u8)
}
