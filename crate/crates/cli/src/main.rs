use std::io::Write;
use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;
use conejsr::record::{side_path, write_text};
use conejsr::{run, Cli, Exit, Outcome};

fn emit(cli: &Cli, outcome: &Outcome) -> Result<()> {
    for w in &outcome.record.warnings {
        eprintln!("warning: {w}");
    }
    let json = serde_json::to_string_pretty(&outcome.record)?;
    match &cli.out {
        Some(p) => write_text(p, &json)?,
        None => writeln!(std::io::stdout(), "{json}")?,
    }
    if let Some((kind, body)) = &outcome.side {
        let path = cli
            .csv
            .clone()
            .or_else(|| cli.out.as_ref().map(|o| side_path(o, kind)));
        if let Some(p) = path {
            write_text(&p, body)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|o| emit(&cli, &o).map(|()| o.exit));
    match result {
        Ok(exit) => ExitCode::from(exit as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(Exit::Error as u8)
        }
    }
}
