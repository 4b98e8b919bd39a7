mod args;
mod commands;
mod error;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Format};
use crate::error::{CliError, EXIT_ROW_FAILURE};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("periodscope: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<ExitCode, CliError> {
    let (report, output) = commands::run(&cli.command)?;
    match &output.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            report.write(output.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            report.write(output.format, &mut w)?;
            w.flush()?;
        }
    }
    let stderr = io::stderr();
    let mut err = stderr.lock();
    if output.format == Format::Csv {
        report.write_diagnostics(&mut err)?;
    }
    for w in &report.warnings {
        writeln!(err, "warning: {w}")?;
    }
    if report.failed_rows > 0 {
        writeln!(err, "periodscope: {} row(s) failed", report.failed_rows)?;
        return Ok(ExitCode::from(EXIT_ROW_FAILURE));
    }
    Ok(ExitCode::SUCCESS)
}
