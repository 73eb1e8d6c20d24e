use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use multipop_cli::{commands::finding_line, run, Cli, CliError, Exit};

fn emit(cli: &Cli, body: &str) -> Result<(), CliError> {
    match &cli.opts.output {
        Some(path) => fs::write(path, body).map_err(|source| CliError::Io { path: path.display().to_string(), source }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())
                .and_then(|()| out.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|report| {
        emit(&cli, &report.render(cli.opts.format))?;
        Ok(report.exit)
    });
    let exit = match result {
        Ok(exit) => exit,
        Err(e) => {
            eprintln!("multipop: {e}");
            if let CliError::Invalid { report, .. } = &e {
                for f in &report.findings {
                    eprintln!("{}", finding_line(f));
                }
            }
            e.exit()
        }
    };
    debug_assert!(exit <= Exit::Budget);
    ExitCode::from(exit.code())
}
