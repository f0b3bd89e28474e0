use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;

use branched::{run, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.out {
        Some(path) => File::create(path)
            .map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
            .and_then(|f| {
                let mut w = BufWriter::new(f);
                run(&cli, &mut w, &mut io::stderr())?;
                w.flush().map_err(|e| CliError::Output(e.to_string()))
            }),
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            run(&cli, &mut w, &mut io::stderr())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
