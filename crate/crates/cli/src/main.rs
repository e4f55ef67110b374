use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use hcontour_cli::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let stderr = io::stderr();
    let result = hcontour_cli::run(cli, &mut stdout.lock(), &mut stderr.lock());
    let _ = io::stdout().flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
