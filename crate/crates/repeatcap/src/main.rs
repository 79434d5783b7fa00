use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use repeatcap::cli::Cli;
use repeatcap::exec;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    let result = exec::run(cli, &mut lock).and_then(|()| lock.flush().map_err(Into::into));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("repeatcap: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
