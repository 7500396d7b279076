use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use vorpca_cli::{configure_threads, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let stderr = io::stderr();
    let result = configure_threads().and_then(|()| run(cli, &mut stdout.lock(), &mut stderr.lock()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let Some(json) = &e.json {
                let _ = writeln!(stdout.lock(), "{json}");
            }
            let _ = writeln!(stderr.lock(), "error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
