use std::process::ExitCode;

use bhclone_cli::{configure_threads, first_line, run, Cli};
use clap::error::ErrorKind;
use clap::Parser;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let text = e.render().to_string();
            eprintln!("{}", first_line(&text));
            return ExitCode::from(2);
        }
    };
    let result = configure_threads()
        .and_then(|_| run(&cli))
        .and_then(|report| report.emit());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("bhclone: {}", first_line(&message));
            ExitCode::FAILURE
        }
    }
}
