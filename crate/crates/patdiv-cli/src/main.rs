//! `patdiv` — CSV-in, CSV-out pipeline for patent classification
//! diversity and life-cycle analysis.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error. Failures print a
//! single `error: ...` line on stderr; warnings (substituted disparities,
//! skipped correlation cells) go to the log on stderr.

mod commands;

use clap::error::ErrorKind;
use clap::Parser;

use commands::{Cli, CliError};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                std::process::exit(0);
            }
            eprint!("{e}");
            std::process::exit(1);
        }
    };

    match commands::run(cli) {
        Ok(()) => {}
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            std::process::exit(1);
        }
        Err(CliError::Data(message)) => {
            eprintln!("error: {message}");
            std::process::exit(2);
        }
    }
}
