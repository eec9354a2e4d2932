//! Command-line front end: argument parsing, configuration and the
//! subcommands wiring the pipeline stages together.

mod args;
mod commands;
mod config;

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;

pub use args::{Cli, Command, Stage};
pub use commands::Invariant;
pub use config::{PipelineConfig, CONFIG_ENV};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;

/// Runs the command line and returns the process exit code.
pub fn run<I, A>(argv: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => EXIT_OK,
                _ => EXIT_INPUT,
            };
        }
    };
    let result = PipelineConfig::from_env().and_then(|cfg| commands::execute(cli.command, &cfg));
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.chain().any(|c| c.is::<Invariant>()) {
                EXIT_INTERNAL
            } else {
                EXIT_INPUT
            }
        }
    }
}
