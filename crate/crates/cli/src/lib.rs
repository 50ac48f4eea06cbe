//! Command-line front end for the `eos-core` noise calculations.
//!
//! Every subcommand writes one data file (CSV or JSON) and, when `--out` is
//! given, a `<out>.manifest.json` describing how it was produced.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;

use clap::error::ErrorKind;
use clap::Parser;

/// Runs the tool on `argv` (program name first) and returns the exit code:
/// 0 on success, 1 on computation errors, 2 on usage errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    match commands::execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
