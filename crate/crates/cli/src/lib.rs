//! Command-line front end of `fluxvol`.

pub mod args;
pub mod commands;
pub mod config;

use anyhow::Result;

pub use args::{Cli, Command, RunArgs};
pub use config::{ConfigError, RunConfig};

pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_NUMERICAL: u8 = 2;

/// Runs a parsed command line and returns the exit status.
pub fn run(cli: Cli) -> Result<u8> {
    let (args, table) = match &cli.command {
        Command::Table { which, run } => (run, which.as_deref()),
        Command::Volume(a) | Command::Diagnostics(a) | Command::Check(a) | Command::Config(a) => (a, None),
    };
    let mut cfg = args.resolve()?;
    if let Some(w) = table {
        cfg.set("table", w)?;
    }
    let outcome = match cli.command {
        Command::Volume(_) => commands::volume(&cfg)?,
        Command::Table { .. } => commands::table_cmd(&cfg)?,
        Command::Diagnostics(_) => commands::diagnostics(&cfg)?,
        Command::Check(_) => {
            let o = commands::check(&cfg)?;
            return Ok(if o.failures > 0 { EXIT_NUMERICAL } else { 0 });
        }
        Command::Config(_) => {
            cfg.validate()?;
            print!("{}", cfg.serialize());
            return Ok(0);
        }
    };
    if outcome.failures > 0 {
        eprintln!("{} numerical failure(s)", outcome.failures);
        if cfg.strict {
            return Ok(EXIT_NUMERICAL);
        }
    }
    Ok(0)
}

/// A run that produced no usable result for numerical reasons.
#[derive(Debug)]
pub struct NumericalFailure(pub String);

impl std::fmt::Display for NumericalFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for NumericalFailure {}

/// Exit status for an error that stopped the run: bad configuration or
/// I/O gives 1, a numerical failure 2.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<ConfigError>().is_some() {
        return EXIT_CONFIG;
    }
    if e.downcast_ref::<NumericalFailure>().is_some() {
        return EXIT_NUMERICAL;
    }
    match e.downcast_ref::<fluxvol::Error>() {
        Some(
            fluxvol::Error::InvalidParameter { .. }
            | fluxvol::Error::OutsideRegion { .. }
            | fluxvol::Error::Unsupported(_)
            | fluxvol::Error::Io(_),
        ) => EXIT_CONFIG,
        Some(_) => EXIT_NUMERICAL,
        None => EXIT_CONFIG,
    }
}
