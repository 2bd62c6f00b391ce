mod args;
mod commands;
mod methods;

use std::fmt;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};

/// sysexits-style codes.
pub const EX_RUNTIME: u8 = 1;
pub const EX_NUMERIC: u8 = 2;
pub const EX_USAGE: u8 = 64;
pub const EX_DATAERR: u8 = 65;
pub const EX_NOINPUT: u8 = 66;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EX_USAGE,
            message: message.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<unso_core::Error> for Failure {
    fn from(e: unso_core::Error) -> Self {
        use unso_core::Error;
        let code = match &e {
            Error::Io(io) if io.kind() == std::io::ErrorKind::NotFound => EX_NOINPUT,
            Error::Parse { .. } | Error::InvalidMatrix(_) => EX_DATAERR,
            Error::DegenerateInput(_) | Error::TrainingDiverged { .. } => EX_NUMERIC,
            Error::InvalidArgument(_) => EX_USAGE,
            _ => EX_RUNTIME,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        unso_core::Error::from(e).into()
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EX_USAGE),
            };
        }
    };

    let result = match cli.command {
        Command::Train(a) => commands::train(a),
        Command::Ortho(a) => commands::ortho(a),
        Command::Curve(a) => commands::curve(a),
        Command::Bench(a) => commands::bench(a),
        Command::Flops(a) => commands::flops(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("unso: {f}");
            ExitCode::from(f.code)
        }
    }
}
