#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DOMAIN: u8 = 3;
pub const EXIT_NOT_CONVERGED: u8 = 4;
pub const EXIT_IO: u8 = 5;
pub const EXIT_FORMAT: u8 = 6;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_IO,
            message: message.into(),
        }
    }

    pub fn context(self, ctx: impl std::fmt::Display) -> Self {
        Self {
            code: self.code,
            message: format!("{ctx}: {}", self.message),
        }
    }
}

impl From<capcal::Error> for Failure {
    fn from(e: capcal::Error) -> Self {
        use capcal::Error as E;
        let code = match e {
            E::Domain { .. }
            | E::Convergence { .. }
            | E::NonFinite { .. }
            | E::EmptyObjective { .. }
            | E::Singular { .. } => EXIT_DOMAIN,
            E::Format { .. } => EXIT_FORMAT,
            E::Io { .. } => EXIT_IO,
            E::Invalid(_) => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Error,
        1 => log::LevelFilter::Warn,
        2 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();

    let out = cli.out.as_deref();
    let result = match &cli.command {
        Command::Eval(a) => commands::eval(a, cli.format, out),
        Command::Table(a) => commands::table(a, cli.format, out),
        Command::Curves(a) => commands::curves(a, cli.format, out),
        Command::Fit(a) => commands::fit(a, cli.format, out),
        Command::Synth(a) => commands::synth(a, out),
        Command::Exponent(a) => commands::exponent(a, cli.format, out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
