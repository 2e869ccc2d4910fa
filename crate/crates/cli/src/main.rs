use std::process::ExitCode;

use clap::Parser;
use paradoxlens::args::Cli;
use paradoxlens::{exit_for, run, Exit};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(exit) => ExitCode::from(exit.code()),
        Err(err) => {
            let exit = exit_for(&err);
            if exit == Exit::NoOverlap {
                eprintln!("warning: the groups share no initial-value bin, so any comparison would extrapolate outside the common support");
            }
            eprintln!("error: {err:#}");
            ExitCode::from(exit.code())
        }
    }
}
