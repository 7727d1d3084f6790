mod amoc;
mod diagnose;
mod fetch;
mod mcpt;
mod nulltab;
mod simstudy;

use crate::{Cli, Command, Result};

/// Executes one parsed command line, printing its report to stdout.
pub fn run(cli: &Cli) -> Result<()> {
    let report = match &cli.command {
        Command::Fetch(a) => fetch::run(a)?,
        Command::Diagnose(a) => diagnose::run(a)?,
        Command::Amoc(a) => amoc::run(a)?,
        Command::Mcpt(a) => mcpt::run(a)?,
        Command::Simstudy(a) => simstudy::run(a)?,
        Command::Nulltab(a) => nulltab::run(a)?,
    };
    print!("{report}");
    Ok(())
}
