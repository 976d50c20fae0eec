mod args;
mod commands;
mod output;

use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::{CliError, Ctx};

fn run(cli: &Cli) -> Result<(), CliError> {
    let ctx = Ctx { cli };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let res = match &cli.command {
        Command::Table(a) => commands::table(&ctx, &a.m, &mut out),
        Command::Moments(a) => commands::moments(&ctx, &a.m, &mut out),
        Command::Density(a) => commands::density(&ctx, a, &mut out),
        Command::Sample(a) => commands::sample(&ctx, a, &mut out),
        Command::Invert(a) => commands::invert_cmd(&ctx, a, &mut out),
        Command::VerifyBounds(a) => commands::verify_bounds(&ctx, a, &mut out),
    };
    out.flush()?;
    res
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors and 0 for --help
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pfcme: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
