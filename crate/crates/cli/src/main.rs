mod cli;
mod commands;
mod config;
mod error;
mod manifest;
mod output;

use std::process::ExitCode;

use clap::Parser;

use cli::{Cli, Command};
use commands::Context;
use config::CliConfig;
use error::Result;

fn run(cli: Cli) -> Result<commands::Rendered> {
    let ctx = Context {
        config: CliConfig::load(cli.config.as_deref())?,
        out: cli.out,
        strict: cli.strict_parse,
    };
    match &cli.command {
        Command::Battery(args) => commands::battery::run(&ctx, args),
        Command::Shuffle(args) => commands::shuffle::run(&ctx, args),
        Command::Passwords(args) => commands::passwords::run(&ctx, args),
        Command::Llm(args) => commands::llm::run(&ctx, args),
        Command::Gen(args) => commands::gen::run(&ctx, args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli) {
        Ok(rendered) => {
            print!("{}", rendered.select(format));
            ExitCode::from(rendered.status.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
