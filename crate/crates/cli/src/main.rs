//! `wanderlab`: checks, experiments and renders for the wandering-domain map.
//!
//! Exit codes: 0 success, 1 failed check or runtime error, 2 usage error.

mod args;
mod commands;
mod manifest;
mod params;
mod points;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use wanderlab::Construction;

use crate::args::Cli;
use crate::commands::Failure;
use crate::manifest::RunManifest;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            // Printing help or a usage error cannot be recovered from anyway.
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let started = Instant::now();
    let env = std::env::var(params::SIG_BITS_ENV).ok();
    let params = params::resolve(&cli.global, env).map_err(|e| Failure::Usage(e.to_string()))?;
    let ctx = Construction::new(params)?;
    let mut manifest = RunManifest::new(commands::name(&cli.command), ctx.params());
    let result = commands::run(&cli.command, &ctx, &mut manifest);
    if let Some(path) = &cli.global.manifest {
        manifest.wall_time_ms = started.elapsed().as_millis();
        manifest.write(path).map_err(|e| Failure::Runtime(e.into()))?;
    }
    result
}
