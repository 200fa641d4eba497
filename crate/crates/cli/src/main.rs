//! `phasestep`: design phase-stepping demodulation filters, inspect their
//! frequency response and noise gain, synthesize fringe stacks, and recover
//! phase maps, deterministically, at any thread count.

mod args;
mod commands;

use clap::Parser;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    if let Some(threads) = cli.threads {
        // Pin the global pool before any parallel region exists. Per-pixel
        // work is keyed by position, so this changes speed, never bytes.
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads.get())
            .build_global()
            .ok();
    }
    let result = match &cli.command {
        args::Command::Design(a) => commands::cmd_design(a),
        args::Command::Spectrum(a) => commands::cmd_spectrum(a),
        args::Command::Snr(a) => commands::cmd_snr(a),
        args::Command::Simulate(a) => commands::cmd_simulate(a),
        args::Command::Demodulate(a) => commands::cmd_demodulate(a),
        args::Command::Compare(a) => commands::cmd_compare(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
