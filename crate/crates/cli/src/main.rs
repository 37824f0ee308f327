//! `chemeval`: scores molecule detection, structure conversion and reaction
//! extraction against annotated pages.
//!
//! Exit status: 0 success, 1 internal error, 2 input error, 3 undefined
//! metric (for example a corpus without ground-truth molecules). Log
//! verbosity comes from `CHEMEVAL_LOG` (`error`, `warn`, `info`, `debug`).

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod error;
mod inputs;
mod report;

use commands::combined::CombinedArgs;
use commands::fixture::FixtureArgs;
use commands::reactions::ReactionArgs;
use commands::stats::StatsArgs;
use commands::EvalArgs;

#[derive(Debug, Parser)]
#[command(name = "chemeval", version, about = "Evaluate chemical information extraction from document pages")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// COCO AP/AR of molecule boxes, plus precision/recall at IoU 0.5.
    Detect(EvalArgs),
    /// Structure accuracy on ground-truth boxes: exact match rate and mean Tanimoto.
    Convert(EvalArgs),
    /// Detection and conversion together: a hit needs both the box and the structure.
    Combined(CombinedArgs),
    /// Reaction precision/recall/F1 under soft and/or hard matching.
    Reactions(ReactionArgs),
    /// Page, molecule and reaction counts of ground-truth files.
    Stats(StatsArgs),
    /// Write a seeded synthetic corpus with known scores.
    GenFixture(FixtureArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CHEMEVAL_LOG", "warn")).init();
    std::panic::set_hook(Box::new(|info| {
        eprintln!("chemeval: internal error: {info}");
        std::process::exit(i32::from(error::EXIT_INTERNAL));
    }));
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Detect(a) => commands::detect::run(a),
        Command::Convert(a) => commands::convert::run(a),
        Command::Combined(a) => commands::combined::run(a),
        Command::Reactions(a) => commands::reactions::run(a),
        Command::Stats(a) => commands::stats::run(a),
        Command::GenFixture(a) => commands::fixture::run(a),
    };
    match result {
        Ok(()) => ExitCode::from(error::EXIT_OK),
        Err(e) => {
            eprintln!("chemeval: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
