use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod input;
mod report;

use commands::Options;
use report::Report;

/// Exact checks for Lie algebroids, groupoid cocycles, transverse densities
/// and transverse orientability.
#[derive(Parser, Debug)]
#[command(name = "transverse", version)]
struct Cli {
    /// Emit the report as JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for the randomized identity suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Maximum total degree of random test functions.
    #[arg(long, global = true, default_value_t = 3)]
    max_degree: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Antisymmetry, anchor, Jacobi and d² = 0 for an algebroid file.
    CheckAlgebroid { file: PathBuf },
    /// Characteristic cocycle and its class.
    ModularClass { file: PathBuf },
    /// The multiplicative cocycle of a groupoid model and its laws.
    GroupoidCocycle { file: PathBuf },
    /// Search for an invariant transverse density or a fixed-point obstruction.
    InvariantDensity { file: PathBuf },
    /// Differentiate the groupoid cocycle and compare with the algebroid.
    Vanest { file: PathBuf },
    /// Transverse orientability from a parity graph or a model with a cover.
    Orientability { file: PathBuf },
    /// Existence of an invariant transverse volume form.
    VolumeFormCriterion { file: PathBuf },
    /// Integrate a density over a box.
    IntegrateDensity { file: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = Options {
        seed: cli.seed,
        max_degree: cli.max_degree,
    };
    let (name, file, run): (&str, &PathBuf, fn(&std::path::Path, Options) -> _) = match &cli.command {
        Command::CheckAlgebroid { file } => ("check-algebroid", file, commands::check_algebroid),
        Command::ModularClass { file } => ("modular-class", file, commands::modular_class),
        Command::GroupoidCocycle { file } => ("groupoid-cocycle", file, commands::groupoid_cocycle),
        Command::InvariantDensity { file } => ("invariant-density", file, commands::invariant_density),
        Command::Vanest { file } => ("vanest", file, commands::vanest),
        Command::Orientability { file } => ("orientability", file, commands::orientability),
        Command::VolumeFormCriterion { file } => ("volume-form-criterion", file, commands::volume_form_criterion),
        Command::IntegrateDensity { file } => ("integrate-density", file, commands::integrate),
    };
    match run(file, opts) {
        Ok(entries) => {
            let report = Report {
                command: name.to_string(),
                input: file.display().to_string(),
                entries,
            };
            if cli.json {
                println!("{}", report.render_json());
            } else {
                print!("{}", report.render_text());
            }
            ExitCode::from(report.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
