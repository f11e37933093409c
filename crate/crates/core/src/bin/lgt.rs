use clap::builder::PossibleValuesParser;
use clap::Parser;
use lgt_core::scenario::{run_scenario, ScenarioKind};
use lgt_core::Error;
use std::path::PathBuf;
use std::process::ExitCode;

/// Runs one lattice-gauge scenario from a TOML config and writes CSV tables
/// plus metadata.json.
#[derive(Parser, Debug)]
#[command(name = "lgt", version)]
struct Cli {
    /// Scenario kind.
    #[arg(value_parser = PossibleValuesParser::new(ScenarioKind::ALL.map(|k| k.name())))]
    scenario: String,
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `[output] dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    verbose: bool,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_)
        | Error::InvalidParameter(_)
        | Error::Geometry(_)
        | Error::OutOfRange { .. }
        | Error::BasisMismatch(_) => 2,
        Error::Capacity { .. } => 3,
        Error::Validation(_) | Error::Precondition(_) | Error::KrylovTolerance { .. } => 4,
        Error::Io(_) => 1,
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    let kind: ScenarioKind = cli.scenario.parse()?;
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", cli.config.display())))?;
    let report = run_scenario(kind, &text, cli.out.as_deref())?;
    println!(
        "{kind}: wrote {} to {}",
        report.files.join(", "),
        report.out_dir.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose {
        log::LevelFilter::Info
    } else {
        log::LevelFilter::Warn
    };
    env_logger::Builder::new().filter_level(level).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
