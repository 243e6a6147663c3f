use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use pcnls::harness::{self, parse_manifest, Command, GridSpec, Manifest};

/// Radial spectral laboratory for the defocusing 3D quadratic NLS.
#[derive(Parser)]
#[command(name = "pcnls", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// TOML run manifest; defaults apply to omitted keys.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,

    /// Directory for artifacts (CSV, JSON).
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Seed for corpora and random data.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Grid as MxR, e.g. 2048x32. Also replaces the high-low grid.
    #[arg(long, global = true, value_name = "MxR")]
    grid: Option<String>,

    /// Time step of the autonomous runs.
    #[arg(long, global = true)]
    dt: Option<f64>,

    /// Print only failing checks.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Mass, energy and P drift; splitting order.
    Conserve,
    /// Pseudo-conformal identities and equation equivalence.
    TransformId,
    /// High-low decomposition pipeline.
    Highlow,
    /// Picard iteration on a short window.
    Lwp,
    /// Criticality, Littlewood-Paley and Strichartz audits.
    Norms,
    /// Kernel propagator against the spectral one.
    Oracle,
    /// Every scenario above.
    All,
}

impl Cmd {
    fn commands(self) -> Vec<Command> {
        match self {
            Cmd::Conserve => vec![Command::Conserve],
            Cmd::TransformId => vec![Command::TransformId],
            Cmd::Highlow => vec![Command::Highlow],
            Cmd::Lwp => vec![Command::Lwp],
            Cmd::Norms => vec![Command::Norms],
            Cmd::Oracle => vec![Command::Oracle],
            Cmd::All => Command::ALL.to_vec(),
        }
    }
}

fn load_manifest(cli: &Cli) -> Result<Manifest> {
    let mut m = match &cli.manifest {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_manifest(&text)?
        }
        None => Manifest::default(),
    };
    if let Some(seed) = cli.seed {
        m.seed = seed;
    }
    if let Some(grid) = &cli.grid {
        let g = GridSpec::parse_mxr(grid)?;
        m.grid = g;
        m.highlow.grid = g;
    }
    if let Some(dt) = cli.dt {
        m.dt = dt;
    }
    m.validate()?;
    Ok(m)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<bool> {
    let manifest = load_manifest(cli)?;
    let mut all_passed = true;
    for command in cli.command.commands() {
        log::info!("running {command}");
        let outcome = harness::run(command, &manifest).with_context(|| format!("scenario {command}"))?;
        outcome
            .write_artifacts(&cli.out)
            .with_context(|| format!("writing artifacts to {}", cli.out.display()))?;
        for (check, line) in outcome.checks.iter().zip(outcome.lines()) {
            if !cli.quiet || !check.passed {
                println!("{line}");
            }
        }
        for check in outcome.failing() {
            eprintln!("failed: {command}/{}", check.name);
        }
        all_passed &= outcome.passed();
    }
    Ok(all_passed)
}
