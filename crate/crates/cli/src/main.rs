use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fluidclock_cli::{run, Command, Profile, RunOptions, OUT_ENV};
use fluidclock_core::Method;

#[derive(Parser)]
#[command(name = "fluidclock", version, about = "Quantum hydrodynamics checks from scenario files")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Propagate the state and write observables and snapshots.
    Evolve(Common),
    /// Write amplitude, phase, density and momentum fields of the initial state.
    Decompose(Common),
    /// Run the continuity, fluctuation, action and Schrödinger checks.
    Verify(Common),
    /// Evolve a walker ensemble and compare it with |ψ|².
    Walkers(Common),
    /// Coarse-time study around the state's clock period.
    Clock(Common),
    /// Every command above.
    All(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    SplitStep,
    CrankNicolson,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory (overrides the scenario's output_dir).
    #[arg(long, env = OUT_ENV)]
    out: Option<PathBuf>,
    /// Walker seed (overrides the scenario).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, value_enum, default_value_t = Profile::Default)]
    tolerance_profile: Profile,
    /// Write ψ every this many steps during evolve.
    #[arg(long)]
    snapshot_stride: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, c) = match cli.command {
        Sub::Evolve(c) => (Command::Evolve, c),
        Sub::Decompose(c) => (Command::Decompose, c),
        Sub::Verify(c) => (Command::Verify, c),
        Sub::Walkers(c) => (Command::Walkers, c),
        Sub::Clock(c) => (Command::Clock, c),
        Sub::All(c) => (Command::All, c),
    };
    let opts = RunOptions {
        command,
        scenario: c.scenario,
        out: c.out,
        seed: c.seed,
        method: c.method.map(|m| match m {
            MethodArg::SplitStep => Method::SplitStep,
            MethodArg::CrankNicolson => Method::CrankNicolson,
        }),
        dt: c.dt,
        profile: c.tolerance_profile,
        snapshot_stride: c.snapshot_stride,
    };
    match run(&opts) {
        Ok(summary) => {
            for check in summary.checks.iter().filter(|c| !c.passed) {
                eprintln!("FAIL {}: {:?} (bounds {:?}..{:?})", check.name, check.value, check.lower, check.upper);
            }
            if let Some(e) = &summary.error {
                eprintln!("error [{}]: {}", e.kind, e.message);
            }
            ExitCode::from(summary.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error [{}]: {e}", e.kind());
            ExitCode::from(2)
        }
    }
}
