use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qsl_cli::config::{Flavor, Kind, Spread};
use qsl_cli::{run, Command, Overrides};

#[derive(Parser)]
#[command(name = "qsl", version, about = "Quantum speed limits for open two-level systems")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// JSON run configuration; flags take precedence over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Seed for dot-run (replaces the seed list) or ineq-check.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Comma-separated β values.
    #[arg(long, global = true, value_delimiter = ',')]
    beta: Option<Vec<f64>>,

    #[arg(long, global = true, value_enum)]
    norm_flavor: Option<Flavor>,

    #[arg(long, global = true, value_enum)]
    h_spread: Option<Spread>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sweep the coupling strength of the damped two-level model.
    JcSweep,
    /// Dump one excited-state trajectory of the damped two-level model.
    JcTrajectory {
        #[arg(long)]
        gamma0: Option<f64>,
        #[arg(long)]
        t_final: Option<f64>,
    },
    /// Run the spin/quantum-dot model for every configured seed.
    DotRun {
        #[arg(long, value_enum)]
        kind: Option<Kind>,
    },
    /// Randomised checks of the trace and commutator inequalities.
    IneqCheck {
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        max_dim: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut o = Overrides {
        out: cli.out,
        jobs: cli.jobs,
        seed: cli.seed,
        beta: cli.beta,
        norm_flavor: cli.norm_flavor,
        h_spread: cli.h_spread,
        ..Default::default()
    };
    let cmd = match cli.command {
        Cmd::JcSweep => Command::JcSweep,
        Cmd::JcTrajectory { gamma0, t_final } => {
            o.gamma0 = gamma0;
            o.t_final = t_final;
            Command::JcTrajectory
        }
        Cmd::DotRun { kind } => {
            o.kind = kind;
            Command::DotRun
        }
        Cmd::IneqCheck { trials, max_dim } => {
            o.trials = trials;
            o.max_dim = max_dim;
            Command::IneqCheck
        }
    };
    match run(cmd, cli.config.as_deref(), &o) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
