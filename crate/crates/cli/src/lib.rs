//! Front end for `qsl-core`: parameter sweeps of the damped two-level model,
//! single trajectories, dot-model ensembles and inequality campaigns, written
//! as CSV, SVG and plain-text reports.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod svg;

use std::path::PathBuf;

pub use config::RunConfig;
pub use error::CliError;

use config::{Flavor, Kind, Spread};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    JcSweep,
    JcTrajectory,
    DotRun,
    IneqCheck,
}

/// Values given on the command line; each one replaces the config field.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub seed: Option<u64>,
    pub beta: Option<Vec<f64>>,
    pub norm_flavor: Option<Flavor>,
    pub h_spread: Option<Spread>,
    pub gamma0: Option<f64>,
    pub t_final: Option<f64>,
    pub kind: Option<Kind>,
    pub trials: Option<usize>,
    pub max_dim: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, cmd: Command, cfg: &mut RunConfig) -> Result<(), CliError> {
        if let Some(o) = &self.out {
            cfg.out_dir = o.clone();
        }
        if let Some(j) = self.jobs {
            cfg.jobs = j;
        }
        if let Some(f) = self.norm_flavor {
            cfg.norm_flavor = f;
        }
        if let Some(s) = self.h_spread {
            cfg.h_spread = s;
        }
        if let Some(k) = self.kind {
            cfg.dot.kind = k;
        }
        if let Some(g) = self.gamma0 {
            cfg.jc.gamma0 = g;
        }
        if let Some(t) = self.t_final {
            cfg.jc.t_final = t;
        }
        if let Some(n) = self.trials {
            cfg.ineq.trials = n;
        }
        if let Some(n) = self.max_dim {
            cfg.ineq.max_dim = n;
        }
        if let Some(s) = self.seed {
            match cmd {
                Command::DotRun => cfg.dot.seeds = vec![s],
                Command::IneqCheck => cfg.ineq.seed = s,
                _ => {}
            }
        }
        if let Some(b) = &self.beta {
            match cmd {
                Command::JcSweep => match b.as_slice() {
                    [x] => cfg.jc.beta = *x,
                    _ => return Err(CliError::Config("jc-sweep takes a single --beta value".into())),
                },
                _ => cfg.betas = b.clone(),
            }
        }
        Ok(())
    }
}

/// Resolves the configuration (flag > file > default) and runs `cmd`.
pub fn run(
    cmd: Command,
    config_path: Option<&std::path::Path>,
    overrides: &Overrides,
) -> Result<Vec<PathBuf>, CliError> {
    let mut cfg = match config_path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    overrides.apply(cmd, &mut cfg)?;
    execute(cmd, &cfg)
}

pub fn execute(cmd: Command, cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    cfg.validate()?;
    match cmd {
        Command::JcSweep => commands::cmd_jc_sweep(cfg),
        Command::JcTrajectory => commands::cmd_jc_trajectory(cfg),
        Command::DotRun => commands::cmd_dot_run(cfg),
        Command::IneqCheck => commands::cmd_ineq_check(cfg),
    }
}
