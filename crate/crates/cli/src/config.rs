//! Run configuration. A JSON document supplies any subset of the fields;
//! command-line flags override it and everything else falls back to the
//! defaults below.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use qsl_core::dot::{DotParams, HamiltonianSpread, InitialState};
use qsl_core::jc::JcParams;
use qsl_core::qsl::NormFlavor;
use serde::{Deserialize, Serialize};

use crate::error::{config, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    #[default]
    Op,
    Tr,
    Hs,
}

impl Flavor {
    pub const ALL: [Flavor; 3] = [Flavor::Op, Flavor::Tr, Flavor::Hs];

    pub fn name(self) -> &'static str {
        match self {
            Flavor::Op => "op",
            Flavor::Tr => "tr",
            Flavor::Hs => "hs",
        }
    }
}

impl From<Flavor> for NormFlavor {
    fn from(f: Flavor) -> Self {
        match f {
            Flavor::Op => NormFlavor::Op,
            Flavor::Tr => NormFlavor::Tr,
            Flavor::Hs => NormFlavor::Hs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Spread {
    Full,
    #[default]
    Half,
}

impl Spread {
    pub fn other(self) -> Self {
        match self {
            Spread::Full => Spread::Half,
            Spread::Half => Spread::Full,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Spread::Full => "full",
            Spread::Half => "half",
        }
    }
}

impl From<Spread> for HamiltonianSpread {
    fn from(s: Spread) -> Self {
        match s {
            Spread::Full => HamiltonianSpread::Full,
            Spread::Half => HamiltonianSpread::Half,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    #[default]
    Excited,
    Coherent,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Excited => "excited",
            Kind::Coherent => "coherent",
        }
    }
}

impl From<Kind> for InitialState {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Excited => InitialState::Excited,
            Kind::Coherent => InitialState::Coherent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JcConfig {
    pub lambda: f64,
    pub omega0: f64,
    /// Driving time of the sweep.
    pub tau: f64,
    pub gamma0_min: f64,
    pub gamma0_max: f64,
    pub points: usize,
    /// Explicit sweep grid; replaces the log-spaced one when present.
    pub gamma0_grid: Option<Vec<f64>>,
    pub beta: f64,
    /// Window of the non-Markovianity integral; `60/λ` when absent.
    pub blp_window: Option<f64>,
    /// Coupling and window of `jc-trajectory`.
    pub gamma0: f64,
    pub t_final: f64,
    /// Grid intervals; chosen from the dynamical time scales when absent.
    pub n_steps: Option<usize>,
}

impl Default for JcConfig {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            omega0: 1.0,
            tau: 10.0,
            gamma0_min: 0.05,
            gamma0_max: 50.0,
            points: 120,
            gamma0_grid: None,
            beta: 2.0 / std::f64::consts::PI,
            blp_window: None,
            gamma0: 10.0,
            t_final: 10.0,
            n_steps: None,
        }
    }
}

impl JcConfig {
    /// Log-spaced grid from `gamma0_min` to `gamma0_max`, or the explicit one.
    pub fn grid(&self) -> Vec<f64> {
        if let Some(g) = &self.gamma0_grid {
            return g.clone();
        }
        if self.points == 1 {
            return vec![self.gamma0_min];
        }
        let ratio = self.gamma0_max / self.gamma0_min;
        (0..self.points)
            .map(|k| self.gamma0_min * ratio.powf(k as f64 / (self.points - 1) as f64))
            .collect()
    }

    pub fn params(&self, gamma0: f64) -> Result<JcParams, CliError> {
        JcParams::new(gamma0, self.lambda, self.omega0).map_err(config)
    }

    pub fn window(&self) -> f64 {
        self.blp_window.unwrap_or(60.0 / self.lambda)
    }

    pub fn steps(&self, p: &JcParams, t_final: f64) -> usize {
        self.n_steps.unwrap_or_else(|| p.recommended_steps(t_final))
    }

    fn validate(&self) -> Result<(), CliError> {
        let grid = self.grid();
        if grid.is_empty() {
            return Err(CliError::Config("empty gamma0 grid".into()));
        }
        for g in &grid {
            self.params(*g)?;
        }
        self.params(self.gamma0)?;
        if !(self.gamma0_min > 0.0 && self.gamma0_max >= self.gamma0_min) {
            return Err(CliError::Config(format!(
                "need 0 < gamma0_min <= gamma0_max, got {} and {}",
                self.gamma0_min, self.gamma0_max
            )));
        }
        positive("jc.tau", self.tau)?;
        positive("jc.t_final", self.t_final)?;
        unit_interval("jc.beta", self.beta)?;
        if let Some(w) = self.blp_window {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(CliError::Config(format!("jc.blp_window must be >= 0, got {w}")));
            }
        }
        if matches!(self.n_steps, Some(n) if n < 2) {
            return Err(CliError::Config("jc.n_steps must be >= 2".into()));
        }
        Ok(())
    }
}

/// Expected ensemble values the dot-model report is compared against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceValues {
    pub theta_r: f64,
    pub tau_hat: f64,
    pub bound_previous: f64,
    /// `(β, bound)` pairs.
    pub bounds: Vec<(f64, f64)>,
}

impl ReferenceValues {
    /// Published values for the default parameters of each initial state.
    pub fn builtin(kind: Kind) -> Self {
        match kind {
            Kind::Excited => Self {
                theta_r: 0.7707,
                tau_hat: 2.0,
                bound_previous: 5.1757,
                bounds: vec![(1.0, 1.4421), (0.72, 1.9905)],
            },
            Kind::Coherent => Self {
                theta_r: 0.7832,
                tau_hat: 0.2,
                bound_previous: 1.0242,
                bounds: vec![(1.0, 0.1130), (0.72, 0.1196)],
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DotConfig {
    pub n1: usize,
    pub n2: usize,
    pub delta_eps: f64,
    pub delta_e: f64,
    pub coupling: f64,
    pub tau: f64,
    pub n_steps: usize,
    pub kind: Kind,
    pub seeds: Vec<u64>,
    /// Falls back to the built-in values when the physical parameters are the defaults.
    pub reference: Option<ReferenceValues>,
}

impl Default for DotConfig {
    fn default() -> Self {
        Self {
            n1: 500,
            n2: 500,
            delta_eps: 0.5,
            delta_e: 10.0,
            coupling: 0.02,
            tau: 8.0,
            n_steps: 800,
            kind: Kind::Excited,
            seeds: (0..10).collect(),
            reference: None,
        }
    }
}

impl DotConfig {
    pub fn params(&self, seed: u64) -> Result<DotParams, CliError> {
        DotParams::new(self.n1, self.n2, self.delta_eps, self.delta_e, self.coupling, seed).map_err(config)
    }

    pub fn reference_values(&self) -> Option<ReferenceValues> {
        if self.reference.is_some() {
            return self.reference.clone();
        }
        let d = Self::default();
        let physical = (self.n1, self.n2, self.delta_eps, self.delta_e, self.coupling, self.tau);
        (physical == (d.n1, d.n2, d.delta_eps, d.delta_e, d.coupling, d.tau))
            .then(|| ReferenceValues::builtin(self.kind))
    }

    fn validate(&self) -> Result<(), CliError> {
        self.params(0)?;
        positive("dot.tau", self.tau)?;
        if self.n_steps < 2 {
            return Err(CliError::Config("dot.n_steps must be >= 2".into()));
        }
        if self.seeds.is_empty() {
            return Err(CliError::Config("dot.seeds must not be empty".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IneqConfig {
    pub trials: usize,
    pub max_dim: usize,
    pub seed: u64,
}

impl Default for IneqConfig {
    fn default() -> Self {
        Self {
            trials: 500,
            max_dim: 8,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub jc: JcConfig,
    pub dot: DotConfig,
    pub ineq: IneqConfig,
    /// β values of the dot-model bounds.
    pub betas: Vec<f64>,
    pub norm_flavor: Flavor,
    pub h_spread: Spread,
    pub out_dir: PathBuf,
    /// Worker threads; 0 uses every available core.
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            jc: JcConfig::default(),
            dot: DotConfig::default(),
            ineq: IneqConfig::default(),
            betas: vec![1.0, 0.72],
            norm_flavor: Flavor::Op,
            h_spread: Spread::Half,
            out_dir: PathBuf::from("out"),
            jobs: 0,
        }
    }
}

fn positive(name: &str, x: f64) -> Result<(), CliError> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(CliError::Config(format!("{name} must be positive, got {x}")));
    }
    Ok(())
}

fn unit_interval(name: &str, x: f64) -> Result<(), CliError> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(CliError::Config(format!("{name} must lie in (0, 1], got {x}")));
    }
    Ok(())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.jc.validate()?;
        self.dot.validate()?;
        if self.ineq.trials == 0 {
            return Err(CliError::Config("ineq.trials must be >= 1".into()));
        }
        if self.betas.is_empty() {
            return Err(CliError::Config("betas must not be empty".into()));
        }
        for b in &self.betas {
            unit_interval("beta", *b)?;
        }
        Ok(())
    }
}
