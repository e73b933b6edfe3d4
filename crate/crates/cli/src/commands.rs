use std::fmt::Write;
use std::path::{Path, PathBuf};

use qsl_core::dot::{dot_trajectory, HamiltonianSpread};
use qsl_core::inequality::{run_campaign, CampaignReport};
use qsl_core::jc::{gamma_rate, jc_trajectory, Regime};
use qsl_core::matrix::DensityMatrix;
use qsl_core::qsl::{
    analyze, beta_estimate, blp_non_markovianity, bound_final1, bound_final2, bound_previous, max_refined,
    minimal_evolution_time, tau_hat_m, theta_r_at, theta_r_series, NormFlavor,
};
use rayon::prelude::*;

use crate::config::{Flavor, IneqConfig, JcConfig, RunConfig, Spread};
use crate::error::CliError;
use crate::format::{mean_std, num, opt, sig, write_csv, write_text};
use crate::svg::{Chart, Series, PALETTE};

/// Relative slack allowed when re-checking `bound ≤ τ̂` before rows are
/// written. Monotone pure-state decay saturates the driving-time bound, so
/// the quadrature error of the time averages shows up directly.
pub const VALIDITY_TOL: f64 = 1e-4;

/// β-bounds are only claimed valid from this coupling ratio `γ0/λ` on.
pub const BETA_VALID_RATIO: f64 = 2.0;

fn pool(jobs: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {jobs} workers: {e}")))
}

fn prepare_out(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(CliError::io(dir))
}

fn excited() -> DensityMatrix {
    DensityMatrix::diagonal(&[1.0, 0.0]).expect("valid state")
}

/// Absolute slack allowed when checking a bound against `reference`.
pub fn slack(reference: f64) -> f64 {
    VALIDITY_TOL * reference.abs() + 1e-12
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub gamma0: f64,
    pub lambda: f64,
    pub tau: f64,
    pub theta_r: f64,
    pub tau_hat: f64,
    pub tau_hat_m: Option<f64>,
    pub bound_previous: Option<f64>,
    pub bound_max: f64,
    pub bound_beta: f64,
    pub beta: f64,
    pub non_markovianity: f64,
    pub bound_final1: f64,
    pub beta_estimate: Option<f64>,
}

pub const SWEEP_HEADER: [&str; 13] = [
    "gamma0",
    "lambda",
    "tau",
    "theta_r",
    "tau_hat",
    "tau_hat_m",
    "bound_previous",
    "bound_max",
    "bound_beta",
    "beta",
    "non_markovianity",
    "bound_final1",
    "beta_estimate",
];

impl SweepRow {
    pub fn record(&self) -> Vec<String> {
        vec![
            num(self.gamma0),
            num(self.lambda),
            num(self.tau),
            num(self.theta_r),
            num(self.tau_hat),
            opt(self.tau_hat_m),
            opt(self.bound_previous),
            num(self.bound_max),
            num(self.bound_beta),
            num(self.beta),
            num(self.non_markovianity),
            num(self.bound_final1),
            opt(self.beta_estimate),
        ]
    }

    /// The bounds the theory guarantees for this row.
    pub fn check(&self) -> Result<(), CliError> {
        let mut bad = Vec::new();
        if self.bound_max > self.tau_hat + slack(self.tau_hat) {
            bad.push(format!("bound_max {} > tau_hat {}", self.bound_max, self.tau_hat));
        }
        let beta_claimed = self.beta == 1.0 || self.gamma0 / self.lambda >= BETA_VALID_RATIO;
        if beta_claimed && self.bound_beta > self.tau_hat + slack(self.tau_hat) {
            bad.push(format!("bound_beta {} > tau_hat {}", self.bound_beta, self.tau_hat));
        }
        if self.bound_final1 > self.tau + slack(self.tau) {
            bad.push(format!("bound_final1 {} > tau {}", self.bound_final1, self.tau));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(CliError::Contract(format!(
                "gamma0 = {}: {}",
                self.gamma0,
                bad.join("; ")
            )))
        }
    }
}

/// One point of the `γ0` sweep, starting from the excited state.
pub fn sweep_row(cfg: &JcConfig, gamma0: f64, flavor: NormFlavor) -> Result<SweepRow, CliError> {
    let p = cfg.params(gamma0)?;
    let traj = jc_trajectory(&excited(), &p, cfg.tau, cfg.steps(&p, cfg.tau))?;
    let r = analyze(&traj, cfg.tau, cfg.beta, flavor)?;
    Ok(SweepRow {
        gamma0,
        lambda: cfg.lambda,
        tau: cfg.tau,
        theta_r: r.theta_r,
        tau_hat: r.tau_hat,
        tau_hat_m: r.tau_hat_m.time(),
        bound_previous: r.bound_previous,
        bound_max: r.bound_max,
        bound_beta: r.bound_beta,
        beta: r.beta,
        non_markovianity: blp_non_markovianity(&p, cfg.window())?,
        bound_final1: r.bound_final1,
        beta_estimate: r.beta_estimate,
    })
}

/// Sweep rows in grid order, evaluated on `jobs` workers.
pub fn jc_sweep_rows(cfg: &JcConfig, flavor: NormFlavor, jobs: usize) -> Result<Vec<SweepRow>, CliError> {
    let grid = cfg.grid();
    pool(jobs)?.install(|| grid.par_iter().map(|&g| sweep_row(cfg, g, flavor)).collect())
}

pub fn sweep_chart(rows: &[SweepRow]) -> Chart {
    let pts = |f: &dyn Fn(&SweepRow) -> Option<f64>| -> Vec<(f64, f64)> {
        rows.iter().map(|r| (r.gamma0, f(r).unwrap_or(f64::NAN))).collect()
    };
    let beta = rows.first().map(|r| r.beta).unwrap_or(1.0);
    Chart {
        title: "Minimal evolution time and speed limits".into(),
        x_label: "gamma0 / lambda".into(),
        y_label: "time  (N: dimensionless)".into(),
        log_x: true,
        series: vec![
            Series::new("tau_hat", PALETTE[0], pts(&|r| Some(r.tau_hat))),
            Series::new("bound beta=1", PALETTE[1], pts(&|r| Some(r.bound_max))),
            Series::new(
                format!("bound beta={}", sig(beta, 3)),
                PALETTE[2],
                pts(&|r| Some(r.bound_beta)),
            )
            .dashed(),
            Series::new("previous bound", PALETTE[3], pts(&|r| r.bound_previous)).dashed(),
            Series::new("N", PALETTE[4], pts(&|r| Some(r.non_markovianity))),
        ],
    }
}

pub fn cmd_jc_sweep(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let rows = jc_sweep_rows(&cfg.jc, cfg.norm_flavor.into(), cfg.jobs)?;
    for r in &rows {
        r.check()?;
    }
    prepare_out(&cfg.out_dir)?;
    let csv = cfg.out_dir.join("jc_sweep.csv");
    let header: Vec<String> = SWEEP_HEADER.iter().map(|s| s.to_string()).collect();
    write_csv(&csv, &header, &rows.iter().map(SweepRow::record).collect::<Vec<_>>())?;
    let svg = cfg.out_dir.join("jc_sweep.svg");
    write_text(&svg, &sweep_chart(&rows).render())?;
    Ok(vec![csv, svg])
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub rho11: f64,
    pub theta_r: f64,
    pub dissipator_opnorm: f64,
    /// Missing at the poles of the rate.
    pub gamma_rate: Option<f64>,
}

pub const TRAJECTORY_HEADER: [&str; 5] = ["t", "rho11", "theta_r", "dissipator_opnorm", "gamma_rate"];

/// Excited-state trajectory and, when the population reaches zero, the first such time.
pub fn jc_trajectory_rows(cfg: &JcConfig) -> Result<(Vec<TrajectoryRow>, Option<f64>), CliError> {
    let p = cfg.params(cfg.gamma0)?;
    let traj = jc_trajectory(&excited(), &p, cfg.t_final, cfg.steps(&p, cfg.t_final))?;
    let theta = theta_r_series(&traj)?;
    let rows = traj
        .times()
        .iter()
        .zip(traj.states())
        .zip(&theta)
        .zip(traj.dissipator_opnorms())
        .map(|(((&t, rho), &th), &d)| TrajectoryRow {
            t,
            rho11: rho.matrix()[(0, 0)].re,
            theta_r: th,
            dissipator_opnorm: d,
            gamma_rate: gamma_rate(t, &p).ok(),
        })
        .collect();
    let marker = match p.regime() {
        Regime::Strong => tau_hat_m(&traj)?.time(),
        _ => None,
    };
    Ok((rows, marker))
}

pub fn cmd_jc_trajectory(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let (rows, marker) = jc_trajectory_rows(&cfg.jc)?;
    prepare_out(&cfg.out_dir)?;
    let csv = cfg.out_dir.join("jc_trajectory.csv");
    let header: Vec<String> = TRAJECTORY_HEADER.iter().map(|s| s.to_string()).collect();
    let records: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                num(r.t),
                num(r.rho11),
                num(r.theta_r),
                num(r.dissipator_opnorm),
                opt(r.gamma_rate),
            ]
        })
        .collect();
    write_csv(&csv, &header, &records)?;

    let mut text = String::new();
    let _ = writeln!(
        text,
        "gamma0 = {}, lambda = {}, t_final = {}",
        num(cfg.jc.gamma0),
        num(cfg.jc.lambda),
        num(cfg.jc.t_final)
    );
    match marker {
        Some(t) => {
            let _ = writeln!(text, "rho11 first reaches 0 at t = {}", num(t));
        }
        None => {
            let _ = writeln!(text, "rho11 does not reach 0 in the window");
        }
    }
    let report = cfg.out_dir.join("jc_trajectory.txt");
    write_text(&report, &text)?;

    let svg = cfg.out_dir.join("jc_trajectory.svg");
    let chart = Chart {
        title: format!("Excited population, gamma0 = {}", sig(cfg.jc.gamma0, 4)),
        x_label: "t".into(),
        y_label: "".into(),
        log_x: false,
        series: vec![
            Series::new("rho11", PALETTE[0], rows.iter().map(|r| (r.t, r.rho11)).collect()),
            Series::new(
                "|D_t|_op",
                PALETTE[4],
                rows.iter().map(|r| (r.t, r.dissipator_opnorm)).collect(),
            ),
        ],
    };
    write_text(&svg, &chart.render())?;
    Ok(vec![csv, report, svg])
}

/// Bounds of one `‖H‖_Δ` convention.
#[derive(Debug, Clone, PartialEq)]
pub struct ConventionBounds {
    pub spread: Spread,
    pub bound_final1: f64,
    /// `(β, Hamiltonian averaged over [0, τ̂], over [0, τ])`.
    pub bounds: Vec<(f64, f64, f64)>,
}

impl ConventionBounds {
    pub fn at(&self, beta: f64) -> Option<f64> {
        self.bounds.iter().find(|b| b.0 == beta).map(|b| b.1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DotSeedResult {
    pub seed: u64,
    pub theta_r: f64,
    pub tau_hat: f64,
    pub tau_hat_m: Option<f64>,
    pub beta_estimate: Option<f64>,
    pub max_dissipator: f64,
    pub bound_previous: Option<f64>,
    /// Comparison bound under every generator norm.
    pub previous_by_flavor: Vec<(Flavor, f64)>,
    /// Configured convention first.
    pub conventions: [ConventionBounds; 2],
    pub times: Vec<f64>,
    pub theta_series: Vec<f64>,
    pub opnorms: Vec<f64>,
    pub max_norm_drift: f64,
    pub max_energy_drift: f64,
}

impl DotSeedResult {
    pub fn primary(&self) -> &ConventionBounds {
        &self.conventions[0]
    }

    pub fn check(&self) -> Result<(), CliError> {
        for c in &self.conventions {
            if let Some(b) = c.at(1.0) {
                if b > self.tau_hat + slack(self.tau_hat) {
                    return Err(CliError::Contract(format!(
                        "seed {}: beta = 1 bound {b} exceeds tau_hat {} ({} spread)",
                        self.seed,
                        self.tau_hat,
                        c.spread.name()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// All β values in the config plus 1, which is always evaluated.
fn betas_with_unit(betas: &[f64]) -> Vec<f64> {
    let mut out = betas.to_vec();
    if !out.contains(&1.0) {
        out.insert(0, 1.0);
    }
    out
}

pub fn dot_seed(cfg: &RunConfig, seed: u64) -> Result<DotSeedResult, CliError> {
    let d = &cfg.dot;
    let params = d.params(seed)?;
    let run = dot_trajectory(&params, d.kind.into(), d.tau, d.n_steps, cfg.h_spread.into())?;
    let traj = run.trajectory;
    let flavor: NormFlavor = cfg.norm_flavor.into();
    let theta = theta_r_at(&traj, d.tau)?;
    let (_, tau_hat) = minimal_evolution_time(&traj, theta)?;
    let betas = betas_with_unit(&cfg.betas);

    let spreads_on = traj.hamiltonian_spreads()[0] != 0.0;
    let mut conventions = Vec::with_capacity(2);
    let mut current = traj.clone();
    for spread in [cfg.h_spread, cfg.h_spread.other()] {
        let value = if spreads_on {
            HamiltonianSpread::from(spread).value(params.delta_e)
        } else {
            0.0
        };
        current = current.with_hamiltonian_spreads(vec![value; traj.len()])?;
        let bounds = betas
            .iter()
            .map(|&b| {
                Ok((
                    b,
                    bound_final2(&current, tau_hat, theta, b)?,
                    bound_final2(&current, d.tau, theta, b)?,
                ))
            })
            .collect::<Result<Vec<_>, qsl_core::QslError>>()?;
        conventions.push(ConventionBounds {
            spread,
            bound_final1: bound_final1(&current, d.tau, theta)?,
            bounds,
        });
    }
    let conventions: [ConventionBounds; 2] = conventions.try_into().expect("two conventions");
    let result = DotSeedResult {
        seed,
        theta_r: theta,
        tau_hat,
        tau_hat_m: tau_hat_m(&traj)?.time(),
        beta_estimate: beta_estimate(&traj, tau_hat).ok(),
        max_dissipator: max_refined(traj.times(), traj.dissipator_opnorms()).1,
        bound_previous: Some(bound_previous(&traj, d.tau, flavor)?),
        previous_by_flavor: Flavor::ALL
            .iter()
            .map(|&f| Ok((f, bound_previous(&traj, d.tau, f.into())?)))
            .collect::<Result<_, qsl_core::QslError>>()?,
        conventions,
        times: traj.times().to_vec(),
        theta_series: theta_r_series(&traj)?,
        opnorms: traj.dissipator_opnorms().to_vec(),
        max_norm_drift: run.max_norm_drift,
        max_energy_drift: run.max_energy_drift,
    };
    Ok(result)
}

/// Every configured seed, in configuration order.
pub fn dot_results(cfg: &RunConfig) -> Result<Vec<DotSeedResult>, CliError> {
    pool(cfg.jobs)?.install(|| cfg.dot.seeds.par_iter().map(|&s| dot_seed(cfg, s)).collect())
}

fn bound_column(beta: f64) -> String {
    format!("bound_b{}", sig(beta, 6))
}

pub fn dot_summary_header(betas: &[f64]) -> Vec<String> {
    let mut h: Vec<String> = [
        "seed",
        "h_spread",
        "theta_r",
        "tau_hat",
        "tau_hat_m",
        "beta_estimate",
        "max_dissipator",
        "bound_previous",
        "bound_final1",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for &b in &betas_with_unit(betas) {
        h.push(bound_column(b));
        h.push(format!("{}_driving", bound_column(b)));
    }
    h
}

pub fn dot_summary_records(results: &[DotSeedResult]) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    for r in results {
        for c in &r.conventions {
            let mut row = vec![
                r.seed.to_string(),
                c.spread.name().to_string(),
                num(r.theta_r),
                num(r.tau_hat),
                opt(r.tau_hat_m),
                opt(r.beta_estimate),
                num(r.max_dissipator),
                opt(r.bound_previous),
                num(c.bound_final1),
            ];
            for &(_, a, b) in &c.bounds {
                row.push(num(a));
                row.push(num(b));
            }
            out.push(row);
        }
    }
    out
}

fn pm(xs: &[f64]) -> String {
    let (m, s) = mean_std(xs);
    format!("{} +- {}", sig(m, 6), sig(s, 3))
}

/// Plain-text ensemble report covering both `‖H‖_Δ` conventions.
pub fn dot_report(cfg: &RunConfig, results: &[DotSeedResult]) -> String {
    let d = &cfg.dot;
    let mut t = String::new();
    let _ = writeln!(
        t,
        "dot model, {} initial state: N1 = {}, N2 = {}, delta_eps = {}, delta_E = {}, coupling = {}, tau = {}, {} seeds",
        d.kind.name(),
        d.n1,
        d.n2,
        num(d.delta_eps),
        num(d.delta_e),
        num(d.coupling),
        num(d.tau),
        results.len()
    );
    let _ = writeln!(t, "configured h_spread: {}", cfg.h_spread.name());
    let _ = writeln!(t);
    for r in results {
        let _ = writeln!(
            t,
            "seed {}: theta_r = {}, tau_hat = {}, beta_est = {}, max|D| = {}, bound_previous = {}, norm drift = {}, energy drift = {}",
            r.seed,
            sig(r.theta_r, 6),
            sig(r.tau_hat, 6),
            r.beta_estimate.map(|b| sig(b, 4)).unwrap_or_default(),
            sig(r.max_dissipator, 6),
            r.bound_previous.map(|b| sig(b, 6)).unwrap_or_default(),
            sig(r.max_norm_drift, 2),
            sig(r.max_energy_drift, 2)
        );
        for c in &r.conventions {
            let bounds: Vec<String> = c
                .bounds
                .iter()
                .map(|(b, x, y)| format!("beta {}: {} (tau window {})", sig(*b, 4), sig(*x, 6), sig(*y, 6)))
                .collect();
            let _ = writeln!(
                t,
                "    {}: final1 = {}, {}",
                c.spread.name(),
                sig(c.bound_final1, 6),
                bounds.join(", ")
            );
        }
    }
    let col = |f: &dyn Fn(&DotSeedResult) -> Option<f64>| -> Vec<f64> { results.iter().filter_map(f).collect() };
    let _ = writeln!(t);
    let _ = writeln!(t, "ensemble mean +- stdev");
    let _ = writeln!(t, "  theta_r        {}", pm(&col(&|r| Some(r.theta_r))));
    let _ = writeln!(t, "  tau_hat        {}", pm(&col(&|r| Some(r.tau_hat))));
    let _ = writeln!(t, "  beta_estimate  {}", pm(&col(&|r| r.beta_estimate)));
    let _ = writeln!(t, "  max_dissipator {}", pm(&col(&|r| Some(r.max_dissipator))));
    let _ = writeln!(t, "  bound_previous {}", pm(&col(&|r| r.bound_previous)));
    let betas = betas_with_unit(&cfg.betas);
    for k in 0..2 {
        let name = results.first().map(|r| r.conventions[k].spread.name()).unwrap_or("");
        let _ = writeln!(
            t,
            "  [{name}] final1 {}",
            pm(&col(&|r| Some(r.conventions[k].bound_final1)))
        );
        for &b in &betas {
            let _ = writeln!(
                t,
                "  [{name}] beta {} bound {}",
                sig(b, 4),
                pm(&col(&|r| r.conventions[k].at(b)))
            );
        }
    }
    if let Some(reference) = d.reference_values() {
        let _ = writeln!(t);
        let _ = writeln!(
            t,
            "reference: theta_r = {}, tau_hat = {}, bound_previous = {}",
            num(reference.theta_r),
            num(reference.tau_hat),
            num(reference.bound_previous)
        );
        let mut scores = Vec::new();
        for k in 0..2 {
            let mut devs = Vec::new();
            for &(b, target) in &reference.bounds {
                let xs = col(&|r| r.conventions[k].at(b));
                if xs.is_empty() {
                    continue;
                }
                let m = mean_std(&xs).0;
                devs.push(((m - target) / target).abs());
                let _ = writeln!(
                    t,
                    "  [{}] beta {}: mean {} vs reference {} (relative deviation {})",
                    results[0].conventions[k].spread.name(),
                    sig(b, 4),
                    sig(m, 6),
                    num(target),
                    sig((m - target) / target, 3)
                );
            }
            if !devs.is_empty() {
                scores.push((
                    results[0].conventions[k].spread,
                    devs.iter().sum::<f64>() / devs.len() as f64,
                ));
            }
        }
        if let Some((best, score)) = scores.iter().copied().min_by(|a, b| a.1.total_cmp(&b.1)) {
            let _ = writeln!(
                t,
                "closest h_spread convention: {} (mean relative deviation {})",
                best.name(),
                sig(score, 3)
            );
        }
        let mut flavors = Vec::new();
        for f in Flavor::ALL {
            let xs = col(&|r| r.previous_by_flavor.iter().find(|(g, _)| *g == f).map(|x| x.1));
            if xs.is_empty() {
                continue;
            }
            let m = mean_std(&xs).0;
            let dev = (m - reference.bound_previous) / reference.bound_previous;
            let _ = writeln!(
                t,
                "  bound_previous [{}]: mean {} vs reference {} (relative deviation {})",
                f.name(),
                sig(m, 6),
                num(reference.bound_previous),
                sig(dev, 3)
            );
            flavors.push((f, dev.abs()));
        }
        if let Some((best, dev)) = flavors.iter().copied().min_by(|a, b| a.1.total_cmp(&b.1)) {
            let _ = writeln!(
                t,
                "closest norm flavor for bound_previous: {} (relative deviation {})",
                best.name(),
                sig(dev, 3)
            );
        }
    }
    t
}

pub fn cmd_dot_run(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let results = dot_results(cfg)?;
    for r in &results {
        r.check()?;
    }
    prepare_out(&cfg.out_dir)?;
    let kind = cfg.dot.kind.name();

    let series = cfg.out_dir.join(format!("dot_{kind}.csv"));
    let header: Vec<String> = ["seed", "t", "theta_r", "dissipator_opnorm"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut records = Vec::new();
    for r in &results {
        for ((t, th), d) in r.times.iter().zip(&r.theta_series).zip(&r.opnorms) {
            records.push(vec![r.seed.to_string(), num(*t), num(*th), num(*d)]);
        }
    }
    write_csv(&series, &header, &records)?;

    let summary = cfg.out_dir.join(format!("dot_{kind}_summary.csv"));
    write_csv(
        &summary,
        &dot_summary_header(&cfg.betas),
        &dot_summary_records(&results),
    )?;

    let report = cfg.out_dir.join(format!("dot_{kind}_report.txt"));
    write_text(&report, &dot_report(cfg, &results))?;

    let svg = cfg.out_dir.join(format!("dot_{kind}.svg"));
    let first = &results[0];
    let chart = Chart {
        title: format!("Dot model, {kind} start, seed {}", first.seed),
        x_label: "t".into(),
        y_label: "".into(),
        log_x: false,
        series: vec![
            Series::new(
                "Theta_R",
                PALETTE[0],
                first
                    .times
                    .iter()
                    .copied()
                    .zip(first.theta_series.iter().copied())
                    .collect(),
            ),
            Series::new(
                "|D_t|_op",
                PALETTE[4],
                first.times.iter().copied().zip(first.opnorms.iter().copied()).collect(),
            ),
        ],
    };
    write_text(&svg, &chart.render())?;
    Ok(vec![series, summary, report, svg])
}

pub fn ineq_report(cfg: &IneqConfig) -> (CampaignReport, String) {
    let report = run_campaign(cfg.trials, cfg.max_dim, cfg.seed);
    let mut t = String::new();
    let _ = writeln!(
        t,
        "inequality campaign: seed {}, dims 2..={}",
        report.seed, report.max_dim
    );
    let _ = writeln!(
        t,
        "{:<20} {:>8} {:>10} {:>16}",
        "inequality", "trials", "violations", "tightest ratio"
    );
    for s in &report.stats {
        let _ = writeln!(
            t,
            "{:<20} {:>8} {:>10} {:>16}",
            s.name,
            s.trials,
            s.violations,
            num(s.tightest_ratio)
        );
    }
    let w = report.witness;
    let _ = writeln!(
        t,
        "witness A = diag(2, 1), B = [[0.5, 0.5], [0.5, 0.5]]: |[A, B]|_op = {}, bound = {}, ratio = {}",
        num(w.lhs),
        num(w.rhs),
        num(w.ratio())
    );
    let _ = writeln!(t, "total violations: {}", report.total_violations());
    (report, t)
}

pub fn cmd_ineq_check(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let (report, text) = ineq_report(&cfg.ineq);
    prepare_out(&cfg.out_dir)?;
    let path = cfg.out_dir.join("ineq_report.txt");
    write_text(&path, &text)?;
    if report.total_violations() > 0 {
        return Err(CliError::Contract(format!(
            "{} inequality violations, see {}",
            report.total_violations(),
            path.display()
        )));
    }
    Ok(vec![path])
}
