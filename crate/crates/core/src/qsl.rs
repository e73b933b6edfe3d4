//! Minimal evolution times and the speed-limit bounds evaluated on sampled
//! trajectories.
//!
//! With `Θ_R(t) = arccos F_R(ρ_t, ρ0)` and a target angle `Θ`, the bounds read
//!
//! ```text
//! τ  ≥ ‖ρ0‖_HS sin²Θ / [ ½⟨‖H_t‖_Δ⟩_τ + ⟨‖D_t(ρ_t)‖_op⟩_τ ]          (bound_final1)
//! τ̂  ≥ ‖ρ0‖_HS sin²Θ / [ ½⟨‖H_t‖_Δ⟩_τ̂ + β·max_t ‖D_t(ρ_t)‖_op ]     (bound_final2)
//! ```
//!
//! where `τ̂` is the earliest time at which `Θ_R` reaches `Θ`.

use crate::error::{QslError, Result};
use crate::fidelity::{bures_fidelity, relative_purity_squared};
use crate::jc::{g_and_derivative, CouplingFrequency, JcParams};
use crate::matrix::{hs_norm, operator_norm, trace_norm};
use crate::trajectory::Trajectory;

/// Denominators below this are treated as "nothing evolves".
pub const DEGENERATE_TOL: f64 = 1e-14;
/// Relative tolerance when comparing maxima of `Θ_R`.
pub const MAX_TOL: f64 = 1e-6;
/// Largest eigenvalue of `ρ0` needed for the pure-state comparison bound.
pub const PURITY_TOL: f64 = 1e-6;

/// Norm used for the generator in the comparison bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormFlavor {
    #[default]
    Op,
    Tr,
    Hs,
}

impl NormFlavor {
    fn norm(self, a: &crate::matrix::ComplexMatrix) -> f64 {
        match self {
            NormFlavor::Op => operator_norm(a),
            NormFlavor::Tr => trace_norm(a),
            NormFlavor::Hs => hs_norm(a),
        }
    }
}

/// `F_R(ρ_t, ρ0)²` per grid time.
pub fn fidelity_squared_series(traj: &Trajectory) -> Result<Vec<f64>> {
    let rho0 = traj.initial_state();
    traj.states().iter().map(|r| relative_purity_squared(r, rho0)).collect()
}

fn angle(f_sq: f64) -> f64 {
    f_sq.clamp(0.0, 1.0).sqrt().acos()
}

/// `Θ_R(t) = arccos F_R(ρ_t, ρ0)` per grid time.
pub fn theta_r_series(traj: &Trajectory) -> Result<Vec<f64>> {
    Ok(fidelity_squared_series(traj)?.into_iter().map(angle).collect())
}

/// `Θ_R` at an arbitrary time, using that `F_R²` is linear in `ρ_t`.
pub fn theta_r_at(traj: &Trajectory, t: f64) -> Result<f64> {
    let (k, w) = traj.locate(t)?;
    let f = fidelity_squared_series_at(traj, k, w)?;
    Ok(angle(f))
}

fn fidelity_squared_series_at(traj: &Trajectory, k: usize, w: f64) -> Result<f64> {
    let rho0 = traj.initial_state();
    let a = relative_purity_squared(&traj.states()[k], rho0)?;
    if w == 0.0 {
        return Ok(a);
    }
    let b = relative_purity_squared(&traj.states()[k + 1], rho0)?;
    Ok((1.0 - w) * a + w * b)
}

/// Every time at which `Θ_R` equals the target, in increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSet {
    pub crossing_times: Vec<f64>,
}

impl TimeSet {
    pub fn tau_hat(&self) -> Option<f64> {
        self.crossing_times.first().copied()
    }

    pub fn len(&self) -> usize {
        self.crossing_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossing_times.is_empty()
    }
}

/// All crossings of `Θ_R(t) = target` and the earliest one, `τ̂`.
///
/// Crossings are bracketed by sign changes between grid samples and placed
/// by linear interpolation; a sample exactly on the target counts once.
/// A local maximum that stays below the target on the grid is refined by a
/// cubic through the neighbouring `F_R²` samples; if the refined peak reaches
/// the target, the two roots of the cubic are crossings too.
pub fn minimal_evolution_time(traj: &Trajectory, target: f64) -> Result<(TimeSet, f64)> {
    let f_sq = fidelity_squared_series(traj)?;
    let theta: Vec<f64> = f_sq.iter().map(|&x| angle(x)).collect();
    crossings(traj.times(), &theta, &f_sq, target)
}

fn crossings(times: &[f64], theta: &[f64], f_sq: &[f64], target: f64) -> Result<(TimeSet, f64)> {
    let mut max_theta = theta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let f: Vec<f64> = theta.iter().map(|x| x - target).collect();
    let f_target = target.cos().powi(2);
    let mut out = Vec::new();
    for k in 0..f.len() {
        if f[k] == 0.0 {
            // A run of exact hits is one crossing.
            if k == 0 || f[k - 1] != 0.0 {
                out.push(times[k]);
            }
        } else if k + 1 < f.len() && f[k + 1] != 0.0 && (f[k] < 0.0) != (f[k + 1] < 0.0) {
            let w = f[k] / (f[k] - f[k + 1]);
            out.push(times[k] + w * (times[k + 1] - times[k]));
        } else if f[k] < 0.0 && k > 0 && k + 1 < f.len() && f[k - 1] < f[k] && f[k + 1] < f[k] {
            if let Some(roots) = dip_roots(times, f_sq, k, f_target) {
                out.extend(roots);
                max_theta = max_theta.max(target);
            }
        }
    }
    if !(target >= 0.0) || target > max_theta || out.is_empty() {
        return Err(QslError::UnattainedTarget { target, max_theta });
    }
    let tau_hat = out[0];
    Ok((TimeSet { crossing_times: out }, tau_hat))
}

/// Crossings of `F_R² = f_target` inside `(t_{k−1}, t_{k+1})` for a grid
/// minimum of `F_R²` at `k`, from a cubic through four samples that leans
/// towards the side the minimum lies on.
fn dip_roots(times: &[f64], f_sq: &[f64], k: usize, f_target: f64) -> Option<[f64; 2]> {
    let lean_right = f_sq[k + 1] < f_sq[k - 1];
    let nodes: Vec<usize> = if lean_right && k + 2 < f_sq.len() {
        vec![k - 1, k, k + 1, k + 2]
    } else if !lean_right && k >= 2 {
        vec![k - 2, k - 1, k, k + 1]
    } else {
        vec![k - 1, k, k + 1]
    };
    let poly = |t: f64| -> f64 {
        nodes
            .iter()
            .map(|&i| {
                let w: f64 = nodes
                    .iter()
                    .filter(|&&j| j != i)
                    .map(|&j| (t - times[j]) / (times[i] - times[j]))
                    .product();
                w * f_sq[i]
            })
            .sum()
    };
    let (mut lo, mut hi) = (times[k - 1], times[k + 1]);
    for _ in 0..100 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if poly(m1) < poly(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let t_min = 0.5 * (lo + hi);
    if poly(t_min) > f_target {
        return None;
    }
    let root = |mut a: f64, mut b: f64| -> f64 {
        // `a` is above the target, `b` at or below it, or the reverse.
        let above = poly(a) > f_target;
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            if (poly(m) > f_target) == above {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    };
    Some([root(times[k - 1], t_min), root(t_min, times[k + 1])])
}

/// Time at which `Θ_R` first reaches its maximum over the window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauHatM {
    Attained {
        time: f64,
        theta: f64,
    },
    /// `Θ_R` is still rising at the end of the window.
    Unattained {
        theta_at_end: f64,
    },
}

impl TauHatM {
    pub fn time(&self) -> Option<f64> {
        match self {
            TauHatM::Attained { time, .. } => Some(*time),
            TauHatM::Unattained { .. } => None,
        }
    }
}

/// Vertex of the parabola through three equally spaced samples, as an
/// offset in units of the spacing together with the vertex value.
fn parabola_vertex(ym: f64, y0: f64, yp: f64) -> Option<(f64, f64)> {
    let curv = ym - 2.0 * y0 + yp;
    if curv == 0.0 {
        return None;
    }
    let s = 0.5 * (ym - yp) / curv;
    if s.abs() > 1.0 {
        return None;
    }
    Some((s, y0 - 0.25 * (ym - yp) * s))
}

/// Earliest time of the global maximum of `Θ_R`.
///
/// Each local maximum is refined by a parabola through `F_R²` at the
/// neighbouring samples. Maxima equal to the global one up to the grid
/// resolution of `Θ_R` are considered equal, and the earliest wins.
pub fn tau_hat_m(traj: &Trajectory) -> Result<TauHatM> {
    let f = fidelity_squared_series(traj)?;
    let t = traj.times();
    let theta: Vec<f64> = f.iter().map(|&x| angle(x)).collect();
    let n = theta.len();
    if n == 1 {
        return Ok(TauHatM::Attained {
            time: t[0],
            theta: theta[0],
        });
    }
    let mut candidates: Vec<(f64, f64, f64)> = Vec::new();
    for k in 0..n {
        let left = k == 0 || theta[k] >= theta[k - 1];
        let right = k + 1 == n || theta[k] >= theta[k + 1];
        if !(left && right) {
            continue;
        }
        let step = [k.checked_sub(1), (k + 1 < n).then_some(k + 1)]
            .into_iter()
            .flatten()
            .map(|j| (theta[j] - theta[k]).abs())
            .fold(0.0, f64::max);
        let (mut time, mut value) = (t[k], theta[k]);
        if k > 0 && k + 1 < n {
            let h = 0.5 * (t[k + 1] - t[k - 1]);
            if let Some((s, v)) = parabola_vertex(f[k - 1], f[k], f[k + 1]) {
                if v <= f[k] {
                    time = t[k] + s * h;
                    value = angle(v);
                }
            }
        }
        candidates.push((time, value, step));
    }
    let (_, best, _) = candidates
        .iter()
        .copied()
        .fold((0.0, f64::NEG_INFINITY, 0.0), |a, c| if c.1 > a.1 { c } else { a });
    let (time, value, _) = candidates
        .into_iter()
        .find(|&(_, v, step)| v >= best - MAX_TOL.max(step))
        .expect("at least one local maximum");
    if time == t[n - 1] && theta[n - 1] > theta[n - 2] {
        return Ok(TauHatM::Unattained {
            theta_at_end: theta[n - 1],
        });
    }
    Ok(TauHatM::Attained { time, theta: value })
}

/// `(1/τ)∫₀^τ v dt` by the trapezoidal rule; the last interval is cut at `τ`
/// with the integrand interpolated linearly. `τ = 0` yields `v(0)`.
pub fn time_average(times: &[f64], values: &[f64], tau: f64) -> Result<f64> {
    if times.len() != values.len() || times.is_empty() {
        return Err(QslError::dims(times.len(), values.len()));
    }
    let t0 = times[0];
    let t_end = *times.last().unwrap();
    let slack = 1e-12 * t_end.abs().max(1.0);
    if !(tau >= t0) || tau > t_end + slack {
        return Err(QslError::Domain(format!(
            "averaging window end {tau} outside [{t0}, {t_end}]"
        )));
    }
    let tau = tau.min(t_end);
    if tau == t0 {
        return Ok(values[0]);
    }
    let mut integral = 0.0;
    for k in 0..times.len() - 1 {
        let (a, b) = (times[k], times[k + 1]);
        if a >= tau {
            break;
        }
        if b <= tau {
            integral += 0.5 * (values[k] + values[k + 1]) * (b - a);
        } else {
            let w = (tau - a) / (b - a);
            let v = values[k] + w * (values[k + 1] - values[k]);
            integral += 0.5 * (values[k] + v) * (tau - a);
        }
    }
    Ok(integral / (tau - t0))
}

/// Grid maximum with a three-point parabolic refinement around the argmax.
pub fn max_refined(times: &[f64], values: &[f64]) -> (f64, f64) {
    let (k, &v) = values
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    if k == 0 || k + 1 == values.len() {
        return (times[k], v);
    }
    match parabola_vertex(values[k - 1], v, values[k + 1]) {
        Some((s, peak)) if peak >= v => (times[k] + s * 0.5 * (times[k + 1] - times[k - 1]), peak),
        _ => (times[k], v),
    }
}

fn numerator(traj: &Trajectory, theta: f64) -> f64 {
    hs_norm(traj.initial_state().matrix()) * theta.sin().powi(2)
}

fn check_denominator(denom: f64, what: &str) -> Result<()> {
    if !(denom > DEGENERATE_TOL) {
        return Err(QslError::DegenerateEvolution(format!("{what} denominator is {denom}")));
    }
    Ok(())
}

/// Speed limit on the driving time `τ` using time averages over `[0, τ]`.
pub fn bound_final1(traj: &Trajectory, tau: f64, theta: f64) -> Result<f64> {
    let t = traj.times();
    let h = time_average(t, traj.hamiltonian_spreads(), tau)?;
    let d = time_average(t, traj.dissipator_opnorms(), tau)?;
    let denom = 0.5 * h + d;
    check_denominator(denom, "driving-time bound")?;
    Ok(numerator(traj, theta) / denom)
}

/// Speed limit on `τ̂`: the Hamiltonian spread is averaged over
/// `[0, h_window]` and the dissipator enters through `β·max‖D_t‖_op` over
/// the whole stored window.
pub fn bound_final2(traj: &Trajectory, h_window: f64, theta: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(QslError::Domain(format!("beta must lie in (0, 1], got {beta}")));
    }
    let t = traj.times();
    let h = time_average(t, traj.hamiltonian_spreads(), h_window)?;
    let (_, dmax) = max_refined(t, traj.dissipator_opnorms());
    let denom = 0.5 * h + beta * dmax;
    check_denominator(denom, "minimal-time bound")?;
    Ok(numerator(traj, theta) / denom)
}

/// `⟨‖D_t‖_op⟩_τ̂ / max_t ‖D_t‖_op`, clamped to `(0, 1]`.
pub fn beta_estimate(traj: &Trajectory, tau_hat: f64) -> Result<f64> {
    let t = traj.times();
    let (_, dmax) = max_refined(t, traj.dissipator_opnorms());
    check_denominator(dmax, "beta")?;
    let avg = time_average(t, traj.dissipator_opnorms(), tau_hat)?;
    Ok((avg / dmax).clamp(f64::MIN_POSITIVE, 1.0))
}

/// Pure-state comparison bound `sin²Θ_B(ρ0, ρ_τ) / ⟨‖L_t(ρ_t)‖⟩_τ`, with
/// `L_t(ρ_t) = ρ̇_t` the full generator.
pub fn bound_previous(traj: &Trajectory, tau: f64, flavor: NormFlavor) -> Result<f64> {
    let rho0 = traj.initial_state();
    let top = rho0.eigensystem().values[0];
    if top < 1.0 - PURITY_TOL {
        return Err(QslError::InapplicableBound(format!(
            "initial state is mixed (largest eigenvalue {top})"
        )));
    }
    let rho_tau = traj.state_at(tau)?;
    let fb = bures_fidelity(rho0, &rho_tau)?.value;
    let norms: Vec<f64> = traj.generators().iter().map(|g| flavor.norm(g)).collect();
    let denom = time_average(traj.times(), &norms, tau)?;
    check_denominator(denom, "comparison bound")?;
    Ok((1.0 - fb * fb) / denom)
}

/// BLP non-Markovianity of the damped two-level channel over `[0, window]`.
///
/// For amplitude damping the optimal pair has trace distance `|G(t)|²`, so
/// the measure is the total rise of `|G|²`. Rises are delimited by roots of
/// `σ = d|G|²/dt = 2GĠ`, located by scanning and bisection.
pub fn blp_non_markovianity(params: &JcParams, window: f64) -> Result<f64> {
    if !(window >= 0.0) || !window.is_finite() {
        return Err(QslError::Domain(format!(
            "window must be finite and >= 0, got {window}"
        )));
    }
    let CouplingFrequency::Oscillatory(d) = params.big_d() else {
        return Ok(0.0);
    };
    let sigma = |t: f64| {
        let (g, gd) = g_and_derivative(t, params);
        2.0 * g * gd
    };
    let pop = |t: f64| g_and_derivative(t, params).0.powi(2);

    let h = (std::f64::consts::TAU / d / 256.0).min(window.max(f64::MIN_POSITIVE));
    let n = (window / h).ceil() as usize;
    let mut edges = vec![0.0];
    let mut prev = sigma(0.0);
    for k in 1..=n {
        let t = (k as f64 * h).min(window);
        let s = sigma(t);
        if s == 0.0 {
            edges.push(t);
        } else if prev != 0.0 && (s < 0.0) != (prev < 0.0) {
            let (mut a, mut b, mut fa) = ((k - 1) as f64 * h, t, prev);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let fm = sigma(m);
                if (fm < 0.0) == (fa < 0.0) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            edges.push(0.5 * (a + b));
        }
        prev = s;
    }
    edges.push(window);
    let total = edges
        .windows(2)
        .filter(|w| w[1] > w[0] && sigma(0.5 * (w[0] + w[1])) > 0.0)
        .map(|w| pop(w[1]) - pop(w[0]))
        .sum::<f64>();
    Ok(total.max(0.0))
}

/// Everything the bounds say about one trajectory driven for `tau_driving`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub theta_r: f64,
    pub tau_driving: f64,
    pub tau_hat: f64,
    pub crossings: TimeSet,
    pub tau_hat_m: TauHatM,
    pub bound_final1: f64,
    /// `bound_final2` with `β = 1`, Hamiltonian averaged over `[0, τ̂]`.
    pub bound_max: f64,
    /// `bound_final2` with the configured `beta`, Hamiltonian averaged over `[0, τ̂]`.
    pub bound_beta: f64,
    pub beta: f64,
    /// Same two bounds with the Hamiltonian averaged over `[0, τ]`.
    pub bound_max_driving_window: f64,
    pub bound_beta_driving_window: f64,
    pub beta_estimate: Option<f64>,
    /// `None` when the initial state is mixed.
    pub bound_previous: Option<f64>,
    pub non_markovianity: Option<f64>,
}

impl BoundReport {
    /// Bounds that must not exceed `τ̂` (up to `tol`), paired with their names.
    pub fn tau_hat_violations(&self, tol: f64) -> Vec<(&'static str, f64)> {
        [("bound_max", self.bound_max), ("bound_beta", self.bound_beta)]
            .into_iter()
            .filter(|&(_, b)| b > self.tau_hat + tol)
            .collect()
    }
}

/// Evaluates every bound for a trajectory driven up to `tau`.
pub fn analyze(traj: &Trajectory, tau: f64, beta: f64, flavor: NormFlavor) -> Result<BoundReport> {
    let theta = theta_r_at(traj, tau)?;
    let (crossings, tau_hat) = minimal_evolution_time(traj, theta)?;
    let bound_previous = match bound_previous(traj, tau, flavor) {
        Ok(b) => Some(b),
        Err(QslError::InapplicableBound(_)) => None,
        Err(e) => return Err(e),
    };
    let beta_estimate = match beta_estimate(traj, tau_hat) {
        Ok(b) => Some(b),
        Err(QslError::DegenerateEvolution(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(BoundReport {
        theta_r: theta,
        tau_driving: tau,
        tau_hat,
        crossings,
        tau_hat_m: tau_hat_m(traj)?,
        bound_final1: bound_final1(traj, tau, theta)?,
        bound_max: bound_final2(traj, tau_hat, theta, 1.0)?,
        bound_beta: bound_final2(traj, tau_hat, theta, beta)?,
        beta,
        bound_max_driving_window: bound_final2(traj, tau, theta, 1.0)?,
        bound_beta_driving_window: bound_final2(traj, tau, theta, beta)?,
        beta_estimate,
        bound_previous,
        non_markovianity: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jc::jc_trajectory;
    use crate::matrix::{ComplexMatrix, DensityMatrix};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn excited() -> DensityMatrix {
        DensityMatrix::diagonal(&[1.0, 0.0]).unwrap()
    }

    fn jc(gamma0: f64, t_final: f64) -> Trajectory {
        let p = JcParams::with_unit_frequency(gamma0, 1.0).unwrap();
        jc_trajectory(&excited(), &p, t_final, p.recommended_steps(t_final)).unwrap()
    }

    fn synthetic(norms: &[f64]) -> Trajectory {
        let n = norms.len();
        let rho = excited();
        let d: Vec<ComplexMatrix> = norms.iter().map(|&x| ComplexMatrix::from_real_diag(&[-x, x])).collect();
        Trajectory::new(
            (0..n).map(|k| k as f64 * 0.1).collect(),
            vec![rho; n],
            d.clone(),
            vec![0.0; n],
            d,
        )
        .unwrap()
    }

    #[test]
    fn theta_starts_at_zero_and_hits_right_angle() {
        let traj = jc(10.0, 2.0);
        let theta = theta_r_series(&traj).unwrap();
        assert_eq!(theta[0], 0.0);
        let t_star = JcParams::with_unit_frequency(10.0, 1.0)
            .unwrap()
            .first_population_zero()
            .unwrap();
        assert!((theta_r_at(&traj, t_star).unwrap() - FRAC_PI_2).abs() < 2e-2);
    }

    #[test]
    fn weak_endpoint_target_has_single_crossing() {
        let traj = jc(0.4, 10.0);
        let target = theta_r_at(&traj, 10.0).unwrap();
        let (set, tau_hat) = minimal_evolution_time(&traj, target).unwrap();
        assert_eq!(set.len(), 1);
        assert!((tau_hat - 10.0).abs() < 1e-9);
    }

    #[test]
    fn strong_target_has_many_crossings() {
        let traj = jc(10.0, 10.0);
        let target = theta_r_at(&traj, 10.0).unwrap();
        let (set, tau_hat) = minimal_evolution_time(&traj, target).unwrap();
        assert!(set.len() > 2);
        assert!(tau_hat < 1.0);
        assert!(set.crossing_times.windows(2).all(|w| w[0] < w[1]));
        assert!((set.crossing_times.last().unwrap() - 10.0).abs() < 1e-9);
    }

    #[test]
    fn unattained_target_is_an_error() {
        let traj = jc(0.4, 1.0);
        match minimal_evolution_time(&traj, 1.5) {
            Err(QslError::UnattainedTarget { max_theta, .. }) => assert!(max_theta < 1.5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn crossing_ties_resolve_to_earlier_node() {
        let times = [0.0, 1.0, 2.0, 3.0];
        let theta = [0.0f64, 0.5, 0.5, 1.0];
        let f_sq: Vec<f64> = theta.iter().map(|t| t.cos().powi(2)).collect();
        let (set, tau_hat) = crossings(&times, &theta, &f_sq, 0.5).unwrap();
        assert_eq!(tau_hat, 1.0);
        assert_eq!(set.crossing_times, vec![1.0]);
        let (_, t) = crossings(&times, &theta, &f_sq, 0.25).unwrap();
        assert!((t - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dip_between_samples_is_found() {
        // F² = (t − 1.03)² + 1e-4 dips to its minimum between samples.
        let times: Vec<f64> = (0..=30).map(|k| k as f64 * 0.1).collect();
        let f_sq: Vec<f64> = times.iter().map(|t| ((t - 1.03f64).powi(2) + 1e-4).min(1.0)).collect();
        let theta: Vec<f64> = f_sq.iter().map(|&x| angle(x)).collect();
        let target = angle(5e-4);
        assert!(theta.iter().all(|&x| x < target));
        let (set, tau_hat) = crossings(&times, &theta, &f_sq, target).unwrap();
        assert!((tau_hat - 1.01).abs() < 1e-9, "{tau_hat}");
        assert_eq!(set.len(), 2);
        assert!((set.crossing_times[1] - 1.05).abs() < 1e-9);
    }

    #[test]
    fn tau_hat_m_cases() {
        let p = JcParams::with_unit_frequency(10.0, 1.0).unwrap();
        let zero = p.first_population_zero().unwrap();
        match tau_hat_m(&jc(10.0, 10.0)).unwrap() {
            TauHatM::Attained { time, theta } => {
                assert!((time - zero).abs() < 1e-3, "{time} vs {zero}");
                assert!((theta - FRAC_PI_2).abs() < 1e-2);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(tau_hat_m(&jc(0.4, 10.0)).unwrap(), TauHatM::Unattained { .. }));
        let ground = DensityMatrix::diagonal(&[0.0, 1.0]).unwrap();
        let traj = jc_trajectory(&ground, &p, 1.0, 50).unwrap();
        assert_eq!(tau_hat_m(&traj).unwrap().time(), Some(0.0));
    }

    #[test]
    fn time_average_rules() {
        let t = [0.0, 1.0, 2.0];
        let v = [0.0, 2.0, 2.0];
        assert!((time_average(&t, &v, 2.0).unwrap() - 1.5).abs() < 1e-15);
        assert!((time_average(&t, &v, 1.0).unwrap() - 1.0).abs() < 1e-15);
        // Partial interval: ∫₀^0.5 2t dt = 0.25.
        assert!((time_average(&t, &v, 0.5).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(time_average(&t, &v, 0.0).unwrap(), 0.0);
        assert!(time_average(&t, &v, 3.0).is_err());
    }

    #[test]
    fn max_refinement_recovers_peak() {
        let t: Vec<f64> = (0..=40).map(|k| k as f64 * 0.1).collect();
        let v: Vec<f64> = t.iter().map(|x| 2.0 - (x - 1.234f64).powi(2)).collect();
        let (tm, vm) = max_refined(&t, &v);
        assert!((tm - 1.234).abs() < 1e-12);
        assert!((vm - 2.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_and_inapplicable_cases() {
        let traj = synthetic(&[0.0; 5]);
        assert!(matches!(
            bound_final1(&traj, 0.4, 0.3),
            Err(QslError::DegenerateEvolution(_))
        ));
        assert!(matches!(
            bound_final2(&traj, 0.4, 0.3, 1.0),
            Err(QslError::DegenerateEvolution(_))
        ));
        assert!(matches!(
            beta_estimate(&traj, 0.4),
            Err(QslError::DegenerateEvolution(_))
        ));
        assert!(matches!(
            bound_previous(&traj, 0.4, NormFlavor::Op),
            Err(QslError::DegenerateEvolution(_))
        ));
        assert!(bound_final2(&synthetic(&[1.0; 3]), 0.1, 0.3, 0.0).is_err());
        assert!(bound_final2(&synthetic(&[1.0; 3]), 0.1, 0.3, 1.5).is_err());

        let mixed = DensityMatrix::diagonal(&[0.7, 0.3]).unwrap();
        let p = JcParams::with_unit_frequency(10.0, 1.0).unwrap();
        let traj = jc_trajectory(&mixed, &p, 1.0, 100).unwrap();
        assert!(matches!(
            bound_previous(&traj, 1.0, NormFlavor::Op),
            Err(QslError::InapplicableBound(_))
        ));
        assert!(analyze(&traj, 1.0, 1.0, NormFlavor::Op)
            .unwrap()
            .bound_previous
            .is_none());
    }

    #[test]
    fn constant_norm_gives_unit_beta() {
        let traj = synthetic(&[0.7; 10]);
        assert!((beta_estimate(&traj, 0.5).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pure_diagonal_reduction() {
        // H-term zero: bound_final1 is sin²Θ over the mean dissipator norm.
        let traj = jc(0.4, 5.0);
        let theta = theta_r_at(&traj, 5.0).unwrap();
        let mean = time_average(traj.times(), traj.dissipator_opnorms(), 5.0).unwrap();
        let b = bound_final1(&traj, 5.0, theta).unwrap();
        assert!((b - theta.sin().powi(2) / mean).abs() < 1e-12);
    }

    #[test]
    fn strong_jc_bounds_are_valid() {
        let traj = jc(10.0, 10.0);
        let r = analyze(&traj, 10.0, 2.0 / PI, NormFlavor::Op).unwrap();
        assert!(r.bound_max <= r.tau_hat + 1e-9);
        assert!(r.bound_beta <= r.tau_hat + 1e-9);
        assert!(r.bound_max <= r.bound_beta);
        assert!(r.bound_final1 <= r.tau_driving);
        assert!(r.tau_hat_violations(1e-9).is_empty());
    }

    /// `|G|²` at its revival peaks `t = 2πk/D` is `e^{−2πkλ/D}`; the rises
    /// start from the zeros of `G`.
    fn blp_oracle(p: &JcParams, window: f64) -> f64 {
        let CouplingFrequency::Oscillatory(d) = p.big_d() else {
            return 0.0;
        };
        (1..=p.poles(window).len())
            .map(|k| {
                let end = (2.0 * PI * k as f64 / d).min(window);
                crate::jc::g_amplitude(end, p).unwrap().powi(2)
            })
            .sum()
    }

    #[test]
    fn blp_matches_revival_sum() {
        let weak = JcParams::with_unit_frequency(0.4, 1.0).unwrap();
        assert_eq!(blp_non_markovianity(&weak, 60.0).unwrap(), 0.0);
        let crit = JcParams::with_unit_frequency(0.5, 1.0).unwrap();
        assert_eq!(blp_non_markovianity(&crit, 60.0).unwrap(), 0.0);
        for (g0, window) in [(10.0, 10.0), (10.0, 60.0), (0.6, 60.0), (3.0, 2.7)] {
            let p = JcParams::with_unit_frequency(g0, 1.0).unwrap();
            let n = blp_non_markovianity(&p, window).unwrap();
            let oracle = blp_oracle(&p, window);
            assert!((n - oracle).abs() < 1e-9, "γ0={g0}: {n} vs {oracle}");
            assert!(n > 0.0);
        }
        // Infinite-window geometric series.
        let p = JcParams::with_unit_frequency(10.0, 1.0).unwrap();
        let d = 19f64.sqrt();
        let series = 1.0 / ((2.0 * PI / d).exp() - 1.0);
        assert!((blp_non_markovianity(&p, 200.0).unwrap() - series).abs() < 1e-9);
    }
}
