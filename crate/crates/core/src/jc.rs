//! Exact reduced dynamics of the damped Jaynes–Cummings model: a two-level
//! emitter resonantly coupled to a leaky cavity with a Lorentzian spectral
//! density of width `λ` and coupling strength `γ0`, starting from the vacuum.
//!
//! Everything is derived from the amplitude `G(t)` (`ρ_ee(t) = |G|²ρ_ee(0)`,
//! `ρ_eg(t) = G e^{−iω0 t} ρ_eg(0)`). The time-local rate `γ(t) = −2Ġ/G`
//! diverges wherever `G` crosses zero, so all stored quantities use the
//! products `γ|G|² = −2ĠG` and `γG = −2Ġ`, which stay finite.
//!
//! Basis order is `(|e>, |g>)`: index 0 is the excited level.

use num_complex::Complex64;

use crate::error::{QslError, Result};
use crate::matrix::{ComplexMatrix, DensityMatrix};
use crate::trajectory::Trajectory;

/// Relative width of the band treated as the critical point `γ0 = λ/2`.
pub const CRITICAL_TOL: f64 = 1e-9;
/// Minimum distance from a pole of `γ(t)` at which the rate is evaluated.
pub const POLE_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JcParams {
    pub gamma0: f64,
    pub lambda: f64,
    pub omega0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Weak,
    Critical,
    Strong,
}

/// `D = √(2γ0λ − λ²)` in the strong regime, its hyperbolic counterpart
/// `d = √(λ² − 2γ0λ)` in the weak regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CouplingFrequency {
    Oscillatory(f64),
    Hyperbolic(f64),
    Critical,
}

impl CouplingFrequency {
    /// The same quantity as a complex number: `D` real or `D = i·d`.
    pub fn as_complex(self) -> Complex64 {
        match self {
            CouplingFrequency::Oscillatory(d) => Complex64::new(d, 0.0),
            CouplingFrequency::Hyperbolic(d) => Complex64::new(0.0, d),
            CouplingFrequency::Critical => Complex64::new(0.0, 0.0),
        }
    }
}

impl JcParams {
    pub fn new(gamma0: f64, lambda: f64, omega0: f64) -> Result<Self> {
        if !(gamma0 > 0.0 && gamma0.is_finite()) || !(lambda > 0.0 && lambda.is_finite()) {
            return Err(QslError::Domain(format!(
                "gamma0 and lambda must be positive, got gamma0 = {gamma0}, lambda = {lambda}"
            )));
        }
        if !omega0.is_finite() {
            return Err(QslError::Domain(format!("omega0 must be finite, got {omega0}")));
        }
        Ok(Self { gamma0, lambda, omega0 })
    }

    /// Resonant cavity with `ω0 = 1`.
    pub fn with_unit_frequency(gamma0: f64, lambda: f64) -> Result<Self> {
        Self::new(gamma0, lambda, 1.0)
    }

    pub fn regime(&self) -> Regime {
        let half = 0.5 * self.lambda;
        if (self.gamma0 - half).abs() <= CRITICAL_TOL * self.lambda {
            Regime::Critical
        } else if self.gamma0 < half {
            Regime::Weak
        } else {
            Regime::Strong
        }
    }

    pub fn big_d(&self) -> CouplingFrequency {
        let x = 2.0 * self.gamma0 * self.lambda - self.lambda * self.lambda;
        match self.regime() {
            Regime::Strong => CouplingFrequency::Oscillatory(x.sqrt()),
            Regime::Weak => CouplingFrequency::Hyperbolic((-x).sqrt()),
            Regime::Critical => CouplingFrequency::Critical,
        }
    }

    /// Largest frequency scale of the dynamics, `max(D, λ)`.
    pub fn frequency_scale(&self) -> f64 {
        match self.big_d() {
            CouplingFrequency::Oscillatory(d) => d.max(self.lambda),
            _ => self.lambda,
        }
    }

    /// Interval count giving `dt ≤ min(0.01/λ, 0.05/max(D, λ))`.
    pub fn recommended_steps(&self, t_final: f64) -> usize {
        let dt = (0.01 / self.lambda).min(0.05 / self.frequency_scale());
        ((t_final / dt).ceil() as usize).max(2)
    }

    /// Zeros of `G` (poles of `γ`) in `(0, t_max]`; empty unless strongly coupled.
    pub fn poles(&self, t_max: f64) -> Vec<f64> {
        let CouplingFrequency::Oscillatory(d) = self.big_d() else {
            return Vec::new();
        };
        let phase = (d / self.lambda).atan();
        (1..)
            .map(|k| 2.0 / d * (k as f64 * std::f64::consts::PI - phase))
            .take_while(|&t| t <= t_max)
            .collect()
    }

    /// First zero of `G`: `(2/D)(π − arctan(D/λ))`, if strongly coupled.
    pub fn first_population_zero(&self) -> Option<f64> {
        match self.big_d() {
            CouplingFrequency::Oscillatory(d) => Some(2.0 / d * (std::f64::consts::PI - (d / self.lambda).atan())),
            _ => None,
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(QslError::Domain(format!("time must be finite and >= 0, got {t}")));
    }
    Ok(())
}

/// Amplitude `G(t)` (real for the resonant Lorentzian bath), `G(0) = 1`.
pub fn g_amplitude(t: f64, p: &JcParams) -> Result<f64> {
    check_time(t)?;
    Ok(g_and_derivative(t, p).0)
}

/// `(G(t), Ġ(t))`.
pub fn g_and_derivative(t: f64, p: &JcParams) -> (f64, f64) {
    let lam = p.lambda;
    let env = (-0.5 * lam * t).exp();
    match p.big_d() {
        CouplingFrequency::Oscillatory(d) => {
            let (s, c) = (0.5 * d * t).sin_cos();
            (env * (c + lam / d * s), -env * (p.gamma0 * lam / d) * s)
        }
        CouplingFrequency::Hyperbolic(d) => {
            let x = 0.5 * d * t;
            let (s, c) = (x.sinh(), x.cosh());
            (env * (c + lam / d * s), -env * (p.gamma0 * lam / d) * s)
        }
        CouplingFrequency::Critical => (env * (1.0 + 0.5 * lam * t), -env * 0.25 * lam * lam * t),
    }
}

/// Time-local decay rate `γ(t) = −2Ġ/G`.
///
/// Strong regime: `2γ0(λ/D)tan(Dt/2)/[1 + (λ/D)tan(Dt/2)]`; weak regime:
/// `2γ0λ sinh(dt/2)/[d cosh(dt/2) + λ sinh(dt/2)]`.
pub fn gamma_rate(t: f64, p: &JcParams) -> Result<f64> {
    check_time(t)?;
    let lam = p.lambda;
    match p.big_d() {
        CouplingFrequency::Oscillatory(d) => {
            if let Some(&pole) = p.poles(t + 1.0).iter().find(|&&pole| (pole - t).abs() < POLE_GUARD) {
                return Err(QslError::Singularity { t, pole });
            }
            // sin/cos form of the tan expression, finite where tan(Dt/2) is not.
            let (s, c) = (0.5 * d * t).sin_cos();
            let r = lam / d;
            Ok(2.0 * p.gamma0 * r * s / (c + r * s))
        }
        CouplingFrequency::Hyperbolic(d) => {
            let x = 0.5 * d * t;
            Ok(2.0 * p.gamma0 * lam * x.sinh() / (d * x.cosh() + lam * x.sinh()))
        }
        CouplingFrequency::Critical => Ok(lam * lam * t / (2.0 + lam * t)),
    }
}

/// `γ(t)(σ−ρσ+ − ½{σ+σ−, ρ})` in the `(|e>, |g>)` basis.
pub fn amplitude_damping_dissipator(gamma: f64, rho: &ComplexMatrix) -> ComplexMatrix {
    let ee = rho[(0, 0)];
    let eg = rho[(0, 1)];
    ComplexMatrix::from_rows(&[
        [-ee * gamma, -eg * (0.5 * gamma)],
        [-eg.conj() * (0.5 * gamma), ee * gamma],
    ])
}

/// `‖D_t(ρ_t)‖_op = |γ(t)|·|G(t)|²` for the fully excited initial state,
/// evaluated as `|2ĠG|` so poles of `γ` cancel.
pub fn dissipator_opnorm_excited(t: f64, p: &JcParams) -> Result<f64> {
    check_time(t)?;
    let (g, gd) = g_and_derivative(t, p);
    Ok((2.0 * g * gd).abs())
}

/// `peak·|sin(D t)|`: the strong-coupling oscillator form of the dissipator norm.
pub fn oscillator_approx(t: f64, d_value: f64, peak: f64) -> Result<f64> {
    if !(d_value > 0.0) || !(peak >= 0.0) {
        return Err(QslError::Domain(format!(
            "need d_value > 0 and peak >= 0, got {d_value}, {peak}"
        )));
    }
    Ok(peak * (d_value * t).sin().abs())
}

/// Exact trajectory on a uniform grid of `n_steps` intervals over `[0, t_final]`.
///
/// The Hamiltonian spread is 0 for diagonal `ρ0` (the state stays diagonal
/// and commutes with `H0`); otherwise it is `ω0`, the spread of
/// `H0 = ω0 σ+σ−` with its ground level at zero.
pub fn jc_trajectory(rho0: &DensityMatrix, p: &JcParams, t_final: f64, n_steps: usize) -> Result<Trajectory> {
    if rho0.dim() != 2 {
        return Err(QslError::dims(2, rho0.dim()));
    }
    if n_steps < 2 {
        return Err(QslError::ContractViolation(format!(
            "need at least 2 time steps, got {n_steps}"
        )));
    }
    if !(t_final > 0.0) || !t_final.is_finite() {
        return Err(QslError::Domain(format!("t_final must be positive, got {t_final}")));
    }
    let m0 = rho0.matrix();
    let ee0 = m0[(0, 0)].re;
    let eg0 = m0[(0, 1)];
    let spread = if rho0.is_diagonal(1e-12) { 0.0 } else { p.omega0.abs() };
    let w = p.omega0;

    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut dissipators = Vec::with_capacity(n_steps + 1);
    let mut generators = Vec::with_capacity(n_steps + 1);
    for k in 0..=n_steps {
        let t = t_final * k as f64 / n_steps as f64;
        let (g, gd) = g_and_derivative(t, p);
        let rot = Complex64::from_polar(1.0, -w * t);
        let ee = g * g * ee0;
        let eg = eg0 * rot * g;
        let rho = ComplexMatrix::from_rows(&[
            [Complex64::new(ee, 0.0), eg],
            [eg.conj(), Complex64::new(1.0 - ee, 0.0)],
        ]);
        // γρ_ee = −2ĠGρ_ee(0), γρ_eg = −2Ġ e^{−iω0 t}ρ_eg(0)
        let g_ee = -2.0 * gd * g * ee0;
        let g_eg = eg0 * rot * (-2.0 * gd);
        let diss = ComplexMatrix::from_rows(&[
            [Complex64::new(-g_ee, 0.0), -0.5 * g_eg],
            [-0.5 * g_eg.conj(), Complex64::new(g_ee, 0.0)],
        ]);
        // −i[H0, ρ] with H0 = ω0|e><e|
        let unitary_eg = Complex64::new(0.0, -w) * eg;
        let gen = ComplexMatrix::from_rows(&[
            [diss[(0, 0)], diss[(0, 1)] + unitary_eg],
            [diss[(1, 0)] + unitary_eg.conj(), diss[(1, 1)]],
        ]);
        times.push(t);
        states.push(DensityMatrix::new(rho)?);
        dissipators.push(diss);
        generators.push(gen);
    }
    Trajectory::new(times, states, dissipators, vec![spread; n_steps + 1], generators)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn strong() -> JcParams {
        JcParams::with_unit_frequency(10.0, 1.0).unwrap()
    }

    fn weak() -> JcParams {
        JcParams::with_unit_frequency(0.4, 1.0).unwrap()
    }

    #[test]
    fn parameter_validation_and_regimes() {
        assert!(JcParams::new(0.0, 1.0, 1.0).is_err());
        assert!(JcParams::new(1.0, -1.0, 1.0).is_err());
        assert_eq!(strong().regime(), Regime::Strong);
        assert_eq!(weak().regime(), Regime::Weak);
        let crit = JcParams::with_unit_frequency(0.5, 1.0).unwrap();
        assert_eq!(crit.regime(), Regime::Critical);
        assert_eq!(crit.big_d(), CouplingFrequency::Critical);
    }

    #[test]
    fn big_d_values() {
        match strong().big_d() {
            CouplingFrequency::Oscillatory(d) => assert_abs_diff_eq!(d, 19f64.sqrt(), epsilon = 1e-14),
            other => panic!("{other:?}"),
        }
        match weak().big_d() {
            CouplingFrequency::Hyperbolic(d) => assert_abs_diff_eq!(d, 0.2f64.sqrt(), epsilon = 1e-14),
            other => panic!("{other:?}"),
        }
        assert_abs_diff_eq!(strong().big_d().as_complex().re, 4.3589, epsilon = 1e-4);
        assert_abs_diff_eq!(weak().big_d().as_complex().im, 0.4472, epsilon = 1e-4);
    }

    #[test]
    fn g_initial_value_and_negative_time() {
        for p in [strong(), weak(), JcParams::with_unit_frequency(0.5, 1.0).unwrap()] {
            assert_eq!(g_amplitude(0.0, &p).unwrap(), 1.0);
        }
        assert!(g_amplitude(-1.0, &strong()).is_err());
    }

    #[test]
    fn first_zero_of_g_by_bisection() {
        // Root of the closed form, bracketed independently of the arctan formula.
        let p = strong();
        let (mut a, mut b) = (0.5, 1.0);
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            if g_amplitude(a, &p).unwrap() * g_amplitude(m, &p).unwrap() <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        let root = 0.5 * (a + b);
        assert_abs_diff_eq!(root, p.first_population_zero().unwrap(), epsilon = 1e-12);
        assert_abs_diff_eq!(root, 0.824203431169, epsilon = 1e-9);
        assert_abs_diff_eq!(p.poles(1.0)[0], root, epsilon = 1e-12);
    }

    #[test]
    fn weak_g_stays_positive() {
        let p = weak();
        for k in 0..=5000 {
            assert!(g_amplitude(k as f64 * 0.01, &p).unwrap() > 0.0);
        }
    }

    #[test]
    fn gamma_rate_matches_g_oracle() {
        for p in [strong(), weak(), JcParams::with_unit_frequency(0.5, 1.0).unwrap()] {
            for &t in &[0.05, 0.3, 0.5, 1.7, 3.3] {
                if p.poles(10.0).iter().any(|&q| (q - t).abs() < 1e-3) {
                    continue;
                }
                let h = 1e-6;
                let g = g_amplitude(t, &p).unwrap();
                let gd = (g_amplitude(t + h, &p).unwrap() - g_amplitude(t - h, &p).unwrap()) / (2.0 * h);
                let oracle = -2.0 * gd / g;
                let rate = gamma_rate(t, &p).unwrap();
                assert!(
                    (rate - oracle).abs() < 1e-6 * oracle.abs().max(1.0),
                    "t={t} {rate} vs {oracle}"
                );
            }
        }
        assert_eq!(gamma_rate(0.0, &strong()).unwrap(), 0.0);
    }

    #[test]
    fn gamma_rate_weak_asymptote() {
        let p = weak();
        let d = 0.2f64.sqrt();
        let limit = 0.8 / (d + 1.0);
        assert_abs_diff_eq!(limit, 0.5528, epsilon = 1e-4);
        assert_abs_diff_eq!(gamma_rate(200.0, &p).unwrap(), limit, epsilon = 1e-12);
    }

    #[test]
    fn gamma_rate_pole_is_an_error() {
        let p = strong();
        let pole = p.first_population_zero().unwrap();
        match gamma_rate(pole + 1e-8, &p) {
            Err(QslError::Singularity { pole: q, .. }) => assert_abs_diff_eq!(q, pole, epsilon = 1e-12),
            other => panic!("{other:?}"),
        }
        assert!(gamma_rate(pole + 1e-3, &p).is_ok());
    }

    #[test]
    fn excited_trajectory_landmarks() {
        let p = strong();
        let rho0 = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let traj = jc_trajectory(&rho0, &p, 3.0, 3000).unwrap();
        let pops: Vec<f64> = traj.states().iter().map(|r| r.matrix()[(0, 0)].re).collect();
        let (kmin, _) = pops
            .iter()
            .enumerate()
            .take_while(|(k, _)| traj.times()[*k] < 1.2)
            .fold((0, 1.0), |acc, (k, &x)| if x < acc.1 { (k, x) } else { acc });
        assert!((traj.times()[kmin] - 0.8242).abs() < 2e-3);
        assert!(pops[kmin] < 1e-5);
        // Revival after the zero.
        assert!(pops.iter().skip(kmin).any(|&x| x > 0.1));
        assert!(traj.hamiltonian_spreads().iter().all(|&h| h == 0.0));
    }

    #[test]
    fn weak_population_monotone() {
        let rho0 = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let traj = jc_trajectory(&rho0, &weak(), 50.0, 5000).unwrap();
        let pops: Vec<f64> = traj.states().iter().map(|r| r.matrix()[(0, 0)].re).collect();
        assert!(pops.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn ground_state_is_stationary() {
        let rho0 = DensityMatrix::diagonal(&[0.0, 1.0]).unwrap();
        let traj = jc_trajectory(&rho0, &strong(), 2.0, 100).unwrap();
        assert!(traj.states().iter().all(|r| r == &rho0));
        assert!(traj.dissipators().iter().all(|d| d.max_abs() == 0.0));
    }

    #[test]
    fn dissipator_norm_at_zero_and_stable_form() {
        assert_eq!(dissipator_opnorm_excited(0.0, &strong()).unwrap(), 0.0);
        let p = strong();
        let rho0 = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let traj = jc_trajectory(&rho0, &p, 2.0, 400).unwrap();
        for (t, n) in traj.times().iter().zip(traj.dissipator_opnorms()) {
            assert!((dissipator_opnorm_excited(*t, &p).unwrap() - n).abs() < 1e-8);
        }
        // Away from poles the stable form equals the literal γ(t) formula.
        let t = 0.4;
        let exact = jc_trajectory(&rho0, &p, t, 2).unwrap();
        let literal = amplitude_damping_dissipator(gamma_rate(t, &p).unwrap(), exact.states()[2].matrix());
        assert!((&literal - &exact.dissipators()[2]).max_abs() < 1e-10);
    }

    #[test]
    fn oscillator_form() {
        let d = 4.0;
        assert_eq!(oscillator_approx(0.0, d, 2.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            oscillator_approx(std::f64::consts::PI / (2.0 * d), d, 2.0).unwrap(),
            2.0,
            epsilon = 1e-12
        );
        // Mean over one π/D period is (2/π)·peak (midpoint rule).
        let n = 100_000;
        let period = std::f64::consts::PI / d;
        let mean: f64 = (0..n)
            .map(|k| oscillator_approx((k as f64 + 0.5) * period / n as f64, d, 2.0).unwrap())
            .sum::<f64>()
            / n as f64;
        assert_abs_diff_eq!(mean, 2.0 * 2.0 / std::f64::consts::PI, epsilon = 1e-8);
        assert!(oscillator_approx(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn coherent_state_has_hamiltonian_spread() {
        let rho0 = DensityMatrix::new(ComplexMatrix::from_real_rows(&[[0.5, 0.5], [0.5, 0.5]])).unwrap();
        let p = JcParams::new(10.0, 1.0, 2.5).unwrap();
        let traj = jc_trajectory(&rho0, &p, 1.0, 10).unwrap();
        assert!(traj.hamiltonian_spreads().iter().all(|&h| h == 2.5));
    }
}
