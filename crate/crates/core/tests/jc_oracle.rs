use approx::assert_relative_eq;
use qsl_core::jc::{g_amplitude, jc_trajectory, JcParams};
use qsl_core::matrix::DensityMatrix;
use qsl_core::qsl::{
    analyze, blp_non_markovianity, minimal_evolution_time, tau_hat_m, theta_r_at, NormFlavor, TauHatM,
};

fn excited() -> DensityMatrix {
    DensityMatrix::diagonal(&[1.0, 0.0]).unwrap()
}

// Independent |G|² from the textbook amplitude, for λ = 1.
fn population(gamma0: f64, t: f64) -> f64 {
    let x = 2.0 * gamma0 - 1.0;
    let g = if x > 0.0 {
        let d = x.sqrt();
        (-t / 2.0).exp() * ((d * t / 2.0).cos() + (d * t / 2.0).sin() / d)
    } else if x < 0.0 {
        let d = (-x).sqrt();
        (-t / 2.0).exp() * ((d * t / 2.0).cosh() + (d * t / 2.0).sinh() / d)
    } else {
        (-t / 2.0).exp() * (1.0 + t / 2.0)
    };
    g * g
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (f(a) > 0.0) == (f(m) > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[test]
fn population_matches_closed_form_in_every_regime() {
    // Frozen |G(1)|² for γ0 = 10, 0.2 and the critical 0.5.
    for (gamma0, expected) in [
        (10.0, 0.05411783820493874),
        (0.2, 0.9283244674036614),
        (0.5, 0.8277287426357453),
    ] {
        let p = JcParams::with_unit_frequency(gamma0, 1.0).unwrap();
        assert_relative_eq!(g_amplitude(1.0, &p).unwrap().powi(2), expected, max_relative = 1e-12);
        assert_relative_eq!(population(gamma0, 1.0), expected, max_relative = 1e-12);
    }
}

#[test]
fn trajectory_population_follows_oracle() {
    let p = JcParams::with_unit_frequency(3.0, 1.0).unwrap();
    let traj = jc_trajectory(&excited(), &p, 5.0, 500).unwrap();
    for (t, rho) in traj.times().iter().zip(traj.states()) {
        let rho11 = rho.matrix().row(0)[0].re;
        assert!((rho11 - population(3.0, *t)).abs() < 1e-12, "t = {t}");
    }
}

#[test]
fn first_zero_of_population_at_strong_coupling() {
    // Root of the closed-form amplitude between 0.1 and 1.2 (its first sign change).
    let d = 19f64.sqrt();
    let amp = |t: f64| (d * t / 2.0).cos() + (d * t / 2.0).sin() / d;
    let root = bisect(amp, 0.1, 1.2);
    assert_relative_eq!(root, 0.8242034311692071, epsilon = 1e-12);

    let p = JcParams::with_unit_frequency(10.0, 1.0).unwrap();
    assert_relative_eq!(p.first_population_zero().unwrap(), root, epsilon = 1e-12);
    let traj = jc_trajectory(&excited(), &p, 10.0, p.recommended_steps(10.0)).unwrap();
    match tau_hat_m(&traj).unwrap() {
        TauHatM::Attained { time, theta } => {
            assert!((time - root).abs() < 1e-3, "{time}");
            assert!((theta - std::f64::consts::FRAC_PI_2).abs() < 1e-3);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn weak_coupling_keeps_rising() {
    let p = JcParams::with_unit_frequency(0.2, 1.0).unwrap();
    let traj = jc_trajectory(&excited(), &p, 10.0, 1000).unwrap();
    assert!(matches!(tau_hat_m(&traj).unwrap(), TauHatM::Unattained { .. }));
    let r = analyze(&traj, 10.0, 2.0 / std::f64::consts::PI, NormFlavor::Op).unwrap();
    assert_relative_eq!(r.tau_hat, 10.0, epsilon = 1e-9);
    assert!(r.bound_final1 <= 10.0 * (1.0 + 1e-4));
}

#[test]
fn minimal_time_is_grid_converged() {
    for gamma0 in [0.8, 2.0, 7.0] {
        let p = JcParams::with_unit_frequency(gamma0, 1.0).unwrap();
        let n = p.recommended_steps(10.0);
        let coarse = jc_trajectory(&excited(), &p, 10.0, n).unwrap();
        let fine = jc_trajectory(&excited(), &p, 10.0, 2 * n).unwrap();
        let theta = theta_r_at(&fine, 10.0).unwrap();
        let a = minimal_evolution_time(&coarse, theta).unwrap().1;
        let b = minimal_evolution_time(&fine, theta).unwrap().1;
        assert!((a - b).abs() < 1e-3, "gamma0 = {gamma0}: {a} vs {b}");
    }
}

#[test]
fn non_markovianity_matches_geometric_series() {
    // Σ_k exp(−2πk/D) over the maxima of |G|², λ = 1.
    for (gamma0, expected) in [
        (10.0, 0.30989790712167703),
        (2.0, 0.02730571763467505),
        (0.72, 7.696334483088253e-05),
    ] {
        let p = JcParams::with_unit_frequency(gamma0, 1.0).unwrap();
        let n = blp_non_markovianity(&p, 200.0).unwrap();
        assert_relative_eq!(n, expected, max_relative = 1e-8);
    }
    for gamma0 in [0.1, 0.3, 0.5] {
        let p = JcParams::with_unit_frequency(gamma0, 1.0).unwrap();
        assert_eq!(blp_non_markovianity(&p, 60.0).unwrap(), 0.0);
    }
}

#[test]
fn truncated_window_counts_only_completed_revivals() {
    let p = JcParams::with_unit_frequency(10.0, 1.0).unwrap();
    let d = 19f64.sqrt();
    // Window ends just after the second maximum of |G|².
    let window = 2.0 * std::f64::consts::TAU / d + 0.01;
    let expected = (-std::f64::consts::TAU / d).exp() + (-2.0 * std::f64::consts::TAU / d).exp();
    assert_relative_eq!(blp_non_markovianity(&p, window).unwrap(), expected, max_relative = 1e-8);
}
