//! Spin coupled to a two-band quantum dot with random couplings.
//!
//! The interaction `λ Σ c(n1, n2) σ+|n1><n2| + h.c.` only connects
//! `|e, n1>` with `|g, n2>`. Starting from `|e, n_init>` (optionally in
//! superposition with `|g, n_init>`), the motion therefore stays inside the
//! sector spanned by those `N1 + N2` states plus the single decoupled state
//! `|g, n_init>`, which only picks up a phase. Sector ordering:
//!
//! | index             | state          | energy                    |
//! |-------------------|----------------|---------------------------|
//! | `0..N1`           | `|e, n1>`      | `ΔE/2 + (δε/N1)·n1`       |
//! | `N1..N1+N2`       | `|g, n2>`      | `−ΔE/2 + ΔE + (δε/N2)·n2` |
//! | `N1+N2`           | `|g, n_init>`  | `−ΔE/2 + (δε/N1)·n_init`  |
//!
//! The spin Hamiltonian is `(ΔE/2)σz`, so the spin splitting equals the
//! band offset `ΔE` and `|e, n1>`, `|g, n2>` are resonant.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{QslError, Result};
use crate::matrix::{random, ComplexMatrix, DensityMatrix, C0};
use crate::trajectory::Trajectory;

/// Largest allowed `dt·‖H‖_op` for the RK4 integrator.
pub const STABILITY_MARGIN: f64 = 0.1;
/// Tolerance on the total-state norm handed to [`reduced_density`].
pub const NORM_TOL: f64 = 1e-8;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DotParams {
    pub n1: usize,
    pub n2: usize,
    pub delta_eps: f64,
    pub delta_e: f64,
    pub coupling: f64,
    pub seed: u64,
}

impl DotParams {
    pub fn new(n1: usize, n2: usize, delta_eps: f64, delta_e: f64, coupling: f64, seed: u64) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(QslError::Domain(format!("band sizes must be >= 1, got {n1}, {n2}")));
        }
        if !(delta_eps >= 0.0) || !(coupling >= 0.0) || !delta_e.is_finite() {
            return Err(QslError::Domain(format!(
                "need delta_eps >= 0, coupling >= 0, finite delta_e; got {delta_eps}, {coupling}, {delta_e}"
            )));
        }
        Ok(Self {
            n1,
            n2,
            delta_eps,
            delta_e,
            coupling,
            seed,
        })
    }

    /// `N1 = N2 = 500`, `δε = 0.5`, `λ = 0.02`, `ΔE = 10`.
    pub fn reference(seed: u64) -> Self {
        Self {
            n1: 500,
            n2: 500,
            delta_eps: 0.5,
            delta_e: 10.0,
            coupling: 0.02,
            seed,
        }
    }

    /// Initially occupied dot level (0-based index into band 1): the band centre.
    pub fn initial_level(&self) -> usize {
        self.n1 / 2
    }

    pub fn sector_dim(&self) -> usize {
        self.n1 + self.n2 + 1
    }

    /// `(ΔE/2)σz` in the `(|e>, |g>)` basis.
    pub fn spin_hamiltonian(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_diag(&[0.5 * self.delta_e, -0.5 * self.delta_e])
    }
}

/// Which value of `‖H_sys‖_Δ` enters the speed-limit bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HamiltonianSpread {
    /// `2ΔE`: the spread of `ΔE·σz`.
    Full,
    /// `ΔE`: the spread of the simulated `(ΔE/2)σz`.
    #[default]
    Half,
}

impl HamiltonianSpread {
    pub fn value(self, delta_e: f64) -> f64 {
        match self {
            HamiltonianSpread::Full => 2.0 * delta_e.abs(),
            HamiltonianSpread::Half => delta_e.abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    /// `|e><e| ⊗ |n_init><n_init|`
    Excited,
    /// `½[[1, 1], [1, 1]] ⊗ |n_init><n_init|`
    Coherent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisLabel {
    Excited { level: usize },
    GroundUpper { level: usize },
    GroundDecoupled { level: usize },
}

/// Hermitian operator that can act on state vectors.
pub trait HermitianOperator: Sync {
    fn dim(&self) -> usize;
    /// `y = H x`.
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]);
    /// Upper estimate of `‖H‖_op` used for step-size control.
    fn norm_estimate(&self) -> f64;
}

impl HermitianOperator for ComplexMatrix {
    fn dim(&self) -> usize {
        self.rows()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// Max absolute row sum; bounds `‖H‖_op` for Hermitian `H`.
    fn norm_estimate(&self) -> f64 {
        (0..self.rows())
            .map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Sector Hamiltonian stored as its diagonal plus the `N1 × N2` coupling block.
#[derive(Debug, Clone)]
pub struct DotHamiltonian {
    params: DotParams,
    diag: Vec<f64>,
    /// `λ·c(n1, n2)`, row-major over `n1`.
    block: Vec<Complex64>,
}

/// Assembles the sector Hamiltonian; the coupling draw depends only on `seed`.
pub fn build_hamiltonian(params: &DotParams) -> DotHamiltonian {
    let p = *params;
    let half = 0.5 * p.delta_e;
    let mut diag = Vec::with_capacity(p.sector_dim());
    diag.extend((1..=p.n1).map(|n| half + p.delta_eps / p.n1 as f64 * n as f64));
    diag.extend((1..=p.n2).map(|n| -half + p.delta_e + p.delta_eps / p.n2 as f64 * n as f64));
    diag.push(-half + p.delta_eps / p.n1 as f64 * (p.initial_level() + 1) as f64);

    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let block = (0..p.n1 * p.n2)
        .map(|_| random::complex_normal(&mut rng) * p.coupling)
        .collect();
    DotHamiltonian { params: p, diag, block }
}

impl DotHamiltonian {
    pub fn params(&self) -> &DotParams {
        &self.params
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// Coupling matrix element `<e, n1|V|g, n2>` (0-based levels).
    pub fn coupling_element(&self, n1: usize, n2: usize) -> Complex64 {
        self.block[n1 * self.params.n2 + n2]
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let n = self.diag.len();
        let (n1, n2) = (self.params.n1, self.params.n2);
        let mut m = ComplexMatrix::from_real_diag(&self.diag);
        for i in 0..n1 {
            for j in 0..n2 {
                let c = self.block[i * n2 + j];
                m[(i, n1 + j)] = c;
                m[(n1 + j, i)] = c.conj();
            }
        }
        debug_assert_eq!(m.rows(), n);
        m
    }

    /// `σ_max` of the coupling block by power iteration on `C†C`.
    fn coupling_norm(&self) -> f64 {
        let (n1, n2) = (self.params.n1, self.params.n2);
        if self.params.coupling == 0.0 {
            return 0.0;
        }
        let mut v = vec![Complex64::new(1.0, 0.0); n2];
        let mut u = vec![C0; n1];
        let mut sigma = 0.0;
        for _ in 0..60 {
            for (i, ui) in u.iter_mut().enumerate() {
                *ui = self.block[i * n2..(i + 1) * n2]
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| a * b)
                    .sum();
            }
            v.iter_mut().for_each(|x| *x = C0);
            for (i, ui) in u.iter().enumerate() {
                for (vj, c) in v.iter_mut().zip(&self.block[i * n2..(i + 1) * n2]) {
                    *vj += c.conj() * ui;
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            v.iter_mut().for_each(|x| *x /= norm);
            sigma = norm.sqrt();
        }
        sigma
    }
}

impl HermitianOperator for DotHamiltonian {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let (n1, n2) = (self.params.n1, self.params.n2);
        for ((yi, xi), d) in y.iter_mut().zip(x).zip(&self.diag) {
            *yi = xi * d;
        }
        let (xe, rest) = x.split_at(n1);
        let xg = &rest[..n2];
        let (ye, rest) = y.split_at_mut(n1);
        let yg = &mut rest[..n2];
        for i in 0..n1 {
            let row = &self.block[i * n2..(i + 1) * n2];
            let xi = xe[i];
            let mut acc = C0;
            for ((c, xj), yj) in row.iter().zip(xg).zip(yg.iter_mut()) {
                acc += c * xj;
                *yj += c.conj() * xi;
            }
            ye[i] += acc;
        }
    }

    /// `max|diag| + σ_max(block)`, with 5 % headroom on the iterative estimate.
    fn norm_estimate(&self) -> f64 {
        let d = self.diag.iter().map(|x| x.abs()).fold(0.0, f64::max);
        d + 1.05 * self.coupling_norm()
    }
}

/// Total-system state restricted to the dynamically closed sector.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorState {
    pub amplitudes: Vec<Complex64>,
    pub time: f64,
    n1: usize,
    n2: usize,
    initial_level: usize,
}

impl SectorState {
    pub fn initial(params: &DotParams, kind: InitialState) -> Self {
        let mut amplitudes = vec![C0; params.sector_dim()];
        let k = params.initial_level();
        match kind {
            InitialState::Excited => amplitudes[k] = Complex64::new(1.0, 0.0),
            InitialState::Coherent => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                amplitudes[k] = Complex64::new(s, 0.0);
                amplitudes[params.n1 + params.n2] = Complex64::new(s, 0.0);
            }
        }
        Self {
            amplitudes,
            time: 0.0,
            n1: params.n1,
            n2: params.n2,
            initial_level: k,
        }
    }

    pub fn from_amplitudes(params: &DotParams, amplitudes: Vec<Complex64>, time: f64) -> Result<Self> {
        if amplitudes.len() != params.sector_dim() {
            return Err(QslError::dims(params.sector_dim(), amplitudes.len()));
        }
        Ok(Self {
            amplitudes,
            time,
            n1: params.n1,
            n2: params.n2,
            initial_level: params.initial_level(),
        })
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn label(&self, index: usize) -> BasisLabel {
        if index < self.n1 {
            BasisLabel::Excited { level: index }
        } else if index < self.n1 + self.n2 {
            BasisLabel::GroundUpper { level: index - self.n1 }
        } else {
            BasisLabel::GroundDecoupled {
                level: self.initial_level,
            }
        }
    }

    fn decoupled(&self) -> Complex64 {
        self.amplitudes[self.n1 + self.n2]
    }
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Fourth-order Runge–Kutta integrator for `iψ̇ = Hψ` with per-step
/// renormalisation. The pre-renormalisation drift is tracked.
pub struct Rk4<'a, H: HermitianOperator> {
    h: &'a H,
    dt_max: f64,
    k: [Vec<Complex64>; 4],
    tmp: Vec<Complex64>,
    max_norm_drift: f64,
    steps: usize,
}

impl<'a, H: HermitianOperator> Rk4<'a, H> {
    pub fn new(h: &'a H, dt_max: f64) -> Result<Self> {
        let norm = h.norm_estimate();
        let required = if norm > 0.0 {
            STABILITY_MARGIN / norm
        } else {
            f64::INFINITY
        };
        if !(dt_max > 0.0) || dt_max > required {
            return Err(QslError::Stability {
                dt: dt_max,
                required_dt: required,
            });
        }
        let n = h.dim();
        Ok(Self {
            h,
            dt_max,
            k: [vec![C0; n], vec![C0; n], vec![C0; n], vec![C0; n]],
            tmp: vec![C0; n],
            max_norm_drift: 0.0,
            steps: 0,
        })
    }

    /// Largest stable step for `h`.
    pub fn max_step(h: &H) -> f64 {
        let norm = h.norm_estimate();
        if norm > 0.0 {
            STABILITY_MARGIN / norm
        } else {
            f64::INFINITY
        }
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.max_norm_drift
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    fn deriv(h: &H, x: &[Complex64], out: &mut [Complex64]) {
        h.apply(x, out);
        out.iter_mut().for_each(|z| *z *= -I);
    }

    fn step(&mut self, psi: &mut [Complex64], dt: f64) {
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;
        Self::deriv(self.h, psi, k1);
        for ((t, p), k) in tmp.iter_mut().zip(psi.iter()).zip(k1.iter()) {
            *t = p + k * (0.5 * dt);
        }
        Self::deriv(self.h, tmp, k2);
        for ((t, p), k) in tmp.iter_mut().zip(psi.iter()).zip(k2.iter()) {
            *t = p + k * (0.5 * dt);
        }
        Self::deriv(self.h, tmp, k3);
        for ((t, p), k) in tmp.iter_mut().zip(psi.iter()).zip(k3.iter()) {
            *t = p + k * dt;
        }
        Self::deriv(self.h, tmp, k4);
        let w = dt / 6.0;
        for (i, p) in psi.iter_mut().enumerate() {
            *p += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * w;
        }
        let n = norm_sqr(psi).sqrt();
        self.max_norm_drift = self.max_norm_drift.max((n - 1.0).abs());
        psi.iter_mut().for_each(|z| *z /= n);
        self.steps += 1;
    }

    /// Advances `psi` by `duration` in equal substeps no longer than `dt_max`.
    pub fn advance(&mut self, psi: &mut [Complex64], duration: f64) {
        if duration <= 0.0 {
            return;
        }
        let n = (duration / self.dt_max * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let dt = duration / n as f64;
        for _ in 0..n {
            self.step(psi, dt);
        }
    }
}

/// Integrates `iψ̇ = Hψ` from `psi0` to `t_final` with step `dt` (the last
/// step is shortened so the grid lands on `t_final`). Returns every step.
pub fn propagate<H: HermitianOperator>(psi0: &SectorState, h: &H, t_final: f64, dt: f64) -> Result<Vec<SectorState>> {
    if psi0.amplitudes.len() != h.dim() {
        return Err(QslError::dims(h.dim(), psi0.amplitudes.len()));
    }
    if !(t_final >= 0.0) {
        return Err(QslError::Domain(format!("t_final must be >= 0, got {t_final}")));
    }
    let mut rk = Rk4::new(h, dt)?;
    let n = (t_final / dt * (1.0 - 1e-12)).ceil() as usize;
    let mut out = Vec::with_capacity(n + 1);
    out.push(psi0.clone());
    let mut psi = psi0.amplitudes.clone();
    for k in 1..=n {
        let t_prev = out[k - 1].time;
        let t_next = (psi0.time + k as f64 * dt).min(psi0.time + t_final);
        rk.advance(&mut psi, t_next - t_prev);
        out.push(SectorState {
            amplitudes: psi.clone(),
            time: t_next,
            ..psi0.clone()
        });
    }
    Ok(out)
}

fn reduced_matrix(a: &[Complex64], n1: usize, n2: usize, init: usize) -> [Complex64; 3] {
    let ee = norm_sqr(&a[..n1]);
    let gg = norm_sqr(&a[n1..n1 + n2 + 1]);
    let eg = a[init] * a[n1 + n2].conj();
    [Complex64::new(ee, 0.0), eg, Complex64::new(gg, 0.0)]
}

fn two_by_two([ee, eg, gg]: [Complex64; 3]) -> ComplexMatrix {
    ComplexMatrix::from_rows(&[[ee, eg], [eg.conj(), gg]])
}

/// Spin state after tracing out the dot.
///
/// Coherence only survives between `|e, n_init>` and the decoupled
/// `|g, n_init>`: all other excited components pair with dot levels that
/// carry no ground-state amplitude.
pub fn reduced_density(psi: &SectorState) -> Result<DensityMatrix> {
    let n = psi.norm();
    if (n - 1.0).abs() > NORM_TOL {
        return Err(QslError::ContractViolation(format!(
            "sector state norm {n} differs from 1"
        )));
    }
    let _ = psi.decoupled();
    DensityMatrix::new(two_by_two(reduced_matrix(
        &psi.amplitudes,
        psi.n1,
        psi.n2,
        psi.initial_level,
    )))
}

/// Exact `ρ̇_t`: partial trace of `−i[H, |ψ><ψ|]`, using `ψ̇ = −iHψ`.
pub fn reduced_derivative<H: HermitianOperator>(psi: &SectorState, h: &H) -> Result<ComplexMatrix> {
    if psi.amplitudes.len() != h.dim() {
        return Err(QslError::dims(h.dim(), psi.amplitudes.len()));
    }
    let mut hpsi = vec![C0; h.dim()];
    h.apply(&psi.amplitudes, &mut hpsi);
    Ok(derivative_from(psi, &hpsi))
}

fn derivative_from(psi: &SectorState, hpsi: &[Complex64]) -> ComplexMatrix {
    let (n1, n2, k) = (psi.n1, psi.n2, psi.initial_level);
    let a = &psi.amplitudes;
    // ψ̇ = −iHψ
    let dot = |i: usize| -I * hpsi[i];
    let ee: f64 = (0..n1).map(|i| 2.0 * (dot(i) * a[i].conj()).re).sum();
    let gg: f64 = (n1..n1 + n2 + 1).map(|i| 2.0 * (dot(i) * a[i].conj()).re).sum();
    let d = n1 + n2;
    let eg = dot(k) * a[d].conj() + a[k] * dot(d).conj();
    two_by_two([Complex64::new(ee, 0.0), eg, Complex64::new(gg, 0.0)])
}

/// `D_t(ρ_t) = ρ̇_t + i[H_sys, ρ_t]`, with `ρ̇_t` from the exact total dynamics.
pub fn effective_dissipator<H: HermitianOperator>(
    psi: &SectorState,
    h_total: &H,
    h_sys: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let rho_dot = reduced_derivative(psi, h_total)?;
    let rho = reduced_density(psi)?;
    let comm = crate::matrix::commutator(h_sys, rho.matrix())?;
    Ok(&rho_dot + &comm.scale(I))
}

/// Diagnostics of a dot-model run.
#[derive(Debug, Clone)]
pub struct DotRun {
    pub trajectory: Trajectory,
    pub params: DotParams,
    pub kind: InitialState,
    /// Largest per-step `|‖ψ‖ − 1|` before renormalisation.
    pub max_norm_drift: f64,
    /// Largest `|E(t) − E(0)| / max(|E(0)|, 1)`.
    pub max_energy_drift: f64,
    pub rk4_steps: usize,
}

/// Simulates the dot model and samples the spin dynamics on `n_steps`
/// uniform intervals of `[0, t_final]`.
///
/// The Hamiltonian term of the bounds is kept only when the spin state
/// fails to commute with `H_sys` somewhere on the grid; for an excited
/// start the state stays diagonal and the term is zero.
pub fn dot_trajectory(
    params: &DotParams,
    kind: InitialState,
    t_final: f64,
    n_steps: usize,
    spread: HamiltonianSpread,
) -> Result<DotRun> {
    if n_steps < 2 {
        return Err(QslError::ContractViolation(format!(
            "need at least 2 time steps, got {n_steps}"
        )));
    }
    if !(t_final > 0.0) || !t_final.is_finite() {
        return Err(QslError::Domain(format!("t_final must be positive, got {t_final}")));
    }
    let h = build_hamiltonian(params);
    let h_sys = params.spin_hamiltonian();
    let mut rk = Rk4::new(&h, Rk4::max_step(&h).min(t_final))?;
    let mut psi = SectorState::initial(params, kind);
    let mut hpsi = vec![C0; h.dim()];

    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut dissipators = Vec::with_capacity(n_steps + 1);
    let mut generators = Vec::with_capacity(n_steps + 1);
    let mut commutes = true;
    let mut e0 = None;
    let mut max_energy_drift: f64 = 0.0;

    for k in 0..=n_steps {
        let t = t_final * k as f64 / n_steps as f64;
        if k > 0 {
            rk.advance(&mut psi.amplitudes, t - psi.time);
            psi.time = t;
        }
        h.apply(&psi.amplitudes, &mut hpsi);
        let energy: f64 = psi.amplitudes.iter().zip(&hpsi).map(|(a, b)| (a.conj() * b).re).sum();
        let e0 = *e0.get_or_insert(energy);
        max_energy_drift = max_energy_drift.max((energy - e0).abs() / e0.abs().max(1.0));

        let rho = reduced_density(&psi)?;
        let rho_dot = derivative_from(&psi, &hpsi);
        let comm = crate::matrix::commutator(&h_sys, rho.matrix())?;
        if comm.max_abs() > 1e-12 {
            commutes = false;
        }
        dissipators.push(&rho_dot + &comm.scale(I));
        generators.push(rho_dot);
        states.push(rho);
        times.push(t);
    }
    let spread_value = if commutes { 0.0 } else { spread.value(params.delta_e) };
    let trajectory = Trajectory::new(times, states, dissipators, vec![spread_value; n_steps + 1], generators)?;
    Ok(DotRun {
        trajectory,
        params: *params,
        kind,
        max_norm_drift: rk.max_norm_drift(),
        max_energy_drift,
        rk4_steps: rk.steps(),
    })
}
