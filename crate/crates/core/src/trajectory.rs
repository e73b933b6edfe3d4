use crate::error::{QslError, Result};
use crate::matrix::{operator_norm, ComplexMatrix, DensityMatrix};

/// Dissipators must be traceless to this tolerance.
pub const DISSIPATOR_TRACE_TOL: f64 = 1e-9;

/// Sampled reduced dynamics of a system on an increasing time grid.
///
/// All per-time vectors are parallel to `times`. `generators` holds the full
/// time derivative `ρ̇_t = −i[H_t, ρ_t] + D_t(ρ_t)` and `dissipators` only
/// the non-unitary part.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<DensityMatrix>,
    dissipators: Vec<ComplexMatrix>,
    dissipator_opnorms: Vec<f64>,
    hamiltonian_spreads: Vec<f64>,
    generators: Vec<ComplexMatrix>,
}

impl Trajectory {
    pub fn new(
        times: Vec<f64>,
        states: Vec<DensityMatrix>,
        dissipators: Vec<ComplexMatrix>,
        hamiltonian_spreads: Vec<f64>,
        generators: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        let n = times.len();
        if n == 0 {
            return Err(QslError::ContractViolation("empty trajectory".into()));
        }
        for (name, len) in [
            ("states", states.len()),
            ("dissipators", dissipators.len()),
            ("hamiltonian_spreads", hamiltonian_spreads.len()),
            ("generators", generators.len()),
        ] {
            if len != n {
                return Err(QslError::dims(format!("{n} {name}"), len));
            }
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(QslError::ContractViolation(
                "trajectory times must be strictly increasing".into(),
            ));
        }
        if let Some((k, d)) = dissipators
            .iter()
            .enumerate()
            .find(|(_, d)| d.trace().norm() > DISSIPATOR_TRACE_TOL)
        {
            return Err(QslError::ContractViolation(format!(
                "dissipator at t = {} has trace {}",
                times[k],
                d.trace()
            )));
        }
        let dissipator_opnorms = dissipators.iter().map(operator_norm).collect();
        Ok(Self {
            times,
            states,
            dissipators,
            dissipator_opnorms,
            hamiltonian_spreads,
            generators,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn initial_state(&self) -> &DensityMatrix {
        &self.states[0]
    }

    pub fn dissipators(&self) -> &[ComplexMatrix] {
        &self.dissipators
    }

    pub fn dissipator_opnorms(&self) -> &[f64] {
        &self.dissipator_opnorms
    }

    pub fn hamiltonian_spreads(&self) -> &[f64] {
        &self.hamiltonian_spreads
    }

    pub fn generators(&self) -> &[ComplexMatrix] {
        &self.generators
    }

    /// Same dynamics with a different `‖H_t‖_Δ` series.
    pub fn with_hamiltonian_spreads(mut self, spreads: Vec<f64>) -> Result<Self> {
        if spreads.len() != self.len() {
            return Err(QslError::dims(self.len(), spreads.len()));
        }
        self.hamiltonian_spreads = spreads;
        Ok(self)
    }

    pub fn t_final(&self) -> f64 {
        *self.times.last().expect("non-empty")
    }

    /// State at an arbitrary time inside the window, linearly interpolated
    /// between grid samples (a convex combination, hence still a state).
    pub fn state_at(&self, t: f64) -> Result<DensityMatrix> {
        let (k, w) = self.locate(t)?;
        if w == 0.0 {
            return Ok(self.states[k].clone());
        }
        self.states[k + 1].mix(&self.states[k], w)
    }

    /// Index `k` and weight `w` with `t = (1 − w)·t_k + w·t_{k+1}`.
    pub(crate) fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let t0 = self.times[0];
        let t1 = self.t_final();
        let slack = 1e-12 * t1.abs().max(1.0);
        if !(t >= t0 - slack && t <= t1 + slack) {
            return Err(QslError::Domain(format!(
                "time {t} outside trajectory window [{t0}, {t1}]"
            )));
        }
        let t = t.clamp(t0, t1);
        let k = self.times.partition_point(|&s| s <= t).saturating_sub(1);
        if k + 1 >= self.len() {
            return Ok((self.len() - 1, 0.0));
        }
        let w = (t - self.times[k]) / (self.times[k + 1] - self.times[k]);
        Ok((k, w))
    }
}
