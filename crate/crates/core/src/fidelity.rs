//! Fidelities and distances between density matrices.
//!
//! The relative-purity fidelity is asymmetric: the second argument is the
//! reference state whose Hilbert–Schmidt norm normalises the overlap. Its
//! square, `Tr{ρ1ρ2}/‖ρ2‖_HS`, is linear in the first argument.

use crate::error::{QslError, Result};
use crate::matrix::{hs_norm, singular_values, trace_norm, trace_of_product, DensityMatrix};

/// Tolerance before an out-of-range fidelity is treated as an error.
pub const FIDELITY_TOL: f64 = 1e-9;

/// A fidelity in `[0, 1]` together with its angle `arccos(value)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityValue {
    pub value: f64,
    pub angle: f64,
}

impl FidelityValue {
    /// Clamps into `[0, 1]`; values further than [`FIDELITY_TOL`] outside are rejected.
    pub fn new(raw: f64) -> Result<Self> {
        if !(-FIDELITY_TOL..=1.0 + FIDELITY_TOL).contains(&raw) {
            return Err(QslError::FidelityOutOfRange(raw));
        }
        let value = raw.clamp(0.0, 1.0);
        Ok(Self {
            value,
            angle: value.acos(),
        })
    }
}

fn check_dims(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(QslError::dims(a.dim(), b.dim()));
    }
    Ok(())
}

/// `F_R(ρ1, ρ2)²·‖ρ2‖_HS = Tr{ρ1ρ2}`; the squared, linear form.
pub fn relative_purity_squared(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    check_dims(rho1, rho2)?;
    let overlap = trace_of_product(rho1.matrix(), rho2.matrix())?.re;
    Ok(overlap / hs_norm(rho2.matrix()))
}

/// `F_R = ‖√ρ1√ρ2‖_HS / √‖ρ2‖_HS`.
pub fn relative_purity_fidelity(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<FidelityValue> {
    let sq = relative_purity_squared(rho1, rho2)?;
    // Round-off can push a zero overlap slightly negative.
    FidelityValue::new(sq.max(0.0).sqrt())
}

/// Bures fidelity `‖√ρ1√ρ2‖_tr`.
pub fn bures_fidelity(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<FidelityValue> {
    check_dims(rho1, rho2)?;
    let prod = &rho1.sqrt() * &rho2.sqrt();
    FidelityValue::new(trace_norm(&prod))
}

/// `F′ = ‖√ρ1√ρ2‖_HS / √(‖ρ1‖_HS‖ρ2‖_HS)`, symmetric in its arguments.
pub fn symmetric_fidelity(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<FidelityValue> {
    check_dims(rho1, rho2)?;
    let prod = &rho1.sqrt() * &rho2.sqrt();
    let denom = (hs_norm(rho1.matrix()) * hs_norm(rho2.matrix())).sqrt();
    FidelityValue::new(hs_norm(&prod) / denom)
}

/// `½‖ρ1 − ρ2‖_tr`.
pub fn trace_distance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    check_dims(rho1, rho2)?;
    let diff = rho1.matrix().try_sub(rho2.matrix())?;
    let sv: f64 = singular_values(&diff).iter().sum();
    Ok((0.5 * sv).clamp(0.0, 1.0))
}
