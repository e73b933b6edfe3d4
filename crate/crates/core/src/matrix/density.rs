use num_complex::Complex64;

use super::{hermitian_eigensystem, ComplexMatrix, Eigensystem, HERMITIAN_TOL};
use crate::error::{QslError, Result};

pub const TRACE_TOL: f64 = 1e-9;
pub const PSD_TOL: f64 = 1e-9;
/// Relative size below which eigenvalues are treated as zero by `sqrt`.
pub const SQRT_FLOOR: f64 = 64.0 * f64::EPSILON;

/// A validated density operator: Hermitian, unit trace, positive semidefinite.
///
/// The stored matrix is the Hermitian part of the input, so round-off
/// below the Hermiticity tolerance never leaks into later computations.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(QslError::ContractViolation(format!(
                "density matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let dev = matrix.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(QslError::ContractViolation(format!(
                "density matrix not Hermitian (deviation {dev:e})"
            )));
        }
        let matrix = matrix.hermitian_part();
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(QslError::ContractViolation(format!("density matrix trace {tr} != 1")));
        }
        let min_eig = smallest_eigenvalue(&matrix)?;
        if min_eig < -PSD_TOL {
            return Err(QslError::ContractViolation(format!(
                "density matrix not positive semidefinite (min eigenvalue {min_eig:e})"
            )));
        }
        Ok(Self { matrix })
    }

    /// `|ψ><ψ|` for a (not necessarily normalised) state vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(QslError::ContractViolation("zero state vector".into()));
        }
        let v: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::outer(&v, &v))
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diag(probs))
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self {
            matrix: ComplexMatrix::from_real_diag(&vec![1.0 / n as f64; n]),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn eigensystem(&self) -> Eigensystem {
        hermitian_eigensystem(&self.matrix).expect("density matrices are Hermitian")
    }

    /// Principal square root. Eigenvalues within round-off of zero are set to
    /// zero so that rank-deficient states keep their exact support.
    pub fn sqrt(&self) -> ComplexMatrix {
        let es = self.eigensystem();
        let top = es.values.iter().copied().fold(0.0, f64::max);
        let floor = SQRT_FLOOR * top;
        es.apply_fn(|l| if l > floor { l.sqrt() } else { 0.0 })
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        self.eigensystem().values[0] >= 1.0 - tol
    }

    /// Whether the matrix is diagonal up to `tol` in max-abs off-diagonal entries.
    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.matrix[(i, j)].norm() <= tol))
    }

    /// Convex combination `a·self + (1 − a)·other`.
    pub fn mix(&self, other: &Self, a: f64) -> Result<Self> {
        let m = self.matrix.scale_real(a).try_add(&other.matrix.scale_real(1.0 - a))?;
        Self::new(m)
    }
}

fn smallest_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    if m.rows() == 2 {
        // Closed form for the common two-level case.
        let a = m[(0, 0)].re;
        let d = m[(1, 1)].re;
        let b = m[(0, 1)].norm();
        let mean = 0.5 * (a + d);
        let half_gap = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        return Ok(mean - half_gap);
    }
    let e = hermitian_eigensystem(m)?;
    Ok(*e.values.last().expect("non-empty"))
}

/// Traces out the environment of a `sys_dim × env_dim` bipartite state
/// whose row index is `s·env_dim + e` (system is the slow index).
pub fn partial_trace_env(rho_total: &DensityMatrix, sys_dim: usize, env_dim: usize) -> Result<DensityMatrix> {
    if sys_dim == 0 || env_dim == 0 || sys_dim * env_dim != rho_total.dim() {
        return Err(QslError::dims(format!("{sys_dim}*{env_dim}"), rho_total.dim()));
    }
    let m = rho_total.matrix();
    let mut out = ComplexMatrix::zeros(sys_dim, sys_dim);
    for i in 0..sys_dim {
        for j in 0..sys_dim {
            out[(i, j)] = (0..env_dim).map(|e| m[(i * env_dim + e, j * env_dim + e)]).sum();
        }
    }
    DensityMatrix::new(out)
}
