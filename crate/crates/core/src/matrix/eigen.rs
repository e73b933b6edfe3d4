use num_complex::Complex64;

use super::{ComplexMatrix, HERMITIAN_TOL};
use crate::error::{QslError, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues (descending) and the unitary whose columns are the matching
/// eigenvectors, so that `A = V diag(values) V†`.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    /// `V f(diag) V†` for a real function of the eigenvalues.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        let v = &self.vectors;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, &w) in fv.iter().enumerate() {
                    acc += v[(i, k)] * v[(j, k)].conj() * w;
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_fn(|l| l)
    }
}

/// Cyclic Jacobi diagonalisation of a Hermitian matrix.
pub fn hermitian_eigensystem(a: &ComplexMatrix) -> Result<Eigensystem> {
    if !a.is_square() {
        return Err(QslError::ContractViolation(format!(
            "eigensystem needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let dev = a.hermitian_deviation();
    let scale = a.max_abs().max(1.0);
    if dev > HERMITIAN_TOL * scale {
        return Err(QslError::ContractViolation(format!(
            "matrix is not Hermitian (deviation {dev:e})"
        )));
    }

    let n = a.rows();
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);

    let frob: f64 = m.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let stop = f64::EPSILON * frob.max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= stop {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].re.total_cmp(&m[(i, i)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, col)] = v[(r, src)];
        }
    }
    Ok(Eigensystem { values, vectors })
}

/// One unitary rotation zeroing `m[p][q]`.
///
/// With `m[p][q] = |m_pq| e^{iφ}` the rotation is `J = diag(1, e^{-iφ})·R(θ)`
/// acting on the (p, q) plane, and `m ← J† m J`, `v ← v J`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    // Skip entries already negligible against both diagonal entries.
    if mag < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        m[(p, q)] = Complex64::new(0.0, 0.0);
        m[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let phase = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = m.rows();

    // Columns: col_p' = c col_p − s e^{-iφ} col_q ; col_q' = s col_p + c e^{-iφ} col_q
    let ph_conj = phase.conj();
    for r in 0..n {
        let xp = m[(r, p)];
        let xq = m[(r, q)];
        m[(r, p)] = xp * c - xq * ph_conj * s;
        m[(r, q)] = xp * s + xq * ph_conj * c;
        let vp = v[(r, p)];
        let vq = v[(r, q)];
        v[(r, p)] = vp * c - vq * ph_conj * s;
        v[(r, q)] = vp * s + vq * ph_conj * c;
    }
    // Rows: row_p' = c row_p − s e^{iφ} row_q ; row_q' = s row_p + c e^{iφ} row_q
    for col in 0..n {
        let xp = m[(p, col)];
        let xq = m[(q, col)];
        m[(p, col)] = xp * c - xq * phase * s;
        m[(q, col)] = xp * s + xq * phase * c;
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
}
