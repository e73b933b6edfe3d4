//! Dense complex matrix kernels.
//!
//! Everything here works on small-to-moderate dense matrices (the two-level
//! systems and their environments). Hermitian eigensystems use cyclic Jacobi
//! rotations; singular values come from the eigensystem of `A†A`.

mod density;
mod eigen;
pub mod random;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{QslError, Result};

pub use density::{partial_trace_env, DensityMatrix};
pub use eigen::{hermitian_eigensystem, Eigensystem};

pub(crate) const C0: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Default tolerance for "is Hermitian" checks (max-abs deviation from `A†`).
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(QslError::ContractViolation(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(QslError::dims(rows * cols, data.len()));
        }
        if let Some(z) = data.iter().find(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(QslError::ContractViolation(format!("non-finite entry {z}")));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C1;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Real-valued matrix from nested rows. Panics on ragged input.
    pub fn from_real_rows<const C: usize>(rows: &[[f64; C]]) -> Self {
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)))
            .collect();
        Self {
            rows: rows.len(),
            cols: C,
            data,
        }
    }

    pub fn from_rows<const C: usize>(rows: &[[Complex64; C]]) -> Self {
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self {
            rows: rows.len(),
            cols: C,
            data,
        }
    }

    /// Outer product `|a><b|`.
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Self {
        let mut m = Self::zeros(a.len(), b.len());
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                m[(i, j)] = ai * bj.conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn dagger(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from the conjugate transpose.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        let mut m = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = 0.5 * (self[(i, j)] + self[(j, i)].conj());
            }
        }
        m
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(QslError::dims(
                format!("{}xN", self.cols),
                format!("{}x{}", other.rows, other.cols),
            ));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == C0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.cols {
            return Err(QslError::dims(self.cols, x.len()));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Kronecker product `self ⊗ other`; `self` carries the slow index.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut m = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        m[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        m
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(QslError::dims(
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", other.rows, other.cols),
            ));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

// Operator sugar panics on shape mismatch; use `try_*`/`matmul` for fallible paths.
impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        self.try_add(rhs).expect("matrix shapes must agree")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        self.try_sub(rhs).expect("matrix shapes must agree")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.matmul(rhs).expect("inner dimensions must agree")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Schatten norm selector: a finite `p >= 1` or the operator norm (`p -> ∞`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Schatten {
    P(f64),
    Op,
}

impl Schatten {
    pub const TRACE: Schatten = Schatten::P(1.0);
    pub const HILBERT_SCHMIDT: Schatten = Schatten::P(2.0);
}

/// Singular values in descending order, `min(rows, cols)` of them.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    // Gram matrix on the smaller side keeps the length at min(dims).
    let gram = if a.rows >= a.cols {
        &a.dagger() * a
    } else {
        a * &a.dagger()
    };
    let eig = hermitian_eigensystem(&gram.hermitian_part()).expect("Gram matrix is Hermitian by construction");
    // Eigenvalues of the Gram matrix at round-off level are exact zeros.
    let floor = 64.0 * f64::EPSILON * eig.values.first().copied().unwrap_or(0.0);
    eig.values
        .iter()
        .map(|&l| if l > floor { l.sqrt() } else { 0.0 })
        .collect()
}

pub fn schatten_norm(a: &ComplexMatrix, p: Schatten) -> Result<f64> {
    let sv = singular_values(a);
    match p {
        Schatten::Op => Ok(sv[0]),
        Schatten::P(p) if p.is_nan() || p < 1.0 => {
            Err(QslError::Domain(format!("Schatten exponent must be >= 1, got {p}")))
        }
        Schatten::P(p) if p.is_infinite() => Ok(sv[0]),
        Schatten::P(p) => {
            // Scale by the largest value so large p does not overflow.
            let top = sv[0];
            if top == 0.0 {
                return Ok(0.0);
            }
            let s: f64 = sv.iter().map(|&x| (x / top).powf(p)).sum();
            Ok(top * s.powf(1.0 / p))
        }
    }
}

pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    singular_values(a)[0]
}

pub fn trace_norm(a: &ComplexMatrix) -> f64 {
    singular_values(a).iter().sum()
}

/// Hilbert–Schmidt (Frobenius) norm, computed directly from the entries.
pub fn hs_norm(a: &ComplexMatrix) -> f64 {
    a.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `σ1 − σN` over all `N` singular values of a square matrix, zeros included.
pub fn spread_norm(a: &ComplexMatrix) -> Result<f64> {
    if !a.is_square() {
        return Err(QslError::ContractViolation(format!(
            "spread norm needs a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    let sv = singular_values(a);
    Ok(sv[0] - sv[sv.len() - 1])
}

/// `AB − BA`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() || !b.is_square() || a.rows != b.rows {
        return Err(QslError::dims(
            format!("{0}x{0}", a.rows),
            format!("{}x{}", b.rows, b.cols),
        ));
    }
    Ok(&(a * b) - &(b * a))
}

/// `Tr{AB}` without forming the product.
pub fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    if a.cols != b.rows || a.rows != b.cols {
        return Err(QslError::dims(
            format!("{}x{}", a.cols, a.rows),
            format!("{}x{}", b.rows, b.cols),
        ));
    }
    let mut acc = C0;
    for i in 0..a.rows {
        for k in 0..a.cols {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    Ok(acc)
}
