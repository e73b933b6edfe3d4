//! Random matrix ensembles used by property campaigns and the dot model.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{ComplexMatrix, DensityMatrix};

/// Standard complex Gaussian: real and imaginary parts each `N(0, 1/2)`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Ginibre matrix with unit-variance complex Gaussian entries.
pub fn complex_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let data = (0..rows * cols).map(|_| complex_normal(rng)).collect();
    ComplexMatrix::new(rows, cols, data).expect("finite samples")
}

pub fn hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    complex_gaussian(n, n, rng).hermitian_part()
}

/// `G G†` for a Ginibre `G`: positive semidefinite, full rank almost surely.
pub fn positive_semidefinite<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = complex_gaussian(n, n, rng);
    (&g * &g.dagger()).hermitian_part()
}

/// Random mixed state from the Hilbert–Schmidt measure.
pub fn density_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityMatrix {
    let w = positive_semidefinite(n, rng);
    let tr = w.trace().re;
    DensityMatrix::new(w.scale_real(1.0 / tr)).expect("normalised Wishart matrix is a state")
}

pub fn state_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n).map(|_| complex_normal(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

pub fn pure_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityMatrix {
    DensityMatrix::pure(&state_vector(n, rng)).expect("normalised vector")
}
