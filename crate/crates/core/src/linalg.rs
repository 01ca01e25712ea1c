//! Small dense helpers shared by the geometry modules.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

pub type Vector = DVector<f64>;
pub type Operator = DMatrix<f64>;

/// Largest absolute entry; 0 for an empty matrix.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub fn max_abs_vec(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .fold(0.0_f64, |acc, s| acc.max(*s))
}

pub fn commutator(p: &DMatrix<f64>, q: &DMatrix<f64>) -> DMatrix<f64> {
    p * q - q * p
}

pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
}

pub fn random_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0))
}

/// Random symmetric matrix with entries in [-scale, scale].
pub fn random_symmetric<R: Rng + ?Sized>(dim: usize, scale: f64, rng: &mut R) -> DMatrix<f64> {
    let m = random_matrix(dim, dim, rng);
    (&m + m.transpose()) * (0.5 * scale)
}

/// Haar-ish random orthogonal matrix from the QR factor of a random matrix.
pub fn random_orthogonal<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<f64> {
    loop {
        let m = random_matrix(dim, dim, rng);
        let qr = m.qr();
        let r = qr.r();
        if (0..dim).all(|i| r[(i, i)].abs() > 1e-6) {
            let mut q = qr.q();
            for i in 0..dim {
                if r[(i, i)] < 0.0 {
                    let mut col = q.column_mut(i);
                    col.neg_mut();
                }
            }
            return q;
        }
    }
}
