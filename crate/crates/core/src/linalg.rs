//! Dense vector helpers and a small linear-map abstraction.
//!
//! Vectors are plain `Vec<f64>` / `&[f64]`; the solvers only need a handful
//! of BLAS-1 style kernels, which live here.

use crate::error::{Error, Result};

/// Dense real vector. All entries are expected to be finite on public boundaries.
pub type RealVec = Vec<f64>;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn add(a: &[f64], b: &[f64]) -> RealVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> RealVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(alpha: f64, a: &[f64]) -> RealVec {
    a.iter().map(|x| alpha * x).collect()
}

pub fn is_finite(a: &[f64]) -> bool {
    a.iter().all(|x| x.is_finite())
}

pub fn ensure_finite(a: &[f64]) -> Result<()> {
    if is_finite(a) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn ensure_dim(a: &[f64], expected: usize) -> Result<()> {
    if a.len() == expected {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got: a.len() })
    }
}

/// A real linear map with access to its transpose, used for spectral norm estimates.
pub trait LinearMap: Sync {
    fn dim_in(&self) -> usize;
    fn dim_out(&self) -> usize;
    fn apply(&self, x: &[f64], out: &mut [f64]);
    fn apply_transpose(&self, y: &[f64], out: &mut [f64]);
}

impl LinearMap for nalgebra::DMatrix<f64> {
    fn dim_in(&self) -> usize {
        self.ncols()
    }
    fn dim_out(&self) -> usize {
        self.nrows()
    }
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let xv = nalgebra::DVectorView::from_slice(x, self.ncols());
        let r = self * xv;
        out.copy_from_slice(r.as_slice());
    }
    fn apply_transpose(&self, y: &[f64], out: &mut [f64]) {
        let yv = nalgebra::DVectorView::from_slice(y, self.nrows());
        let r = self.tr_mul(&yv);
        out.copy_from_slice(r.as_slice());
    }
}

/// Smallest and largest eigenvalue of a symmetric matrix.
pub fn sym_eig_extremes(m: &nalgebra::DMatrix<f64>) -> (f64, f64) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = nalgebra::SymmetricEigen::new(sym);
    let lo = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Spectral norm of a matrix via the largest eigenvalue of `MᵀM`.
pub fn spectral_norm(m: &nalgebra::DMatrix<f64>) -> f64 {
    let gram = m.transpose() * m;
    sym_eig_extremes(&gram).1.max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn kernels() {
        let a = [3.0, 4.0];
        assert_eq!(norm(&a), 5.0);
        let mut y = vec![1.0, 1.0];
        axpy(2.0, &a, &mut y);
        assert_eq!(y, vec![7.0, 9.0]);
        assert!(ensure_finite(&[1.0, f64::NAN]).is_err());
        assert!(ensure_dim(&a, 3).is_err());
    }

    #[test]
    fn dense_map_transpose() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let mut out = vec![0.0; 2];
        m.apply(&[1.0, 0.0, -1.0], &mut out);
        assert_eq!(out, vec![-2.0, -2.0]);
        let mut back = vec![0.0; 3];
        m.apply_transpose(&[1.0, 1.0], &mut back);
        assert_eq!(back, vec![5.0, 7.0, 9.0]);
    }

    #[test]
    fn spectral_norm_diag() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-3.0, 1.0]));
        assert!((spectral_norm(&m) - 3.0).abs() < 1e-12);
    }
}
