//! Hermitian eigenvalue computation, backed by nalgebra's tridiagonalisation
//! based symmetric eigensolver (values only).

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::cmatrix::CMatrix;

fn to_na(m: &CMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j))
}

/// Eigenvalues of a (nearly) Hermitian matrix, in ascending order. The input
/// is symmetrised as `(A + A^H)/2` first so that tolerance-level asymmetry
/// does not disturb the solver.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    assert_eq!(m.rows(), m.cols(), "eigenvalues need a square matrix");
    let herm = m.add(&m.adjoint()).scale(Complex64::new(0.5, 0.0));
    let na = to_na(&herm);
    let mut vals: Vec<f64> = na.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// Positive semidefiniteness within an absolute tolerance: Hermitian within
/// `tol` and minimum eigenvalue at least `-tol`.
pub fn is_psd(m: &CMatrix, tol: f64) -> bool {
    m.is_hermitian(tol) && min_eigenvalue(m) >= -tol
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pauli_z_eigenvalues() {
        let z = CMatrix::two_by_two(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0));
        let vals = hermitian_eigenvalues(&z);
        assert!((vals[0] + 1.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pauli_x_is_not_psd() {
        let x = CMatrix::two_by_two(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        assert!(!is_psd(&x, 1e-9));
        assert!((min_eigenvalue(&x) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn projector_is_psd() {
        let p = CMatrix::two_by_two(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert!(is_psd(&p, 1e-9));
    }
}
