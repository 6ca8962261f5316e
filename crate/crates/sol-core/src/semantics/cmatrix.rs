//! Dense complex matrices.
//!
//! Scalars are 1x1, kets are n x 1 columns, bras are 1 x n rows. Kronecker
//! products put the left factor in the major (most significant) position.

use std::fmt;

use num_complex::Complex64;

#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> CMatrix {
        CMatrix { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> CMatrix {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn scalar(c: Complex64) -> CMatrix {
        CMatrix { rows: 1, cols: 1, data: vec![c] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> CMatrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    /// Row-major construction from a flat slice.
    pub fn from_slice(rows: usize, cols: usize, data: &[Complex64]) -> CMatrix {
        assert_eq!(data.len(), rows * cols);
        CMatrix { rows, cols, data: data.to_vec() }
    }

    /// 2x2 convenience constructor.
    pub fn two_by_two(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> CMatrix {
        CMatrix { rows: 2, cols: 2, data: vec![a, b, c, d] }
    }

    /// Standard-basis column vector `e_k` of length `n`.
    pub fn basis_column(n: usize, k: usize) -> CMatrix {
        let mut m = CMatrix::zeros(n, 1);
        m.set(k, 0, Complex64::new(1.0, 0.0));
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: Complex64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self.get(i1, j1);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for i2 in 0..other.rows {
                    for j2 in 0..other.cols {
                        out.set(
                            i1 * other.rows + i2,
                            j1 * other.cols + j2,
                            a * other.get(i2, j2),
                        );
                    }
                }
            }
        }
        out
    }

    /// Entrywise max modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn approx_eq(&self, other: &CMatrix, tol: f64) -> bool {
        (self.rows, self.cols) == (other.rows, other.cols)
            && self.sub(other).max_abs() <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.rows == self.cols && self.sub(&self.adjoint()).max_abs() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.rows == self.cols
            && self.adjoint().mul(self).sub(&CMatrix::identity(self.rows)).max_abs() <= tol
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let c = self.get(i, j);
                write!(f, "{:+.4}{:+.4}i  ", c.re, c.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mul_and_kron_shapes() {
        let a = CMatrix::two_by_two(c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0));
        let v = CMatrix::basis_column(2, 1);
        let av = a.mul(&v);
        assert_eq!((av.rows(), av.cols()), (2, 1));
        assert_eq!(av.get(0, 0), c(2.0, 0.0));
        assert_eq!(av.get(1, 0), c(4.0, 0.0));
        let k = a.kron(&CMatrix::identity(2));
        assert_eq!((k.rows(), k.cols()), (4, 4));
        assert_eq!(k.get(0, 0), c(1.0, 0.0));
        assert_eq!(k.get(1, 3), c(2.0, 0.0));
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let a = CMatrix::two_by_two(c(1.0, 1.0), c(0.0, 2.0), c(3.0, 0.0), c(0.0, -1.0));
        let ad = a.adjoint();
        assert_eq!(ad.get(0, 0), c(1.0, -1.0));
        assert_eq!(ad.get(0, 1), c(3.0, 0.0));
        assert_eq!(ad.get(1, 0), c(0.0, -2.0));
    }

    #[test]
    fn norms() {
        let h = CMatrix::two_by_two(
            c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            c(-std::f64::consts::FRAC_1_SQRT_2, 0.0),
        );
        assert!((h.frobenius() - std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!(h.is_unitary(1e-12));
        assert!(h.is_hermitian(1e-12));
    }
}
