//! Dense complex matrices in row-major storage.
//!
//! Dense work stays small here (observable reductions, eigenproblems, the
//! vectorized-superoperator oracle); the propagation hot path runs on
//! [`crate::algebra::sparse::SparseOperator`] instead, so these kernels favor
//! clarity over blocking tricks.

use crate::error::{CoreError, Result};
use crate::scalar::{c_zero, Scalar};
use num_complex::Complex;
use std::ops::{Index, IndexMut};

/// Dense `rows x cols` complex matrix, row-major.
#[derive(Clone, PartialEq, Debug)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> ComplexMatrix<T> {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![c_zero(); rows * cols],
        }
    }

    /// Identity matrix of order `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    /// Builds a matrix from a generator over (row, col).
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Wraps a row-major buffer; the length must match the shape.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(CoreError::DimensionMismatch(format!(
                "buffer of length {} cannot fill a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Diagonal matrix from the given entries.
    pub fn from_diag(diag: &[Complex<T>]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
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

    /// Row-major backing slice.
    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    /// Contiguous view of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [Complex<T>] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Fills with zeros, keeping the allocation.
    pub fn fill_zero(&mut self) {
        self.data.fill(c_zero());
    }

    /// Copies `other` into this matrix, shapes must agree.
    pub fn copy_from(&mut self, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data.copy_from_slice(&other.data);
    }

    /// `self + other`, shapes must agree.
    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    /// `self - other`, shapes must agree.
    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shape mismatch in elementwise op"
        );
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// `self * k` with a complex scale.
    pub fn scaled(&self, k: Complex<T>) -> Self {
        let data = self.data.iter().map(|&a| a * k).collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// `self += k * other`, the RK4 workhorse.
    pub fn axpy(&mut self, k: Complex<T>, other: &Self) {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shape mismatch in axpy"
        );
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += k * b;
        }
    }

    /// Matrix product `self * other` (ikj loop order).
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "inner dimension mismatch in matrix product"
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let arow = self.row(i);
            let orow_len = other.cols;
            let out_row = &mut out.data[i * orow_len..(i + 1) * orow_len];
            for (k, &aik) in arow.iter().enumerate() {
                if aik == c_zero() {
                    continue;
                }
                let brow = other.row(k);
                for (o, &bkj) in out_row.iter_mut().zip(brow) {
                    *o += aik * bkj;
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Plain transpose.
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        let data = self.data.iter().map(|a| a.conj()).collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Sum of diagonal entries.
    pub fn trace(&self) -> Complex<T> {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self[(i, i)]).fold(c_zero(), |s, x| s + x)
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .map(|a| a.norm_sqr())
            .fold(T::zero(), |s, x| s + x)
            .sqrt()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .map(|a| a.norm())
            .fold(T::zero(), |m, x| if x > m { x } else { m })
    }

    /// Induced 1-norm: maximum absolute column sum.
    pub fn one_norm(&self) -> T {
        let mut best = T::zero();
        for j in 0..self.cols {
            let mut s = T::zero();
            for i in 0..self.rows {
                s += self[(i, j)].norm();
            }
            if s > best {
                best = s;
            }
        }
        best
    }

    /// Largest deviation from Hermitian symmetry, max |A - A^dag|.
    pub fn hermitian_deviation(&self) -> T {
        assert!(self.is_square(), "Hermiticity of a non-square matrix");
        let mut dev = T::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                if d > dev {
                    dev = d;
                }
            }
        }
        dev
    }

    /// Replaces the matrix with its Hermitian part (A + A^dag)/2.
    pub fn symmetrize(&mut self) {
        assert!(self.is_square(), "symmetrize of a non-square matrix");
        let half = Complex::new(T::from_f64(0.5).unwrap(), T::zero());
        for i in 0..self.rows {
            for j in i..self.cols {
                let a = self[(i, j)];
                let b = self[(j, i)];
                let m = (a + b.conj()) * half;
                self[(i, j)] = m;
                self[(j, i)] = m.conj();
            }
        }
    }

    /// Kronecker product `self (x) other`.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == c_zero() {
                    continue;
                }
                for p in 0..other.rows {
                    for q in 0..other.cols {
                        out[(i * other.rows + p, j * other.cols + q)] = a * other[(p, q)];
                    }
                }
            }
        }
        out
    }

    /// Largest entry magnitude of `self - other`, for test assertions.
    pub fn max_diff(&self, other: &Self) -> T {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shape mismatch in max_diff"
        );
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).norm())
            .fold(T::zero(), |m, x| if x > m { x } else { m })
    }

    /// Column-stacked vector of the matrix (vec operator, column-major).
    pub fn col_stack(&self) -> Vec<Complex<T>> {
        let mut v = Vec::with_capacity(self.rows * self.cols);
        for j in 0..self.cols {
            for i in 0..self.rows {
                v.push(self[(i, j)]);
            }
        }
        v
    }

    /// Inverse of [`Self::col_stack`] for square matrices of order `n`.
    pub fn from_col_stack(n: usize, v: &[Complex<T>]) -> Result<Self> {
        if v.len() != n * n {
            return Err(CoreError::DimensionMismatch(format!(
                "vector of length {} is not a stacked {}x{} matrix",
                v.len(),
                n,
                n
            )));
        }
        Ok(Self::from_fn(n, n, |i, j| v[j * n + i]))
    }
}

impl<T: Scalar> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Scalar> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

/// Free-function form of the Kronecker product.
pub fn kron<T: Scalar>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    a.kron(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    fn m2(a: f64, b: f64, c: f64, d: f64) -> ComplexMatrix<f64> {
        ComplexMatrix::from_vec(
            2,
            2,
            vec![cplx(a, 0.0), cplx(b, 0.0), cplx(c, 0.0), cplx(d, 0.0)],
        )
        .unwrap()
    }

    #[test]
    fn product_matches_hand_computation() {
        let a = m2(1.0, 2.0, 3.0, 4.0);
        let b = m2(5.0, 6.0, 7.0, 8.0);
        let c = a.mul(&b);
        assert_eq!(c[(0, 0)], cplx(19.0, 0.0));
        assert_eq!(c[(0, 1)], cplx(22.0, 0.0));
        assert_eq!(c[(1, 0)], cplx(43.0, 0.0));
        assert_eq!(c[(1, 1)], cplx(50.0, 0.0));
    }

    #[test]
    fn kron_matches_hand_computation() {
        let a = m2(1.0, 2.0, 3.0, 4.0);
        let b = m2(0.0, 1.0, 1.0, 0.0);
        let k = a.kron(&b);
        assert_eq!(k.rows(), 4);
        // block (0,0) is 1*b
        assert_eq!(k[(0, 1)], cplx(1.0, 0.0));
        assert_eq!(k[(1, 0)], cplx(1.0, 0.0));
        // block (0,1) is 2*b
        assert_eq!(k[(0, 3)], cplx(2.0, 0.0));
        // block (1,1) is 4*b
        assert_eq!(k[(3, 2)], cplx(4.0, 0.0));
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let mut a = ComplexMatrix::<f64>::zeros(2, 2);
        a[(0, 1)] = cplx(0.0, 2.0);
        let ad = a.adjoint();
        assert_eq!(ad[(1, 0)], cplx(0.0, -2.0));
        assert_eq!(ad[(0, 1)], cplx(0.0, 0.0));
    }

    #[test]
    fn symmetrize_zeroes_hermitian_deviation() {
        let mut a = m2(1.0, 2.0, 0.0, 3.0);
        a[(0, 1)] = cplx(2.0, 1.0);
        assert!(a.hermitian_deviation() > 1.0);
        a.symmetrize();
        assert_eq!(a.hermitian_deviation(), 0.0);
    }

    #[test]
    fn norms_and_trace() {
        let a = m2(3.0, 0.0, 4.0, 0.0);
        assert_eq!(a.frobenius_norm(), 5.0);
        assert_eq!(a.one_norm(), 7.0);
        assert_eq!(a.trace(), cplx(3.0, 0.0));
        assert_eq!(a.max_abs(), 4.0);
    }

    #[test]
    fn col_stack_roundtrip() {
        let a = m2(1.0, 2.0, 3.0, 4.0);
        let v = a.col_stack();
        // column-major: (1,3,2,4)
        assert_eq!(v[1], cplx(3.0, 0.0));
        let back = ComplexMatrix::from_col_stack(2, &v).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn from_vec_rejects_bad_length() {
        assert!(ComplexMatrix::<f64>::from_vec(2, 2, vec![cplx(1.0, 0.0)]).is_err());
    }
}
