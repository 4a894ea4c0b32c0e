//! Sparse operators in canonical triplet form.
//!
//! Embedded subsystem operators touch only a vanishing fraction of the
//! composite Hilbert space, so the propagation kernels run on sorted triplet
//! lists. Canonical form: entries sorted by (row, col), no duplicates, no
//! stored exact zeros; `to_dense` therefore reproduces the matrix an operator
//! was built from entry for entry.

use crate::algebra::matrix::ComplexMatrix;
use crate::error::{CoreError, Result};
use crate::scalar::{c_zero, Scalar};
use num_complex::Complex;

/// Sparse complex operator; indices are `u32`, ample for every layout here.
#[derive(Clone, PartialEq, Debug)]
pub struct SparseOperator<T> {
    rows: usize,
    cols: usize,
    entries: Vec<(u32, u32, Complex<T>)>,
}

impl<T: Scalar> SparseOperator<T> {
    /// Operator with no stored entries (the zero operator).
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    /// Sparse identity of order `n`.
    pub fn identity(n: usize) -> Self {
        let entries = (0..n)
            .map(|i| (i as u32, i as u32, Complex::new(T::one(), T::zero())))
            .collect();
        Self {
            rows: n,
            cols: n,
            entries,
        }
    }

    /// Builds from arbitrary triplets: bounds-checked, duplicates summed,
    /// exact zeros dropped, result sorted.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Complex<T>)>,
    ) -> Result<Self> {
        let mut entries: Vec<(u32, u32, Complex<T>)> = Vec::new();
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(CoreError::DimensionMismatch(format!(
                    "triplet ({r}, {c}) outside a {rows}x{cols} operator"
                )));
            }
            entries.push((r as u32, c as u32, v));
        }
        Ok(Self::canonicalize(rows, cols, entries))
    }

    /// Internal constructor for entries already known to be in canonical
    /// order; debug-checked.
    pub(crate) fn from_sorted_entries(
        rows: usize,
        cols: usize,
        entries: Vec<(u32, u32, Complex<T>)>,
    ) -> Self {
        debug_assert!(entries.windows(2).all(|w| (w[0].0, w[0].1) < (w[1].0, w[1].1)));
        debug_assert!(entries.iter().all(|e| e.2 != c_zero()));
        Self {
            rows,
            cols,
            entries,
        }
    }

    fn canonicalize(rows: usize, cols: usize, mut raw: Vec<(u32, u32, Complex<T>)>) -> Self {
        raw.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut entries: Vec<(u32, u32, Complex<T>)> = Vec::with_capacity(raw.len());
        for (r, c, v) in raw {
            match entries.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => entries.push((r, c, v)),
            }
        }
        entries.retain(|e| e.2 != c_zero());
        Self {
            rows,
            cols,
            entries,
        }
    }

    /// Converts a dense matrix, dropping exact zeros.
    pub fn from_dense(m: &ComplexMatrix<T>) -> Self {
        let mut entries = Vec::new();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let v = m[(i, j)];
                if v != c_zero() {
                    entries.push((i as u32, j as u32, v));
                }
            }
        }
        Self {
            rows: m.rows(),
            cols: m.cols(),
            entries,
        }
    }

    /// Dense materialization; exact, no rounding is involved.
    pub fn to_dense(&self) -> ComplexMatrix<T> {
        let mut m = ComplexMatrix::zeros(self.rows, self.cols);
        for &(r, c, v) in &self.entries {
            m[(r as usize, c as usize)] = v;
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

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Canonical triplet view.
    pub fn entries(&self) -> &[(u32, u32, Complex<T>)] {
        &self.entries
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|&(r, c, v)| (c, r, v.conj()))
            .collect();
        Self::canonicalize(self.cols, self.rows, entries)
    }

    /// Scales every entry; scaling by zero yields the empty operator.
    pub fn scaled(&self, k: Complex<T>) -> Self {
        if k == c_zero() {
            return Self::zero(self.rows, self.cols);
        }
        let entries = self
            .entries
            .iter()
            .map(|&(r, c, v)| (r, c, v * k))
            .collect();
        Self::canonicalize(self.rows, self.cols, entries)
    }

    /// Sum of two operators of identical shape.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shape mismatch in sparse add"
        );
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Self::canonicalize(self.rows, self.cols, entries)
    }

    /// Sparse-sparse product `self * other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "inner dimension mismatch in sparse product"
        );
        let other_row_ptr = other.row_pointers();
        let mut entries = Vec::new();
        let mut i = 0;
        while i < self.entries.len() {
            let row = self.entries[i].0;
            let row_end = self.entries[i..]
                .iter()
                .position(|e| e.0 != row)
                .map(|p| i + p)
                .unwrap_or(self.entries.len());
            // gather this output row through a scratch map keyed by column
            let mut acc: Vec<(u32, Complex<T>)> = Vec::new();
            for &(_, k, v) in &self.entries[i..row_end] {
                let (lo, hi) = (other_row_ptr[k as usize], other_row_ptr[k as usize + 1]);
                for &(_, j, w) in &other.entries[lo..hi] {
                    match acc.iter_mut().find(|e| e.0 == j) {
                        Some(e) => e.1 += v * w,
                        None => acc.push((j, v * w)),
                    }
                }
            }
            for (j, v) in acc {
                entries.push((row, j, v));
            }
            i = row_end;
        }
        Self::canonicalize(self.rows, other.cols, entries)
    }

    /// CSR-style row offsets into the sorted entry list.
    pub(crate) fn row_pointers(&self) -> Vec<usize> {
        let mut ptr = vec![0usize; self.rows + 1];
        for &(r, _, _) in &self.entries {
            ptr[r as usize + 1] += 1;
        }
        for i in 0..self.rows {
            ptr[i + 1] += ptr[i];
        }
        ptr
    }

    /// `out = self * x` for a dense right factor; `out` is overwritten.
    pub fn apply_left(&self, x: &ComplexMatrix<T>, out: &mut ComplexMatrix<T>) {
        assert_eq!(self.cols, x.rows(), "shape mismatch in apply_left");
        assert_eq!(
            (out.rows(), out.cols()),
            (self.rows, x.cols()),
            "output shape mismatch in apply_left"
        );
        out.fill_zero();
        for &(r, c, v) in &self.entries {
            let src = x.row(c as usize);
            let dst = out.row_mut(r as usize);
            for (d, &s) in dst.iter_mut().zip(src) {
                *d += v * s;
            }
        }
    }

    /// `out = x * self` for a dense left factor; `out` is overwritten.
    pub fn apply_right(&self, x: &ComplexMatrix<T>, out: &mut ComplexMatrix<T>) {
        assert_eq!(x.cols(), self.rows, "shape mismatch in apply_right");
        assert_eq!(
            (out.rows(), out.cols()),
            (x.rows(), self.cols),
            "output shape mismatch in apply_right"
        );
        out.fill_zero();
        for i in 0..x.rows() {
            let src = x.row(i);
            let dst = out.row_mut(i);
            for &(r, c, v) in &self.entries {
                dst[c as usize] += src[r as usize] * v;
            }
        }
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> T {
        self.entries
            .iter()
            .map(|e| e.2.norm())
            .fold(T::zero(), |m, x| if x > m { x } else { m })
    }

    /// Largest deviation from Hermitian symmetry.
    pub fn hermitian_deviation(&self) -> T {
        assert!(self.is_square(), "Hermiticity of a non-square operator");
        self.adjoint()
            .add(&self.scaled(Complex::new(-T::one(), T::zero())))
            .max_abs()
    }

    /// If every entry shifts the charge `q(row) - q(col)` by one common
    /// amount, returns that shift; `None` means the operator is not
    /// charge-homogeneous. The empty operator reports a zero shift.
    pub fn charge_shift(&self, charge: &[i64]) -> Option<i64> {
        assert!(self.is_square(), "charge shift of a non-square operator");
        assert_eq!(charge.len(), self.rows, "charge table length mismatch");
        let mut shift: Option<i64> = None;
        for &(r, c, _) in &self.entries {
            let s = charge[r as usize] - charge[c as usize];
            match shift {
                None => shift = Some(s),
                Some(prev) if prev != s => return None,
                _ => {}
            }
        }
        shift.or(Some(0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    #[test]
    fn canonicalization_merges_and_drops() {
        let s = SparseOperator::from_triplets(
            2,
            2,
            vec![
                (1, 0, cplx::<f64>(2.0, 0.0)),
                (0, 0, cplx(1.0, 0.0)),
                (1, 0, cplx(-2.0, 0.0)),
                (0, 1, cplx(0.5, 0.5)),
            ],
        )
        .unwrap();
        // (1,0) cancels exactly and disappears; order is (0,0), (0,1)
        assert_eq!(s.nnz(), 2);
        assert_eq!(s.entries()[0], (0, 0, cplx(1.0, 0.0)));
        assert_eq!(s.entries()[1], (0, 1, cplx(0.5, 0.5)));
    }

    #[test]
    fn dense_roundtrip_is_exact() {
        let mut m = ComplexMatrix::<f64>::zeros(3, 2);
        m[(0, 1)] = cplx(1.0, -2.0);
        m[(2, 0)] = cplx(0.25, 0.0);
        let s = SparseOperator::from_dense(&m);
        assert_eq!(s.nnz(), 2);
        assert_eq!(s.to_dense(), m);
    }

    #[test]
    fn product_matches_dense() {
        let a = SparseOperator::from_triplets(
            2,
            3,
            vec![(0, 1, cplx::<f64>(1.0, 0.0)), (1, 2, cplx(2.0, 1.0))],
        )
        .unwrap();
        let b = SparseOperator::from_triplets(
            3,
            2,
            vec![(1, 0, cplx(3.0, 0.0)), (2, 1, cplx(0.0, 1.0))],
        )
        .unwrap();
        let ab = a.mul(&b);
        let dense = a.to_dense().mul(&b.to_dense());
        assert_eq!(ab.to_dense(), dense);
    }

    #[test]
    fn apply_left_right_match_dense_products() {
        let s = SparseOperator::from_triplets(
            3,
            3,
            vec![
                (0, 1, cplx::<f64>(1.0, 0.5)),
                (2, 0, cplx(-1.0, 0.0)),
                (2, 2, cplx(0.0, 2.0)),
            ],
        )
        .unwrap();
        let x = ComplexMatrix::from_fn(3, 3, |i, j| cplx((i + 2 * j) as f64, j as f64));
        let mut out = ComplexMatrix::zeros(3, 3);
        s.apply_left(&x, &mut out);
        assert_eq!(out, s.to_dense().mul(&x));
        s.apply_right(&x, &mut out);
        assert_eq!(out, x.mul(&s.to_dense()));
    }

    #[test]
    fn adjoint_is_conjugate_transpose() {
        let s =
            SparseOperator::from_triplets(2, 2, vec![(0, 1, cplx::<f64>(1.0, 2.0))]).unwrap();
        let ad = s.adjoint();
        assert_eq!(ad.entries()[0], (1, 0, cplx(1.0, -2.0)));
    }

    #[test]
    fn charge_shift_detection() {
        // lowering operator on a 3-level ladder: shift -1
        let a = SparseOperator::from_triplets(
            3,
            3,
            vec![(0, 1, cplx::<f64>(1.0, 0.0)), (1, 2, cplx(1.4, 0.0))],
        )
        .unwrap();
        let charge = [0i64, 1, 2];
        assert_eq!(a.charge_shift(&charge), Some(-1));
        // number operator: shift 0
        let n = SparseOperator::from_triplets(
            3,
            3,
            vec![(1, 1, cplx::<f64>(1.0, 0.0)), (2, 2, cplx(2.0, 0.0))],
        )
        .unwrap();
        assert_eq!(n.charge_shift(&charge), Some(0));
        // mixture of shifts: not homogeneous
        let mixed = a.add(&a.adjoint());
        assert_eq!(mixed.charge_shift(&charge), None);
        // empty operator: conventionally zero
        assert_eq!(SparseOperator::<f64>::zero(3, 3).charge_shift(&charge), Some(0));
    }

    #[test]
    fn out_of_range_triplet_rejected() {
        assert!(SparseOperator::from_triplets(2, 2, vec![(2, 0, cplx::<f64>(1.0, 0.0))]).is_err());
    }
}
