//! Elementary single-subsystem operators: truncated bosonic ladder operators
//! and qubit (Pauli) matrices.

use crate::algebra::matrix::ComplexMatrix;
use crate::error::{CoreError, Result};
use crate::scalar::{cplx, real, Scalar};

/// Annihilation operator on a Fock space truncated at `n` levels
/// (occupations 0..n-1): entries sqrt(k) at (k-1, k).
pub fn annihilation<T: Scalar>(n: usize) -> Result<ComplexMatrix<T>> {
    if n < 2 {
        return Err(CoreError::InvalidArgument(format!(
            "Fock truncation must be at least 2, got {n}"
        )));
    }
    let mut a = ComplexMatrix::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = cplx((k as f64).sqrt(), 0.0);
    }
    Ok(a)
}

/// Creation operator, the adjoint of [`annihilation`].
pub fn creation<T: Scalar>(n: usize) -> Result<ComplexMatrix<T>> {
    Ok(annihilation::<T>(n)?.adjoint())
}

/// Number operator diag(0, 1, ..., n-1).
pub fn number<T: Scalar>(n: usize) -> Result<ComplexMatrix<T>> {
    if n < 2 {
        return Err(CoreError::InvalidArgument(format!(
            "Fock truncation must be at least 2, got {n}"
        )));
    }
    let mut m = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        m[(k, k)] = cplx(k as f64, 0.0);
    }
    Ok(m)
}

/// Qubit lowering operator |0><1|.
pub fn sigma_minus<T: Scalar>() -> ComplexMatrix<T> {
    let mut s = ComplexMatrix::zeros(2, 2);
    s[(0, 1)] = cplx(1.0, 0.0);
    s
}

/// Qubit raising operator |1><0|.
pub fn sigma_plus<T: Scalar>() -> ComplexMatrix<T> {
    sigma_minus::<T>().adjoint()
}

/// Pauli z in the (ground |0>, excited |1>) basis: diag(1, -1) on |0>, |1>.
pub fn sigma_z<T: Scalar>() -> ComplexMatrix<T> {
    let mut s = ComplexMatrix::zeros(2, 2);
    s[(0, 0)] = cplx(1.0, 0.0);
    s[(1, 1)] = cplx(-1.0, 0.0);
    s
}

/// Pauli x.
pub fn sigma_x<T: Scalar>() -> ComplexMatrix<T> {
    let mut s = ComplexMatrix::zeros(2, 2);
    s[(0, 1)] = cplx(1.0, 0.0);
    s[(1, 0)] = cplx(1.0, 0.0);
    s
}

/// Pauli y.
pub fn sigma_y<T: Scalar>() -> ComplexMatrix<T> {
    let mut s = ComplexMatrix::zeros(2, 2);
    s[(0, 1)] = cplx(0.0, -1.0);
    s[(1, 0)] = cplx(0.0, 1.0);
    s
}

/// Rank-one transition operator |i><j| on a `dim`-level system.
pub fn ket_bra<T: Scalar>(dim: usize, i: usize, j: usize) -> Result<ComplexMatrix<T>> {
    if i >= dim || j >= dim {
        return Err(CoreError::InvalidArgument(format!(
            "|{i}><{j}| does not fit a {dim}-level system"
        )));
    }
    let mut m = ComplexMatrix::zeros(dim, dim);
    m[(i, j)] = cplx(1.0, 0.0);
    Ok(m)
}

/// Normalized pure-state column vector (cos(theta), sin(theta)).
pub fn qubit_theta_amplitudes<T: Scalar>(theta: T) -> (T, T) {
    (theta.cos(), theta.sin())
}

/// Convenience: real scalar of an integer for ladder arithmetic in tests.
pub fn sqrt_of<T: Scalar>(k: usize) -> T {
    real::<T>(k as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    #[test]
    fn ladder_entries() {
        let a = annihilation::<f64>(4).unwrap();
        assert_eq!(a[(0, 1)], cplx(1.0, 0.0));
        assert_eq!(a[(1, 2)], cplx(2f64.sqrt(), 0.0));
        assert_eq!(a[(2, 3)], cplx(3f64.sqrt(), 0.0));
        assert_eq!(a[(1, 0)], cplx(0.0, 0.0));
    }

    #[test]
    fn number_is_adag_a() {
        let n = 5;
        let a = annihilation::<f64>(n).unwrap();
        let num = a.adjoint().mul(&a);
        assert!(num.max_diff(&number(n).unwrap()) < 1e-15);
    }

    #[test]
    fn commutator_truncation_defect_sits_at_top_level() {
        // [a, a^dag] = 1 except the top Fock level, where truncation bites
        let n = 6;
        let a = annihilation::<f64>(n).unwrap();
        let ad = a.adjoint();
        let comm = a.mul(&ad).sub(&ad.mul(&a));
        for k in 0..n - 1 {
            assert!((comm[(k, k)] - cplx(1.0, 0.0)).norm() < 1e-15);
        }
        assert!((comm[(n - 1, n - 1)] - cplx(-((n - 1) as f64), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn paulis_square_to_identity() {
        let id = ComplexMatrix::<f64>::identity(2);
        for s in [sigma_x::<f64>(), sigma_y::<f64>(), sigma_z::<f64>()] {
            assert!(s.mul(&s).max_diff(&id) < 1e-15);
        }
    }

    #[test]
    fn sigma_minus_is_fock2_annihilation() {
        assert_eq!(sigma_minus::<f64>(), annihilation::<f64>(2).unwrap());
    }

    #[test]
    fn truncation_below_two_rejected() {
        assert!(annihilation::<f64>(1).is_err());
        assert!(number::<f64>(0).is_err());
    }
}
