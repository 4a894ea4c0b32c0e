//! Hermitian eigendecomposition via cyclic complex Jacobi rotations, plus the
//! positive-semidefinite helpers built on it (matrix square root, trace norm,
//! shifted Cholesky positivity probe).
//!
//! Jacobi is quadratic-convergent once sweeps settle and needs no external
//! LAPACK; the matrices that land here are small (observable reductions,
//! oracle states, per-charge-sector blocks), so its n^3-per-sweep cost is
//! irrelevant next to the propagation kernels.

use crate::algebra::matrix::ComplexMatrix;
use crate::error::{CoreError, Result};
use crate::scalar::{c_zero, real, Scalar};
use num_complex::Complex;

const MAX_SWEEPS: usize = 60;

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues sorted descending and the unitary of eigenvectors as
/// columns, so that `a * v_k = lambda_k * v_k`. The input must be Hermitian
/// within `1e-12` relative to its largest entry; the working copy is
/// symmetrized before iterating so the decomposition is of the Hermitian part.
pub fn herm_eig<T: Scalar>(a: &ComplexMatrix<T>) -> Result<(Vec<T>, ComplexMatrix<T>)> {
    if !a.is_square() {
        return Err(CoreError::DimensionMismatch(
            "eigendecomposition of a non-square matrix".into(),
        ));
    }
    let n = a.rows();
    let scale = a.max_abs();
    let herm_tol = real::<T>(1e-12) * if scale > T::one() { scale } else { T::one() };
    if a.hermitian_deviation() > herm_tol {
        return Err(CoreError::InvalidArgument(format!(
            "matrix is not Hermitian: deviation {:e} exceeds {:e}",
            a.hermitian_deviation().to_f64().unwrap_or(f64::NAN),
            herm_tol.to_f64().unwrap_or(f64::NAN)
        )));
    }

    let mut w = a.clone();
    w.symmetrize();
    let mut v = ComplexMatrix::<T>::identity(n);
    if n > 1 {
        let fro = w.frobenius_norm();
        let target = T::epsilon() * fro * real::<T>(n as f64);
        let skip = T::epsilon() * fro * real::<T>(1e-3);
        let mut converged = fro == T::zero();
        let mut last_off = T::zero();
        for _sweep in 0..MAX_SWEEPS {
            let off = off_diagonal_norm(&w);
            last_off = off;
            if off <= target {
                converged = true;
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    rotate(&mut w, &mut v, p, q, skip);
                }
            }
        }
        if !converged {
            return Err(CoreError::EigNonConvergence {
                sweeps: MAX_SWEEPS,
                off: last_off.to_f64().unwrap_or(f64::NAN),
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| w[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).expect("finite eigenvalues"));
    let values: Vec<T> = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok((values, vectors))
}

fn off_diagonal_norm<T: Scalar>(a: &ComplexMatrix<T>) -> T {
    let n = a.rows();
    let mut s = T::zero();
    for i in 0..n {
        for j in i + 1..n {
            s += a[(i, j)].norm_sqr();
        }
    }
    (s + s).sqrt()
}

/// One Jacobi rotation zeroing the (p, q) element of the Hermitian matrix
/// `w`, accumulated into `v`.
fn rotate<T: Scalar>(
    w: &mut ComplexMatrix<T>,
    v: &mut ComplexMatrix<T>,
    p: usize,
    q: usize,
    skip: T,
) {
    let apq = w[(p, q)];
    let m = apq.norm();
    if m <= skip {
        return;
    }
    // componentwise division: the generic complex quotient squares `m` and
    // underflows to NaN on subnormal entries, which survive the relative skip
    // gate whenever the whole block is subnormal
    let phase = Complex::new(apq.re / m, apq.im / m);
    let tau = (w[(p, p)].re - w[(q, q)].re) / (m + m);
    // smaller root of t^2 - 2 tau t - 1 = 0 keeps the rotation angle <= pi/4
    let t = {
        let denom = tau.abs() + (tau * tau + T::one()).sqrt();
        if tau >= T::zero() {
            -(T::one() / denom)
        } else {
            T::one() / denom
        }
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = phase * Complex::new(t * c, T::zero());
    let cc = Complex::new(c, T::zero());

    let n = w.rows();
    // A <- G^dag A G with G = [[c, s], [-conj(s), c]] on columns (p, q)
    for i in 0..n {
        let aip = w[(i, p)];
        let aiq = w[(i, q)];
        w[(i, p)] = aip * cc - aiq * s.conj();
        w[(i, q)] = aip * s + aiq * cc;
    }
    for j in 0..n {
        let apj = w[(p, j)];
        let aqj = w[(q, j)];
        w[(p, j)] = apj * cc - aqj * s;
        w[(q, j)] = apj * s.conj() + aqj * cc;
    }
    w[(p, q)] = c_zero();
    w[(q, p)] = c_zero();
    w[(p, p)] = Complex::new(w[(p, p)].re, T::zero());
    w[(q, q)] = Complex::new(w[(q, q)].re, T::zero());

    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * cc - viq * s.conj();
        v[(i, q)] = vip * s + viq * cc;
    }
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue<T: Scalar>(a: &ComplexMatrix<T>) -> Result<T> {
    Ok(*herm_eig(a)?.0.last().expect("non-empty spectrum"))
}

/// Principal square root of a positive-semidefinite Hermitian matrix.
///
/// Eigenvalues in `[-1e-10, 0)` are treated as rounding debris and clamped to
/// zero; anything below that is a genuine negativity and errors out.
pub fn psd_sqrt<T: Scalar>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let (values, vectors) = herm_eig(a)?;
    let clamp = real::<T>(-1e-10);
    let mut roots = Vec::with_capacity(values.len());
    for &lambda in &values {
        if lambda < clamp {
            return Err(CoreError::DensityInvariant(format!(
                "matrix is not PSD: eigenvalue {:e} below the clamp threshold",
                lambda.to_f64().unwrap_or(f64::NAN)
            )));
        }
        roots.push(if lambda > T::zero() { lambda.sqrt() } else { T::zero() });
    }
    // V sqrt(Lambda) V^dag
    let n = values.len();
    let mut scaled = vectors.clone();
    for j in 0..n {
        let r = Complex::new(roots[j], T::zero());
        for i in 0..n {
            scaled[(i, j)] = scaled[(i, j)] * r;
        }
    }
    Ok(scaled.mul(&vectors.adjoint()))
}

/// Trace norm (sum of absolute eigenvalues) of a Hermitian matrix; the
/// distance measure used for oracle comparisons.
pub fn trace_norm_hermitian<T: Scalar>(a: &ComplexMatrix<T>) -> Result<T> {
    let (values, _) = herm_eig(a)?;
    Ok(values.iter().fold(T::zero(), |s, &x| s + x.abs()))
}

/// Attempts a Cholesky factorization of `a + shift * I`.
///
/// Success certifies that every eigenvalue of `a` is at least `-shift`; this
/// is the cheap positivity probe used on propagation samples too large for a
/// full eigendecomposition.
pub fn cholesky_psd_ok<T: Scalar>(a: &ComplexMatrix<T>, shift: T) -> bool {
    if !a.is_square() {
        return false;
    }
    let n = a.rows();
    let mut l = vec![c_zero::<T>(); n * n];
    for j in 0..n {
        let mut d = a[(j, j)].re + shift;
        for k in 0..j {
            d -= l[j * n + k].norm_sqr();
        }
        if !(d > T::zero()) || !d.is_finite() {
            return false;
        }
        let dj = d.sqrt();
        l[j * n + j] = Complex::new(dj, T::zero());
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k].conj();
            }
            l[i * n + j] = Complex::new(s.re / dj, s.im / dj);
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_by_two_hand_case() {
        // [[2, 1], [1, 2]] has eigenvalues 3 and 1
        let a = ComplexMatrix::from_vec(
            2,
            2,
            vec![cplx(2.0, 0.0), cplx(1.0, 0.0), cplx(1.0, 0.0), cplx(2.0, 0.0)],
        )
        .unwrap();
        let (vals, vecs) = herm_eig(&a).unwrap();
        assert_abs_diff_eq!(vals[0], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(vals[1], 1.0, epsilon = 1e-14);
        // residual A v - lambda v
        for k in 0..2 {
            for i in 0..2 {
                let av: num_complex::Complex<f64> =
                    (0..2).map(|j| a[(i, j)] * vecs[(j, k)]).sum();
                assert_abs_diff_eq!((av - vecs[(i, k)] * cplx(vals[k], 0.0)).norm(), 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn complex_hermitian_case() {
        // [[1, i], [-i, 1]] has eigenvalues 2 and 0
        let a = ComplexMatrix::<f64>::from_vec(
            2,
            2,
            vec![cplx(1.0, 0.0), cplx(0.0, 1.0), cplx(0.0, -1.0), cplx(1.0, 0.0)],
        )
        .unwrap();
        let (vals, _) = herm_eig(&a).unwrap();
        assert_abs_diff_eq!(vals[0], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(vals[1], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn eigenvectors_are_orthonormal() {
        let n = 6;
        // deterministic Hermitian test matrix
        let a = ComplexMatrix::from_fn(n, n, |i, j| {
            let re = 1.0 / (1.0 + (i + j) as f64);
            let im = 0.1 * (i as f64 - j as f64);
            cplx(re, im)
        });
        let mut h = a.clone();
        h.symmetrize();
        let (vals, vecs) = herm_eig(&h).unwrap();
        let gram = vecs.adjoint().mul(&vecs);
        assert!(gram.max_diff(&ComplexMatrix::identity(n)) < 1e-13);
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        // residual against the original
        let av = h.mul(&vecs);
        let vl = ComplexMatrix::from_fn(n, n, |i, j| vecs[(i, j)] * cplx(vals[j], 0.0));
        assert!(av.max_diff(&vl) < 1e-13 * h.frobenius_norm().max(1.0));
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let b = ComplexMatrix::<f64>::from_fn(4, 4, |i, j| cplx((i * j) as f64 * 0.2 + 1.0, (i as f64 - j as f64) * 0.3));
        let psd = b.mul(&b.adjoint());
        let s = psd_sqrt(&psd).unwrap();
        assert!(s.mul(&s).max_diff(&psd) < 1e-11 * psd.max_abs().max(1.0));
        assert!(s.hermitian_deviation() < 1e-12 * s.max_abs().max(1.0));
    }

    #[test]
    fn psd_sqrt_rejects_indefinite() {
        let a = ComplexMatrix::<f64>::from_diag(&[cplx(1.0, 0.0), cplx(-0.5, 0.0)]);
        assert!(psd_sqrt(&a).is_err());
    }

    #[test]
    fn trace_norm_of_diagonal() {
        let a = ComplexMatrix::<f64>::from_diag(&[cplx(2.0, 0.0), cplx(-3.0, 0.0), cplx(0.5, 0.0)]);
        assert_abs_diff_eq!(trace_norm_hermitian(&a).unwrap(), 5.5, epsilon = 1e-13);
    }

    #[test]
    fn cholesky_probe_detects_negativity() {
        let pos = ComplexMatrix::from_diag(&[cplx(1.0, 0.0), cplx(1e-10, 0.0)]);
        assert!(cholesky_psd_ok(&pos, 1e-8));
        let neg = ComplexMatrix::from_diag(&[cplx(1.0, 0.0), cplx(-1e-6, 0.0)]);
        assert!(!cholesky_psd_ok(&neg, 1e-8));
        // borderline: eigenvalue -1e-9 is certified by shift 1e-8
        let border = ComplexMatrix::from_diag(&[cplx(1.0, 0.0), cplx(-1e-9, 0.0)]);
        assert!(cholesky_psd_ok(&border, 1e-8));
    }

    #[test]
    fn non_hermitian_input_rejected() {
        let mut a = ComplexMatrix::<f64>::zeros(2, 2);
        a[(0, 1)] = cplx(1.0, 0.0);
        assert!(herm_eig(&a).is_err());
    }
}
