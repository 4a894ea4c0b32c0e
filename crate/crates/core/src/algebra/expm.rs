//! Matrix exponentials: scaling-and-squaring Pade approximation for dense
//! matrices, and a scaled Taylor action for exponential-times-vector products
//! (the form the superoperator oracle consumes).

use crate::algebra::matrix::ComplexMatrix;
use crate::error::{CoreError, Result};
use crate::scalar::{c_zero, real, Scalar};
use num_complex::Complex;

// Pade order thresholds on the 1-norm (Higham 2005).
const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539398330063230e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068;
const THETA_13: f64 = 5.371920351148152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Matrix exponential of a square complex matrix.
pub fn expm<T: Scalar>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    if !a.is_square() {
        return Err(CoreError::DimensionMismatch(
            "matrix exponential of a non-square matrix".into(),
        ));
    }
    let eta = a.one_norm().to_f64();
    if !eta.is_finite() {
        return Err(CoreError::InvalidArgument(
            "matrix exponential of a non-finite matrix".into(),
        ));
    }
    if eta <= THETA_9 {
        let coeffs: &[f64] = if eta <= THETA_3 {
            &B3
        } else if eta <= THETA_5 {
            &B5
        } else if eta <= THETA_7 {
            &B7
        } else {
            &B9
        };
        return pade(a, coeffs);
    }
    // scaling and squaring with Pade order 13
    let s = ((eta / THETA_13).log2().ceil()).max(0.0) as u32;
    let scaled = a.scaled(Complex::new(real::<T>((0.5f64).powi(s as i32)), T::zero()));
    let mut e = pade(&scaled, &B13)?;
    for _ in 0..s {
        e = e.mul(&e);
    }
    Ok(e)
}

trait ToF64Ext {
    fn to_f64(self) -> f64;
}
impl<T: Scalar> ToF64Ext for T {
    fn to_f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

/// Pade approximant with the given even/odd coefficient table.
fn pade<T: Scalar>(a: &ComplexMatrix<T>, b: &[f64]) -> Result<ComplexMatrix<T>> {
    let n = a.rows();
    let id = ComplexMatrix::<T>::identity(n);
    // even powers a^2, a^4, ...
    let a2 = a.mul(a);
    let mut even_powers: Vec<ComplexMatrix<T>> = vec![id.clone(), a2.clone()];
    let half_terms = b.len() / 2; // number of (even, odd) coefficient pairs
    while even_powers.len() < half_terms {
        let next = even_powers.last().unwrap().mul(&a2);
        even_powers.push(next);
    }
    let c = |x: f64| Complex::new(real::<T>(x), T::zero());
    let mut u_poly = ComplexMatrix::<T>::zeros(n, n); // sum b[2k+1] A^{2k}
    let mut v = ComplexMatrix::<T>::zeros(n, n); // sum b[2k] A^{2k}
    for k in 0..half_terms {
        u_poly.axpy(c(b[2 * k + 1]), &even_powers[k]);
        v.axpy(c(b[2 * k]), &even_powers[k]);
    }
    let u = a.mul(&u_poly);
    // solve (V - U) X = (V + U)
    let lhs = v.sub(&u);
    let rhs = v.add(&u);
    lu_solve(lhs, rhs)
}

/// Solves `A X = B` by LU with partial pivoting, consuming both arguments.
fn lu_solve<T: Scalar>(mut a: ComplexMatrix<T>, mut b: ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let n = a.rows();
    assert_eq!(b.rows(), n, "rhs row count mismatch in lu_solve");
    let m = b.cols();
    for k in 0..n {
        // pivot search in column k
        let mut piv = k;
        let mut best = a[(k, k)].norm();
        for i in k + 1..n {
            let cand = a[(i, k)].norm();
            if cand > best {
                best = cand;
                piv = i;
            }
        }
        if !(best > T::zero()) || !best.is_finite() {
            return Err(CoreError::ExpmNonConvergence(
                "singular denominator in Pade solve".into(),
            ));
        }
        if piv != k {
            for j in 0..n {
                let tmp = a[(k, j)];
                a[(k, j)] = a[(piv, j)];
                a[(piv, j)] = tmp;
            }
            for j in 0..m {
                let tmp = b[(k, j)];
                b[(k, j)] = b[(piv, j)];
                b[(piv, j)] = tmp;
            }
        }
        let akk = a[(k, k)];
        for i in k + 1..n {
            let factor = a[(i, k)] / akk;
            if factor == c_zero() {
                continue;
            }
            a[(i, k)] = factor;
            for j in k + 1..n {
                let akj = a[(k, j)];
                a[(i, j)] = a[(i, j)] - factor * akj;
            }
            for j in 0..m {
                let bkj = b[(k, j)];
                b[(i, j)] = b[(i, j)] - factor * bkj;
            }
        }
    }
    // back substitution
    for k in (0..n).rev() {
        let akk = a[(k, k)];
        for j in 0..m {
            let mut s = b[(k, j)];
            for i in k + 1..n {
                s -= a[(k, i)] * b[(i, j)];
            }
            b[(k, j)] = s / akk;
        }
    }
    Ok(b)
}

/// Computes `exp(a) * v` by scaled Taylor summation without forming `exp(a)`.
///
/// The 1-norm of `a` is split into unit-scale factors, each applied as a
/// truncated series; accuracy is at the rounding level for the sizes used
/// here. This is how the vectorized-Liouvillian oracle applies its
/// exponential.
pub fn expm_apply<T: Scalar>(a: &ComplexMatrix<T>, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    if !a.is_square() {
        return Err(CoreError::DimensionMismatch(
            "exponential action of a non-square matrix".into(),
        ));
    }
    let n = a.rows();
    if v.len() != n {
        return Err(CoreError::DimensionMismatch(format!(
            "vector length {} does not match matrix order {}",
            v.len(),
            n
        )));
    }
    let eta = a.one_norm().to_f64();
    if !eta.is_finite() {
        return Err(CoreError::InvalidArgument(
            "exponential action of a non-finite matrix".into(),
        ));
    }
    let s = (eta / 4.0).ceil().max(1.0) as usize;
    let scale = Complex::new(real::<T>(1.0 / s as f64), T::zero());
    let tol = T::epsilon() * real::<T>(0.25);
    const MAX_TERMS: usize = 120;

    let matvec = |w: &[Complex<T>], out: &mut Vec<Complex<T>>| {
        out.clear();
        for i in 0..n {
            let mut acc = c_zero::<T>();
            let row = a.row(i);
            for (aij, &wj) in row.iter().zip(w) {
                acc += *aij * scale * wj;
            }
            out.push(acc);
        }
    };

    let inf_norm = |w: &[Complex<T>]| {
        w.iter()
            .map(|x| x.norm())
            .fold(T::zero(), |mx, x| if x > mx { x } else { mx })
    };

    let mut w: Vec<Complex<T>> = v.to_vec();
    let mut term: Vec<Complex<T>> = Vec::with_capacity(n);
    let mut next: Vec<Complex<T>> = Vec::with_capacity(n);
    for _round in 0..s {
        term.clear();
        term.extend_from_slice(&w);
        let mut acc = w.clone();
        let mut converged = false;
        for k in 1..=MAX_TERMS {
            matvec(&term, &mut next);
            let inv_k = Complex::new(real::<T>(1.0 / k as f64), T::zero());
            for t in next.iter_mut() {
                *t = *t * inv_k;
            }
            std::mem::swap(&mut term, &mut next);
            for (a_i, t_i) in acc.iter_mut().zip(&term) {
                *a_i += *t_i;
            }
            if k >= 4 && inf_norm(&term) <= tol * inf_norm(&acc) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(CoreError::ExpmNonConvergence(format!(
                "Taylor action did not settle within {MAX_TERMS} terms"
            )));
        }
        w = acc;
    }
    Ok(w)
}
