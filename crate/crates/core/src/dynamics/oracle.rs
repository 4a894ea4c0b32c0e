//! Superoperator-exponential propagation, the independent check on the
//! step-based integrator.
//!
//! The Liouvillian is assembled from Kronecker products under the
//! column-stacking convention vec(A X B) = (B^T (x) A) vec(X) and applied
//! through the exponential action. None of the right-hand-side code is
//! shared with the production integrator.

use crate::algebra::expm::expm_apply;
use crate::algebra::{kron, ComplexMatrix, DensityMatrix};
use crate::error::{CoreError, Result};
use crate::model::HamiltonianSet;
use crate::scalar::{c_re, cplx, Scalar};

/// Largest system dimension the oracle accepts; the superoperator is dense
/// and scales as the fourth power.
pub const ORACLE_DIM_CAP: usize = 64;

/// Dense Liouvillian of the model:
/// `L = -i(I (x) H - H^T (x) I) + sum_k rate_k [conj(o_k) (x) o_k
///  - (I (x) o_k†o_k + (o_k†o_k)^T (x) I) / 2]`.
pub fn build_liouvillian<T: Scalar>(h: &HamiltonianSet<T>) -> Result<ComplexMatrix<T>> {
    let dim = h.dim();
    if dim > ORACLE_DIM_CAP {
        return Err(CoreError::OracleCap { dim, cap: ORACLE_DIM_CAP });
    }
    let eye = ComplexMatrix::<T>::identity(dim);
    let hm = h.hamiltonian.to_dense();
    let minus_i = cplx::<T>(0.0, -1.0);
    let mut l = kron(&eye, &hm)
        .sub(&kron(&hm.transpose(), &eye))
        .scaled(minus_i);
    for (op, rate) in &h.collapse_ops {
        let o = op.to_dense();
        let o_adj = o.adjoint();
        let osq = o_adj.mul(&o);
        let half = c_re(*rate / (T::one() + T::one()));
        l = l.add(&kron(&o.conj(), &o).scaled(c_re(*rate)));
        l = l.sub(&kron(&eye, &osq).scaled(half));
        l = l.sub(&kron(&osq.transpose(), &eye).scaled(half));
    }
    Ok(l)
}

/// `unvec(expm(L t) vec(rho0))`, validated on output.
pub fn propagate_oracle<T: Scalar>(
    rho0: &DensityMatrix<T>,
    h: &HamiltonianSet<T>,
    t: T,
) -> Result<DensityMatrix<T>> {
    if rho0.layout() != &h.layout {
        return Err(CoreError::Layout("state and model layouts disagree".into()));
    }
    if !(t >= T::zero()) || !t.is_finite() {
        return Err(CoreError::InvalidArgument(format!(
            "propagation time must be finite and non-negative, got {t}"
        )));
    }
    let dim = rho0.dim();
    let l = build_liouvillian(h)?.scaled(c_re(t));
    let v = rho0.matrix().col_stack();
    let w = expm_apply(&l, &v)?;
    let mut m = ComplexMatrix::from_col_stack(dim, &w)?;
    m.symmetrize();
    DensityMatrix::new(rho0.layout().clone(), m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{ops, SparseOperator, SubsystemLabel, SystemLayout};
    use crate::scalar::c_zero;
    use approx::assert_abs_diff_eq;

    fn qubit_layout() -> SystemLayout {
        SystemLayout::new(vec![(SubsystemLabel::Sc, 2)]).unwrap()
    }

    fn excited() -> DensityMatrix<f64> {
        DensityMatrix::pure(qubit_layout(), &[c_zero(), cplx(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn zero_time_is_identity_map() {
        let set = HamiltonianSet::new(
            SparseOperator::from_dense(&ops::sigma_x::<f64>()),
            vec![(SparseOperator::from_dense(&ops::sigma_minus::<f64>()), 0.3)],
            qubit_layout(),
            None,
        )
        .unwrap();
        let rho0 = excited();
        let out = propagate_oracle(&rho0, &set, 0.0).unwrap();
        assert!(out.matrix().max_diff(rho0.matrix()) <= 1e-14);
    }

    #[test]
    fn pure_decay_closed_form() {
        let kappa = 0.8;
        let set = HamiltonianSet::new(
            SparseOperator::zero(2, 2),
            vec![(SparseOperator::from_dense(&ops::sigma_minus::<f64>()), kappa)],
            qubit_layout(),
            None,
        )
        .unwrap();
        let t = 1.7;
        let out = propagate_oracle(&excited(), &set, t).unwrap();
        assert_abs_diff_eq!(out.matrix()[(1, 1)].re, (-kappa * t).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(
            out.matrix()[(0, 0)].re,
            1.0 - (-kappa * t).exp(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn coherence_decays_at_half_rate() {
        // off-diagonal of a superposition decays as e^{-kappa t / 2}
        let kappa = 0.5;
        let set = HamiltonianSet::new(
            SparseOperator::zero(2, 2),
            vec![(SparseOperator::from_dense(&ops::sigma_minus::<f64>()), kappa)],
            qubit_layout(),
            None,
        )
        .unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let rho0 = DensityMatrix::pure(qubit_layout(), &[cplx(r, 0.0), cplx(r, 0.0)]).unwrap();
        let t = 2.0;
        let out = propagate_oracle(&rho0, &set, t).unwrap();
        assert_abs_diff_eq!(
            out.matrix()[(0, 1)].re,
            0.5 * (-kappa * t / 2.0).exp(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn unitary_rotation_matches_closed_form() {
        let set = HamiltonianSet::new(
            SparseOperator::from_dense(&ops::sigma_x::<f64>()),
            vec![],
            qubit_layout(),
            None,
        )
        .unwrap();
        let t = 0.9;
        let out = propagate_oracle(&excited(), &set, t).unwrap();
        assert_abs_diff_eq!(out.matrix()[(1, 1)].re, t.cos().powi(2), epsilon = 1e-12);
        assert_abs_diff_eq!(out.matrix()[(0, 0)].re, t.sin().powi(2), epsilon = 1e-12);
    }

    #[test]
    fn refuses_oversized_systems() {
        let layout = SystemLayout::canonical(5, 4).unwrap();
        let m = crate::model::ModelParams { n_a: 5, n_b: 4, ..Default::default() };
        let set = crate::model::h_transfer(&m, &layout).unwrap();
        let rho0 = DensityMatrix::all_ground(layout);
        // dim 80 > 64
        match propagate_oracle(&rho0, &set, 1.0) {
            Err(CoreError::OracleCap { dim, cap }) => {
                assert_eq!(dim, 80);
                assert_eq!(cap, 64);
            }
            other => panic!("expected the cap error, got {other:?}"),
        }
    }
}
