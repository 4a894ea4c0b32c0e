//! The master-equation right-hand side in its literal form.

use crate::algebra::{ComplexMatrix, DensityMatrix, SparseOperator};
use crate::error::{CoreError, Result};
use crate::model::HamiltonianSet;
use crate::scalar::{c_i, c_re, Scalar};

/// One collapse channel with its precomputed adjoint and `o†o`.
pub(crate) struct Dissipator<T: Scalar> {
    pub op: SparseOperator<T>,
    pub op_adj: SparseOperator<T>,
    pub op_sq: SparseOperator<T>,
    pub rate: T,
}

impl<T: Scalar> Dissipator<T> {
    pub fn build(channels: &[(SparseOperator<T>, T)]) -> Vec<Self> {
        channels
            .iter()
            .map(|(op, rate)| {
                let op_adj = op.adjoint();
                let op_sq = op_adj.mul(op);
                Dissipator { op: op.clone(), op_adj, op_sq, rate: *rate }
            })
            .collect()
    }
}

/// Scratch space reused across right-hand-side evaluations.
pub(crate) struct RhsWorkspace<T: Scalar> {
    t1: ComplexMatrix<T>,
    t2: ComplexMatrix<T>,
}

impl<T: Scalar> RhsWorkspace<T> {
    pub fn new(dim: usize) -> Self {
        Self { t1: ComplexMatrix::zeros(dim, dim), t2: ComplexMatrix::zeros(dim, dim) }
    }
}

/// `out = -i[H, rho] + sum (rate/2)(2 o rho o† - o†o rho - rho o†o)`.
///
/// Written exactly as stated; the verification oracle never calls this, so
/// the two stay independent.
pub(crate) fn rhs_into<T: Scalar>(
    h: &SparseOperator<T>,
    diss: &[Dissipator<T>],
    rho: &ComplexMatrix<T>,
    ws: &mut RhsWorkspace<T>,
    out: &mut ComplexMatrix<T>,
) {
    let i = c_i::<T>();
    out.fill_zero();
    h.apply_left(rho, &mut ws.t1);
    h.apply_right(rho, &mut ws.t2);
    out.axpy(-i, &ws.t1);
    out.axpy(i, &ws.t2);
    for d in diss {
        let half = c_re(d.rate / (T::one() + T::one()));
        let full = c_re(d.rate);
        d.op_adj.apply_right(rho, &mut ws.t1);
        d.op.apply_left(&ws.t1, &mut ws.t2);
        out.axpy(full, &ws.t2);
        d.op_sq.apply_left(rho, &mut ws.t1);
        out.axpy(-half, &ws.t1);
        d.op_sq.apply_right(rho, &mut ws.t1);
        out.axpy(-half, &ws.t1);
    }
}

/// Literal master-equation derivative of a valid state.
pub fn lindblad_rhs<T: Scalar>(
    rho: &DensityMatrix<T>,
    h: &HamiltonianSet<T>,
) -> Result<ComplexMatrix<T>> {
    let dim = h.dim();
    if rho.dim() != dim {
        return Err(CoreError::DimensionMismatch(format!(
            "state dimension {} does not match the model dimension {dim}",
            rho.dim()
        )));
    }
    let diss = Dissipator::build(&h.collapse_ops);
    let mut ws = RhsWorkspace::new(dim);
    let mut out = ComplexMatrix::zeros(dim, dim);
    rhs_into(&h.hamiltonian, &diss, rho.matrix(), &mut ws, &mut out);
    Ok(out)
}
