//! Validated density matrices on a tensor-product layout.

use crate::algebra::eig::{cholesky_psd_ok, min_eigenvalue};
use crate::algebra::layout::{SubsystemLabel, SystemLayout};
use crate::algebra::matrix::ComplexMatrix;
use crate::error::{CoreError, Result};
use crate::scalar::{c_zero, cplx, real, Scalar};
use num_complex::Complex;

/// Hermiticity tolerance enforced at construction.
pub const HERM_TOL: f64 = 1e-10;
/// Unit-trace tolerance enforced at construction.
pub const TRACE_TOL: f64 = 1e-8;
/// Smallest admissible eigenvalue (rounding floor for positivity).
pub const EIG_FLOOR: f64 = -1e-8;

// Above this dimension the positivity check switches from an exact
// eigendecomposition to a shifted Cholesky certificate.
const EXACT_EIG_DIM: usize = 96;
// Above this dimension construction skips the positivity probe entirely; the
// block propagation path certifies its states sector by sector instead and
// a dense probe would dwarf the simulation itself.
const CHOLESKY_DIM: usize = 2048;

/// Density matrix tied to a [`SystemLayout`].
///
/// Construction validates Hermiticity within [`HERM_TOL`], unit trace within
/// [`TRACE_TOL`] and positivity down to [`EIG_FLOOR`]. For dimensions past
/// `2048` the positivity probe is skipped here (the propagation health checks
/// cover sampled states); Hermiticity and trace are always enforced.
#[derive(Clone, PartialEq, Debug)]
pub struct DensityMatrix<T> {
    layout: SystemLayout,
    matrix: ComplexMatrix<T>,
}

impl<T: Scalar> DensityMatrix<T> {
    /// Validating constructor.
    pub fn new(layout: SystemLayout, matrix: ComplexMatrix<T>) -> Result<Self> {
        let dim = layout.total_dim();
        if matrix.rows() != dim || matrix.cols() != dim {
            return Err(CoreError::DimensionMismatch(format!(
                "matrix is {}x{} but the layout dimension is {}",
                matrix.rows(),
                matrix.cols(),
                dim
            )));
        }
        let herm = matrix.hermitian_deviation();
        if herm > real::<T>(HERM_TOL) {
            return Err(CoreError::DensityInvariant(format!(
                "Hermiticity deviation {:e} exceeds {HERM_TOL:e}",
                herm.to_f64().unwrap_or(f64::NAN)
            )));
        }
        let tr = matrix.trace();
        let drift = (tr - cplx::<T>(1.0, 0.0)).norm();
        if drift > real::<T>(TRACE_TOL) {
            return Err(CoreError::DensityInvariant(format!(
                "trace deviates from 1 by {:e}, tolerance {TRACE_TOL:e}",
                drift.to_f64().unwrap_or(f64::NAN)
            )));
        }
        if dim <= EXACT_EIG_DIM {
            let lo = min_eigenvalue(&{
                let mut m = matrix.clone();
                m.symmetrize();
                m
            })?;
            if lo < real::<T>(EIG_FLOOR) {
                return Err(CoreError::DensityInvariant(format!(
                    "minimum eigenvalue {:e} below {EIG_FLOOR:e}",
                    lo.to_f64().unwrap_or(f64::NAN)
                )));
            }
        } else if dim <= CHOLESKY_DIM && !cholesky_psd_ok(&matrix, real::<T>(-EIG_FLOOR)) {
            return Err(CoreError::DensityInvariant(format!(
                "positivity certificate failed: an eigenvalue lies below {EIG_FLOOR:e}"
            )));
        }
        Ok(Self { layout, matrix })
    }

    /// Constructor for states whose invariants are certified elsewhere
    /// (propagation samples checked by the engine health monitors).
    pub(crate) fn new_unchecked(layout: SystemLayout, matrix: ComplexMatrix<T>) -> Self {
        debug_assert_eq!(layout.total_dim(), matrix.rows());
        Self { layout, matrix }
    }

    /// Pure state from a normalized amplitude vector.
    pub fn pure(layout: SystemLayout, amplitudes: &[Complex<T>]) -> Result<Self> {
        let dim = layout.total_dim();
        if amplitudes.len() != dim {
            return Err(CoreError::DimensionMismatch(format!(
                "amplitude vector of length {} on a dimension-{} layout",
                amplitudes.len(),
                dim
            )));
        }
        let norm_sqr = amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .fold(T::zero(), |s, x| s + x);
        if (norm_sqr.sqrt() - T::one()).abs() > real::<T>(1e-10) {
            return Err(CoreError::InvalidArgument(format!(
                "state vector norm {:e} is not 1",
                norm_sqr.sqrt().to_f64().unwrap_or(f64::NAN)
            )));
        }
        // exact unit trace regardless of rounding in the norm
        let inv = Complex::new(T::one() / norm_sqr, T::zero());
        let m = ComplexMatrix::from_fn(dim, dim, |i, j| {
            amplitudes[i] * amplitudes[j].conj() * inv
        });
        Ok(Self { layout, matrix: m })
    }

    /// Every subsystem in its ground (index-0) state.
    pub fn all_ground(layout: SystemLayout) -> Self {
        let dim = layout.total_dim();
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(0, 0)] = cplx(1.0, 0.0);
        Self { layout, matrix: m }
    }

    /// NV qubit in cos(theta)|0> + sin(theta)|1>, everything else ground.
    pub fn nv_superposition(layout: SystemLayout, theta: T) -> Result<Self> {
        let pos = layout.position(SubsystemLabel::Nv).ok_or_else(|| {
            CoreError::Layout("nv_superposition needs an nv subsystem".into())
        })?;
        if layout.parts()[pos].1 != 2 {
            return Err(CoreError::Layout("nv subsystem must be two-level".into()));
        }
        let stride = layout.strides()[pos];
        let dim = layout.total_dim();
        let mut amps = vec![c_zero::<T>(); dim];
        amps[0] = Complex::new(theta.cos(), T::zero());
        amps[stride] = Complex::new(theta.sin(), T::zero());
        Self::pure(layout, &amps)
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Trace (real part; the imaginary part is zero for a valid state).
    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    /// Purity trace(rho^2), computed as the squared Frobenius norm.
    pub fn purity(&self) -> T {
        let f = self.matrix.frobenius_norm();
        f * f
    }

    /// Partial trace onto the subsystems in `keep`, which must be distinct
    /// labels present in the layout; the result keeps layout order.
    pub fn partial_trace(&self, keep: &[SubsystemLabel]) -> Result<DensityMatrix<T>> {
        for (i, l) in keep.iter().enumerate() {
            if !self.layout.has(*l) {
                return Err(CoreError::Layout(format!("label {l} not present in layout")));
            }
            if keep[i + 1..].contains(l) {
                return Err(CoreError::Layout(format!("label {l} repeated in keep list")));
            }
        }
        let parts = self.layout.parts();
        let strides = self.layout.strides();
        let kept: Vec<usize> = (0..parts.len())
            .filter(|&p| keep.contains(&parts[p].0))
            .collect();
        let traced: Vec<usize> = (0..parts.len()).filter(|p| !kept.contains(p)).collect();

        let kept_parts: Vec<(SubsystemLabel, usize)> =
            kept.iter().map(|&p| parts[p]).collect();
        let new_layout = SystemLayout::new(kept_parts)?;
        let keep_dim = new_layout.total_dim();

        // base offsets of every kept multi-index and every traced multi-index
        let offsets = |positions: &[usize]| -> Vec<usize> {
            let mut offs = vec![0usize];
            for &p in positions {
                let (d, s) = (parts[p].1, strides[p]);
                let mut next = Vec::with_capacity(offs.len() * d);
                for &o in &offs {
                    for level in 0..d {
                        next.push(o + level * s);
                    }
                }
                offs = next;
            }
            offs
        };
        let kept_offsets = offsets(&kept);
        let traced_offsets = offsets(&traced);
        debug_assert_eq!(kept_offsets.len(), keep_dim);

        let mut out = ComplexMatrix::zeros(keep_dim, keep_dim);
        for (i, &oi) in kept_offsets.iter().enumerate() {
            for (j, &oj) in kept_offsets.iter().enumerate() {
                let mut acc = c_zero::<T>();
                for &ot in &traced_offsets {
                    acc += self.matrix[(oi + ot, oj + ot)];
                }
                out[(i, j)] = acc;
            }
        }
        Ok(DensityMatrix {
            layout: new_layout,
            matrix: out,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::matrix::kron;
    use approx::assert_abs_diff_eq;

    fn bell_matrix() -> ComplexMatrix<f64> {
        // (|00> + |11>)/sqrt(2) on [nv, sc]
        let mut m = ComplexMatrix::zeros(4, 4);
        for &(i, j) in &[(0usize, 0usize), (0, 3), (3, 0), (3, 3)] {
            m[(i, j)] = cplx(0.5, 0.0);
        }
        m
    }

    fn two_qubit_layout() -> SystemLayout {
        SystemLayout::new(vec![(SubsystemLabel::Nv, 2), (SubsystemLabel::Sc, 2)]).unwrap()
    }

    #[test]
    fn valid_state_accepted() {
        let rho = DensityMatrix::new(two_qubit_layout(), bell_matrix()).unwrap();
        assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn invariant_violations_rejected() {
        let l = two_qubit_layout();
        // non-Hermitian
        let mut bad = bell_matrix();
        bad[(0, 3)] = cplx(0.5, 0.1);
        assert!(DensityMatrix::new(l.clone(), bad).is_err());
        // wrong trace
        let bad = bell_matrix().scaled(cplx(1.5, 0.0));
        assert!(DensityMatrix::new(l.clone(), bad).is_err());
        // negative eigenvalue: diag(1.5, -0.5) padded to dim 4
        let bad = ComplexMatrix::<f64>::from_diag(&[
            cplx(1.5, 0.0),
            cplx(-0.5, 0.0),
            cplx(0.0, 0.0),
            cplx(0.0, 0.0),
        ]);
        assert!(DensityMatrix::new(l, bad).is_err());
    }

    #[test]
    fn all_ground_and_superposition() {
        let l = SystemLayout::canonical(3, 3).unwrap();
        let g = DensityMatrix::<f64>::all_ground(l.clone());
        assert_abs_diff_eq!(g.trace(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.matrix()[(0, 0)].re, 1.0, epsilon = 1e-15);

        let theta = std::f64::consts::FRAC_PI_4;
        let s = DensityMatrix::nv_superposition(l.clone(), theta).unwrap();
        // nv stride in [2,2,3,3] is 18
        assert_abs_diff_eq!(s.matrix()[(0, 0)].re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(s.matrix()[(0, 18)].re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(s.matrix()[(18, 18)].re, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn partial_trace_of_product_state() {
        // rho = bell (x) |1><1| on mw; tracing out mw recovers bell
        let l = SystemLayout::new(vec![
            (SubsystemLabel::Nv, 2),
            (SubsystemLabel::Sc, 2),
            (SubsystemLabel::Mw, 3),
        ])
        .unwrap();
        let mut fock1 = ComplexMatrix::<f64>::zeros(3, 3);
        fock1[(1, 1)] = cplx(1.0, 0.0);
        let full = kron(&bell_matrix(), &fock1);
        let rho = DensityMatrix::new(l, full).unwrap();
        let reduced = rho
            .partial_trace(&[SubsystemLabel::Nv, SubsystemLabel::Sc])
            .unwrap();
        assert!(reduced.matrix().max_diff(&bell_matrix()) < 1e-15);
        // tracing to the mode recovers |1><1|
        let mode = rho.partial_trace(&[SubsystemLabel::Mw]).unwrap();
        assert!(mode.matrix().max_diff(&fock1) < 1e-15);
    }

    #[test]
    fn partial_trace_preserves_trace() {
        let l = SystemLayout::canonical(2, 3).unwrap();
        let rho = DensityMatrix::nv_superposition(l, 0.3).unwrap();
        let red = rho.partial_trace(&[SubsystemLabel::Sc, SubsystemLabel::Opt]).unwrap();
        assert_abs_diff_eq!(red.trace(), 1.0, epsilon = 1e-13);
    }

    #[test]
    fn pure_rejects_unnormalized() {
        let l = two_qubit_layout();
        let amps = vec![cplx::<f64>(1.0, 0.0), cplx(0.5, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0)];
        assert!(DensityMatrix::pure(l, &amps).is_err());
    }
}
