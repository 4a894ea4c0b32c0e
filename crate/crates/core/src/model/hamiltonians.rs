//! Interaction-picture Hamiltonians of the hybrid chain, the explicitly
//! time-dependent model they approximate, and the three-level Raman model
//! behind the effective NV coupling.

use num_complex::Complex;

use crate::algebra::{ops, SparseOperator, SubsystemLabel, SystemLayout};
use crate::error::{CoreError, Result};
use crate::model::params::{ModelParams, PhysicalParams};
use crate::scalar::{c_re, real, Scalar};

/// A Hamiltonian with its dissipator set over a fixed tensor layout.
///
/// Dissipation follows the convention `(rate/2)(2 o rho o† - o†o rho -
/// rho o†o)`, so each quoted rate is the full decay rate of the associated
/// population.
#[derive(Clone, Debug)]
pub struct HamiltonianSet<T: Scalar> {
    /// Hermitian system Hamiltonian.
    pub hamiltonian: SparseOperator<T>,
    /// Collapse operators paired with their non-negative rates.
    pub collapse_ops: Vec<(SparseOperator<T>, T)>,
    /// Tensor factor ordering shared by every operator above.
    pub layout: SystemLayout,
    /// Conserved charge per basis state when the model is graded; the
    /// Hamiltonian preserves it and every collapse operator shifts it by a
    /// fixed amount, which block evolution exploits.
    pub charges: Option<Vec<i64>>,
}

impl<T: Scalar> HamiltonianSet<T> {
    /// Validating constructor used by all builders.
    pub fn new(
        hamiltonian: SparseOperator<T>,
        collapse_ops: Vec<(SparseOperator<T>, T)>,
        layout: SystemLayout,
        charges: Option<Vec<i64>>,
    ) -> Result<Self> {
        let dim = layout.total_dim();
        if hamiltonian.rows() != dim || hamiltonian.cols() != dim {
            return Err(CoreError::DimensionMismatch(format!(
                "hamiltonian is {}x{} but the layout has dimension {dim}",
                hamiltonian.rows(),
                hamiltonian.cols()
            )));
        }
        let scale = if hamiltonian.max_abs() > T::one() { hamiltonian.max_abs() } else { T::one() };
        if hamiltonian.hermitian_deviation() > real::<T>(1e-12) * scale {
            return Err(CoreError::InvalidArgument(
                "hamiltonian is not Hermitian".into(),
            ));
        }
        for (op, rate) in &collapse_ops {
            if op.rows() != dim || op.cols() != dim {
                return Err(CoreError::DimensionMismatch(format!(
                    "collapse operator is {}x{} but the layout has dimension {dim}",
                    op.rows(),
                    op.cols()
                )));
            }
            if !rate.is_finite() || *rate < T::zero() {
                return Err(CoreError::InvalidArgument(format!(
                    "collapse rate {rate} must be finite and non-negative"
                )));
            }
        }
        if let Some(q) = &charges {
            if q.len() != dim {
                return Err(CoreError::DimensionMismatch(format!(
                    "charge table has {} entries for dimension {dim}",
                    q.len()
                )));
            }
            if hamiltonian.charge_shift(q) != Some(0) {
                return Err(CoreError::InvalidArgument(
                    "hamiltonian does not conserve the declared charge".into(),
                ));
            }
            for (op, _) in &collapse_ops {
                if op.charge_shift(q).is_none() {
                    return Err(CoreError::InvalidArgument(
                        "collapse operator has no definite charge shift".into(),
                    ));
                }
            }
        }
        Ok(Self { hamiltonian, collapse_ops, layout, charges })
    }

    pub fn dim(&self) -> usize {
        self.layout.total_dim()
    }
}

/// Embedded single-subsystem operators of the four-part chain.
struct ChainOps<T: Scalar> {
    s1: SparseOperator<T>,
    s1z: SparseOperator<T>,
    s2: SparseOperator<T>,
    da: SparseOperator<T>,
    b: SparseOperator<T>,
}

fn require_canonical(layout: &SystemLayout) -> Result<()> {
    use SubsystemLabel::*;
    for label in [Nv, Sc, Opt, Mw] {
        if !layout.has(label) {
            return Err(CoreError::Layout(format!(
                "chain models need subsystem {label} in the layout"
            )));
        }
    }
    for label in [Nv, Sc] {
        if layout.dim_of(label) != Some(2) {
            return Err(CoreError::Layout(format!("{label} must be a two-level system")));
        }
    }
    Ok(())
}

fn chain_ops<T: Scalar>(m: &ModelParams<T>, layout: &SystemLayout) -> Result<ChainOps<T>> {
    m.validate()?;
    require_canonical(layout)?;
    if layout.dim_of(SubsystemLabel::Opt) != Some(m.n_a)
        || layout.dim_of(SubsystemLabel::Mw) != Some(m.n_b)
    {
        return Err(CoreError::DimensionMismatch(format!(
            "layout mode dimensions {:?}/{:?} disagree with the requested truncation {}/{}",
            layout.dim_of(SubsystemLabel::Opt),
            layout.dim_of(SubsystemLabel::Mw),
            m.n_a,
            m.n_b
        )));
    }
    Ok(ChainOps {
        s1: layout.embed(&ops::sigma_minus(), SubsystemLabel::Nv)?,
        s1z: layout.embed(&ops::sigma_z(), SubsystemLabel::Nv)?,
        s2: layout.embed(&ops::sigma_minus(), SubsystemLabel::Sc)?,
        da: layout.embed(&ops::annihilation(m.n_a)?, SubsystemLabel::Opt)?,
        b: layout.embed(&ops::annihilation(m.n_b)?, SubsystemLabel::Mw)?,
    })
}

/// `k (x + x†)` for real `k`.
fn herm_scaled<T: Scalar>(x: &SparseOperator<T>, k: T) -> SparseOperator<T> {
    let kx = x.scaled(c_re(k));
    let adj = kx.adjoint();
    kx.add(&adj)
}

fn standard_collapse<T: Scalar>(m: &ModelParams<T>, o: &ChainOps<T>) -> Vec<(SparseOperator<T>, T)> {
    vec![
        (o.da.clone(), m.kappa1),
        (o.s1z.clone(), m.gamma1),
        (o.b.clone(), m.kappa2),
        (o.s2.clone(), m.gamma2),
    ]
}

/// Beam-splitter chain for state transfer:
/// `H = g1 (da† s1 + da s1†) + g2 (b† s2 + b s2†) + G (da† b + b† da)`.
///
/// Every term moves one excitation along the chain, so the total excitation
/// number grades the model.
pub fn h_transfer<T: Scalar>(
    m: &ModelParams<T>,
    layout: &SystemLayout,
) -> Result<HamiltonianSet<T>> {
    use SubsystemLabel::*;
    let o = chain_ops(m, layout)?;
    let h = herm_scaled(&o.da.adjoint().mul(&o.s1), m.g1)
        .add(&herm_scaled(&o.b.adjoint().mul(&o.s2), m.g2))
        .add(&herm_scaled(&o.da.adjoint().mul(&o.b), m.gi_lin));
    let charges = layout.charges(&[(Nv, 1), (Sc, 1), (Opt, 1), (Mw, 1)]);
    let collapse = standard_collapse(m, &o);
    HamiltonianSet::new(h, collapse, layout.clone(), Some(charges))
}

/// Two-mode-squeezing chain for entanglement generation:
/// `H = g1 (da† s1 + da s1†) + g2 (b† s2 + b s2†) + G (da† b† + da b)`.
///
/// The pair term creates one photon in each mode, so the conserved quantity
/// is the NV-side excitation minus the SC-side one.
pub fn h_entangle<T: Scalar>(
    m: &ModelParams<T>,
    layout: &SystemLayout,
) -> Result<HamiltonianSet<T>> {
    use SubsystemLabel::*;
    let o = chain_ops(m, layout)?;
    let h = herm_scaled(&o.da.adjoint().mul(&o.s1), m.g1)
        .add(&herm_scaled(&o.b.adjoint().mul(&o.s2), m.g2))
        .add(&herm_scaled(&o.da.adjoint().mul(&o.b.adjoint()), m.gi_lin));
    let charges = layout.charges(&[(Nv, 1), (Sc, -1), (Opt, 1), (Mw, -1)]);
    let collapse = standard_collapse(m, &o);
    HamiltonianSet::new(h, collapse, layout.clone(), Some(charges))
}

/// The chain before any rotating-wave approximation: static qubit couplings
/// plus the linearized electro-optic product
/// `G (b† e^{i omega_b t} + b e^{-i omega_b t})(da† e^{i delta t} + da e^{-i delta t})`.
///
/// `delta = +omega_b` keeps the hopping term stationary (transfer sideband);
/// `delta = -omega_b` keeps the pair term stationary (entangling sideband).
#[derive(Clone, Debug)]
pub struct TimeDependentModel<T: Scalar> {
    static_part: SparseOperator<T>,
    up_up: SparseOperator<T>,
    up_down: SparseOperator<T>,
    collapse_ops: Vec<(SparseOperator<T>, T)>,
    layout: SystemLayout,
    omega_b: T,
    delta: T,
}

impl<T: Scalar> TimeDependentModel<T> {
    pub fn new(m: &ModelParams<T>, layout: &SystemLayout) -> Result<Self> {
        if !(m.omega_b > T::zero()) {
            return Err(CoreError::InvalidArgument(format!(
                "omega_b = {} must be positive",
                m.omega_b
            )));
        }
        let o = chain_ops(m, layout)?;
        let static_part = herm_scaled(&o.da.adjoint().mul(&o.s1), m.g1)
            .add(&herm_scaled(&o.b.adjoint().mul(&o.s2), m.g2));
        let g = c_re(m.gi_lin);
        let up_up = o.b.adjoint().mul(&o.da.adjoint()).scaled(g);
        let up_down = o.b.adjoint().mul(&o.da).scaled(g);
        let collapse_ops = standard_collapse(m, &o);
        Ok(Self {
            static_part,
            up_up,
            up_down,
            collapse_ops,
            layout: layout.clone(),
            omega_b: m.omega_b,
            delta: m.delta,
        })
    }

    /// Hamiltonian at time `t`.
    pub fn at(&self, t: T) -> SparseOperator<T> {
        let uu = self.up_up.scaled(phase((self.omega_b + self.delta) * t));
        let ud = self.up_down.scaled(phase((self.omega_b - self.delta) * t));
        let uu_adj = uu.adjoint();
        let ud_adj = ud.adjoint();
        self.static_part.add(&uu).add(&uu_adj).add(&ud).add(&ud_adj)
    }

    pub fn collapse_ops(&self) -> &[(SparseOperator<T>, T)] {
        &self.collapse_ops
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn omega_b(&self) -> T {
        self.omega_b
    }
}

fn phase<T: Scalar>(arg: T) -> Complex<T> {
    Complex::new(arg.cos(), arg.sin())
}

/// One-shot evaluation of the time-dependent chain Hamiltonian.
///
/// Propagation loops should build a [`TimeDependentModel`] once and call
/// [`TimeDependentModel::at`] instead.
pub fn h_total_t<T: Scalar>(
    m: &ModelParams<T>,
    layout: &SystemLayout,
    t: T,
) -> Result<SparseOperator<T>> {
    Ok(TimeDependentModel::new(m, layout)?.at(t))
}

/// Three-level NV (|0>, |1>, |e>) coupled to one cavity mode, in the frame
/// where both transitions sit at detuning `delta_e`:
/// `H = delta_e |e><e| + g_e0 (a |e><0| + h.c.) + Omega (|e><1| + h.c.)`.
///
/// With `compensate` set, counter-terms `+(g_e0^2/delta_e) n |0><0|` and
/// `+(Omega^2/delta_e) |1><1|` are added. The far-detuned couplings shift
/// |0,n> by `-g_e0^2 n/delta_e` and |1,n> by `-Omega^2/delta_e` at second
/// order, so the counter-terms restore the two-photon resonance.
pub fn lambda_full_model<T: Scalar>(
    p: &PhysicalParams<T>,
    n_cav: usize,
    compensate: bool,
) -> Result<HamiltonianSet<T>> {
    p.validate()?;
    if compensate && p.delta_e == T::zero() {
        return Err(CoreError::InvalidArgument(
            "stark compensation needs a nonzero delta_e".into(),
        ));
    }
    let layout = SystemLayout::lambda(n_cav)?;
    let nv = SubsystemLabel::NvLambda;
    let opt = SubsystemLabel::Opt;
    let e_proj = layout.embed(&ops::ket_bra(3, 2, 2)?, nv)?;
    let e_from_0 = layout.embed(&ops::ket_bra(3, 2, 0)?, nv)?;
    let e_from_1 = layout.embed(&ops::ket_bra(3, 2, 1)?, nv)?;
    let a = layout.embed(&ops::annihilation(n_cav)?, opt)?;
    let mut h = e_proj.scaled(c_re(p.delta_e));
    h = h.add(&herm_scaled(&a.mul(&e_from_0), p.g_e0));
    h = h.add(&herm_scaled(&e_from_1, p.omega_rabi));
    if compensate {
        let n_op = layout.embed(&ops::number(n_cav)?, opt)?;
        let p0 = layout.embed(&ops::ket_bra(3, 0, 0)?, nv)?;
        let p1 = layout.embed(&ops::ket_bra(3, 1, 1)?, nv)?;
        h = h.add(&n_op.mul(&p0).scaled(c_re(p.g_e0 * p.g_e0 / p.delta_e)));
        h = h.add(&p1.scaled(c_re(p.omega_rabi * p.omega_rabi / p.delta_e)));
    }
    HamiltonianSet::new(h, Vec::new(), layout, None)
}
