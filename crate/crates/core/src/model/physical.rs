//! Coupling-rate formulas connecting the device parameters to the
//! dimensionless model couplings.

use crate::error::{CoreError, Result};
use crate::model::params::PhysicalParams;
use crate::scalar::{real, Scalar};

/// Reduced Planck constant [J s].
pub const HBAR: f64 = 1.054_571_817e-34;

/// Effective NV-optical coupling after adiabatic elimination of the excited
/// state: `g1 = Omega g_e0 / delta_e`.
///
/// Also returns the large-detuning validity ratio `max(Omega, g_e0) /
/// |delta_e|`; the elimination is trustworthy when that ratio is small.
pub fn g1_effective<T: Scalar>(p: &PhysicalParams<T>) -> Result<(T, T)> {
    if p.delta_e == T::zero() {
        return Err(CoreError::InvalidArgument(
            "delta_e must be nonzero for the adiabatic elimination".into(),
        ));
    }
    let rate = p.omega_rabi * p.g_e0 / p.delta_e;
    let worst = if p.omega_rabi > p.g_e0 { p.omega_rabi } else { p.g_e0 };
    Ok((rate, worst / p.delta_e.abs()))
}

/// Single-photon electro-optic coupling [rad/s]:
/// `g_i = omega_a (n^3 c_eo) tau_fraction / d * sqrt(hbar omega_b / (2 C))`.
///
/// The square root is the zero-point voltage of the microwave resonator; the
/// prefactor is the optical resonance pull per volt across the modulator gap.
pub fn electro_optic_rate<T: Scalar>(p: &PhysicalParams<T>) -> Result<T> {
    p.validate()?;
    let half = real::<T>(0.5);
    let v_zp = (real::<T>(HBAR) * p.omega_b * half / p.capacitance).sqrt();
    let pull_per_volt =
        p.omega_a * p.n_refr.powi(3) * p.c_eo * p.tau_fraction / p.thickness_d;
    Ok(pull_per_volt * v_zp)
}

/// Drive-enhanced linearized coupling `G_i = g_i |alpha_a|`.
pub fn linearized_coupling<T: Scalar>(p: &PhysicalParams<T>) -> Result<T> {
    Ok(electro_optic_rate(p)? * p.alpha_a)
}
