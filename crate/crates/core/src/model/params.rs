//! Parameter bundles for the dimensionless interaction models and for the
//! physical device formulas.

use crate::error::{CoreError, Result};
use crate::scalar::{real, Scalar};

/// Parameters of the dimensionless interaction-picture models.
///
/// Couplings and decay rates are quoted in units of the reference coupling
/// `g` (so `g1 = 1` means g1 equals g); times are then dimensionless `g t`.
/// `omega_b` and `delta` matter only to the explicitly time-dependent model,
/// where `delta = +omega_b` picks the beam-splitter (transfer) resonance and
/// `delta = -omega_b` the two-mode-squeezing (entangling) one.
#[derive(Clone, PartialEq, Debug)]
pub struct ModelParams<T> {
    /// NV-optical coupling g1.
    pub g1: T,
    /// SC-microwave coupling g2.
    pub g2: T,
    /// Linearized electro-optic coupling G_i.
    pub gi_lin: T,
    /// Optical cavity decay kappa_1.
    pub kappa1: T,
    /// NV dephasing gamma_1.
    pub gamma1: T,
    /// Microwave resonator decay kappa_2.
    pub kappa2: T,
    /// SC qubit relaxation gamma_2.
    pub gamma2: T,
    /// Microwave frequency omega_b (time-dependent model only).
    pub omega_b: T,
    /// Laser detuning Delta = omega_a - omega_L (time-dependent model only).
    pub delta: T,
    /// Initial-state angle theta.
    pub theta: T,
    /// Optical Fock truncation.
    pub n_a: usize,
    /// Microwave Fock truncation.
    pub n_b: usize,
}

impl<T: Scalar> Default for ModelParams<T> {
    /// Transfer-style defaults: symmetric couplings at the reference g, the
    /// small decay set, exact two-level truncations.
    fn default() -> Self {
        Self {
            g1: T::one(),
            g2: T::one(),
            gi_lin: T::one(),
            kappa1: real(0.1),
            gamma1: real(0.01),
            kappa2: real(0.01),
            gamma2: real(0.01),
            omega_b: real(50.0),
            delta: real(50.0),
            theta: T::FRAC_PI_4(),
            n_a: 2,
            n_b: 2,
        }
    }
}

impl<T: Scalar> ModelParams<T> {
    /// Checks rate signs, truncations and the angle domain.
    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("g1", self.g1),
            ("g2", self.g2),
            ("gi_lin", self.gi_lin),
            ("kappa1", self.kappa1),
            ("gamma1", self.gamma1),
            ("kappa2", self.kappa2),
            ("gamma2", self.gamma2),
            ("omega_b", self.omega_b),
        ];
        for (name, v) in rates {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(CoreError::InvalidArgument(format!(
                    "{name} must be finite and >= 0, got {:e}",
                    v.to_f64().unwrap_or(f64::NAN)
                )));
            }
        }
        if !self.delta.is_finite() {
            return Err(CoreError::InvalidArgument("delta must be finite".into()));
        }
        if self.n_a < 2 || self.n_b < 2 {
            return Err(CoreError::InvalidArgument(format!(
                "truncations must be at least 2, got n_a={}, n_b={}",
                self.n_a, self.n_b
            )));
        }
        let two_pi = T::PI() + T::PI();
        if !(self.theta >= T::zero() && self.theta < two_pi) {
            return Err(CoreError::InvalidArgument(format!(
                "theta must lie in [0, 2 pi), got {:e}",
                self.theta.to_f64().unwrap_or(f64::NAN)
            )));
        }
        Ok(())
    }

    /// Copy with both truncations replaced, for truncation scans.
    pub fn with_truncation(&self, n_a: usize, n_b: usize) -> Self {
        let mut p = self.clone();
        p.n_a = n_a;
        p.n_b = n_b;
        p
    }
}

/// Device-level parameters in SI units for the coupling-rate formulas.
#[derive(Clone, PartialEq, Debug)]
pub struct PhysicalParams<T> {
    /// Optical angular frequency omega_a [rad/s].
    pub omega_a: T,
    /// Microwave angular frequency omega_b [rad/s].
    pub omega_b: T,
    /// Refractive index n.
    pub n_refr: T,
    /// Electro-optic coefficient c_eo [m/V].
    pub c_eo: T,
    /// Modulator length l [m] (informational; the rate uses `tau_fraction`).
    pub length_l: T,
    /// Modulator thickness d [m].
    pub thickness_d: T,
    /// The ratio l / (c tau).
    pub tau_fraction: T,
    /// Resonator capacitance C [F].
    pub capacitance: T,
    /// Intracavity amplitude |alpha_a|.
    pub alpha_a: T,
    /// Classical Rabi drive Omega [rad/s].
    pub omega_rabi: T,
    /// Bare NV-cavity coupling g_e0 [rad/s].
    pub g_e0: T,
    /// Excited-state detuning delta_e [rad/s].
    pub delta_e: T,
}

impl<T: Scalar> PhysicalParams<T> {
    /// The workable device set quoted alongside the coupling estimates:
    /// lithium-niobate-like modulator (n^3 c_eo = 300 pm/V), 10 um gap,
    /// l/(c tau) = 0.5, 1 pF resonator at 2 pi x 6 GHz, telecom optical
    /// frequency 2 pi x 193 THz, kilohertz-scale drive enhancement available
    /// through |alpha_a| = 1000.
    pub fn device_defaults() -> Self {
        let two_pi = std::f64::consts::TAU;
        Self {
            omega_a: real(two_pi * 193e12),
            omega_b: real(two_pi * 6e9),
            n_refr: real(2.14),
            c_eo: real(30.8e-12),
            length_l: real(1.5e-3),
            thickness_d: real(10e-6),
            tau_fraction: real(0.5),
            capacitance: real(1e-12),
            alpha_a: real(1000.0),
            omega_rabi: real(two_pi * 0.25e9),
            g_e0: real(two_pi * 0.5e9),
            delta_e: real(two_pi * 25e9),
        }
    }

    /// Positivity of every physical quantity (alpha_a may be zero).
    pub fn validate(&self) -> Result<()> {
        let strictly_positive = [
            ("omega_a", self.omega_a),
            ("omega_b", self.omega_b),
            ("n_refr", self.n_refr),
            ("c_eo", self.c_eo),
            ("length_l", self.length_l),
            ("thickness_d", self.thickness_d),
            ("tau_fraction", self.tau_fraction),
            ("capacitance", self.capacitance),
        ];
        for (name, v) in strictly_positive {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(CoreError::InvalidArgument(format!(
                    "{name} must be finite and > 0, got {:e}",
                    v.to_f64().unwrap_or(f64::NAN)
                )));
            }
        }
        let non_negative = [
            ("alpha_a", self.alpha_a),
            ("omega_rabi", self.omega_rabi),
            ("g_e0", self.g_e0),
        ];
        for (name, v) in non_negative {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(CoreError::InvalidArgument(format!(
                    "{name} must be finite and >= 0, got {:e}",
                    v.to_f64().unwrap_or(f64::NAN)
                )));
            }
        }
        if !self.delta_e.is_finite() {
            return Err(CoreError::InvalidArgument("delta_e must be finite".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        ModelParams::<f64>::default().validate().unwrap();
        PhysicalParams::<f64>::device_defaults().validate().unwrap();
    }

    #[test]
    fn negative_rate_rejected() {
        let mut p = ModelParams::<f64>::default();
        p.kappa1 = -0.1;
        assert!(p.validate().is_err());
    }

    #[test]
    fn theta_domain_enforced() {
        let mut p = ModelParams::<f64>::default();
        p.theta = 7.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn truncation_floor_enforced() {
        let mut p = ModelParams::<f64>::default();
        p.n_a = 1;
        assert!(p.validate().is_err());
    }

    #[test]
    fn physical_zero_thickness_rejected() {
        let mut p = PhysicalParams::<f64>::device_defaults();
        p.thickness_d = 0.0;
        assert!(p.validate().is_err());
    }
}
