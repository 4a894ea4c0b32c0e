//! Coupling-rate report for a physical device parameter set: the effective
//! NV-photon rate, the single-photon electro-optic rate and its
//! drive-enhanced version, each in angular and ordinary frequency and
//! optionally in units of a reference coupling.

use hqsim_core::model::physical::{electro_optic_rate, g1_effective, linearized_coupling};
use hqsim_core::model::PhysicalParams;
use hqsim_core::Real;

use crate::error::{CliError, CliResult};

const TAU: f64 = std::f64::consts::TAU;

pub struct CouplingReport {
    /// Effective two-level NV-photon coupling [rad/s].
    pub g1: f64,
    /// `max(omega_rabi, g_e0) / |delta_e|`; the elimination behind `g1`
    /// holds when this is small.
    pub g1_validity: f64,
    /// Single-photon electro-optic rate [rad/s].
    pub gi: f64,
    /// Drive-enhanced rate `g_i |alpha_a|` [rad/s].
    pub gi_lin: f64,
    pub alpha_a: f64,
    /// `G_i / omega_b`; the static two-mode picture needs this small.
    pub sideband_ratio: f64,
    /// Reference coupling [rad/s] for the dimensionless column.
    pub g_ref: Option<f64>,
}

pub fn coupling_report(p: &PhysicalParams<Real>, g_ref_hz: Option<f64>) -> CliResult<CouplingReport> {
    p.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let g_ref = match g_ref_hz {
        None => None,
        Some(hz) => {
            if !(hz > 0.0) || !hz.is_finite() {
                return Err(CliError::Config(format!(
                    "g-ref must be finite and > 0 Hz, got {hz}"
                )));
            }
            Some(hz * TAU)
        }
    };
    let (g1, g1_validity) = g1_effective(p).map_err(|e| CliError::Config(e.to_string()))?;
    let gi = electro_optic_rate(p)?;
    let gi_lin = linearized_coupling(p)?;
    Ok(CouplingReport {
        g1,
        g1_validity,
        gi,
        gi_lin,
        alpha_a: p.alpha_a,
        sideband_ratio: gi_lin / p.omega_b,
        g_ref,
    })
}

impl CouplingReport {
    fn rate_line(&self, name: &str, rate: f64) -> String {
        let mut s = format!("{name} = {rate:.5e} rad/s = {:.5e} Hz", rate / TAU);
        if let Some(g) = self.g_ref {
            s.push_str(&format!(" = {:.4e} g", rate / g));
        }
        s
    }

    pub fn render(&self) -> Vec<String> {
        vec![
            self.rate_line("g_1", self.g1),
            format!(
                "      elimination validity max(omega_rabi, g_e0) / |delta_e| = {:.3e}",
                self.g1_validity
            ),
            self.rate_line("g_i", self.gi),
            self.rate_line("G_i", self.gi_lin),
            format!(
                "      drive enhancement |alpha_a| = {}, sideband ratio G_i / omega_b = {:.3e}",
                self.alpha_a, self.sideband_ratio
            ),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn device_defaults_report() {
        let r = coupling_report(&PhysicalParams::device_defaults(), None).unwrap();
        assert_relative_eq!(r.gi, 2.5804049e4, max_relative = 1e-6);
        assert_relative_eq!(r.gi / TAU, 4.1068420e3, max_relative = 1e-6);
        assert_relative_eq!(r.gi_lin, 1000.0 * r.gi, max_relative = 1e-12);
        assert!(r.sideband_ratio < 1e-2);
        assert!(r.g1_validity < 0.05);
    }

    #[test]
    fn zero_drive_zeroes_g1() {
        let mut p = PhysicalParams::device_defaults();
        p.omega_rabi = 0.0;
        let r = coupling_report(&p, None).unwrap();
        assert_eq!(r.g1, 0.0);
    }

    #[test]
    fn reference_column_scales() {
        let p = PhysicalParams::device_defaults();
        let r = coupling_report(&p, Some(1e6)).unwrap();
        let line = r.rate_line("G_i", r.gi_lin);
        assert!(line.ends_with(" g"), "{line}");
        // 4.10684 MHz against a 1 MHz reference
        assert_relative_eq!(r.gi_lin / r.g_ref.unwrap(), 4.1068420, max_relative = 1e-6);
    }

    #[test]
    fn bad_reference_rejected() {
        let p = PhysicalParams::device_defaults();
        assert!(matches!(coupling_report(&p, Some(0.0)), Err(CliError::Config(_))));
        assert!(matches!(coupling_report(&p, Some(f64::NAN)), Err(CliError::Config(_))));
    }

    #[test]
    fn invalid_params_are_config_errors() {
        let mut p = PhysicalParams::device_defaults();
        p.capacitance = -1.0;
        assert!(matches!(coupling_report(&p, None), Err(CliError::Config(_))));
    }
}
