//! Conversions from the dimensionless model to laboratory units.
//!
//! Rates such as `g` are angular frequencies in rad/s; "MHz" figures are
//! those rad/s values divided by 10⁶.

use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// Physical constants (CODATA 2018; the first four are exact in the SI).
pub mod constants {
    /// Planck constant, J·s.
    pub const H: f64 = 6.626_070_15e-34;
    /// Elementary charge, C.
    pub const E: f64 = 1.602_176_634e-19;
    /// Speed of light in vacuum, m/s.
    pub const C: f64 = 299_792_458.0;
    /// Reduced Planck constant, J·s.
    pub const HBAR: f64 = H / (2.0 * std::f64::consts::PI);
    /// Vacuum permittivity, F/m.
    pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
    /// Magnetic flux quantum `h/2e`, Wb.
    pub const PHI_0: f64 = H / (2.0 * E);
}

use constants::{C, EPSILON_0, H, HBAR, PHI_0};

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be a positive finite number, got {v}")))
    }
}

fn non_negative(name: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be >= 0, got {v}")))
    }
}

/// Quasi-two-dimensional cavity and the circuit loop inside it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    /// Plate area, m².
    pub area: f64,
    /// Plate separation, m.
    pub thickness: f64,
    pub quality: f64,
    /// Loop area, m².
    pub loop_area: f64,
}

impl CavityParams {
    pub fn new(area: f64, thickness: f64, quality: f64, loop_area: f64) -> Result<Self> {
        let cav = Self {
            area,
            thickness,
            quality,
            loop_area,
        };
        cav.validate()?;
        Ok(cav)
    }

    /// 1.5 cm square plates 1 μm apart, Q = 10⁶, and a loop 32 μm across.
    pub fn reference() -> Self {
        Self {
            area: 1.5e-2 * 1.5e-2,
            thickness: 1e-6,
            quality: 1e6,
            loop_area: PI * 16e-6 * 16e-6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("area", self.area)?;
        positive("thickness", self.thickness)?;
        positive("quality", self.quality)?;
        positive("loop_area", self.loop_area)
    }
}

/// Cavity mode frequency and wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityMode {
    pub nu_ghz: f64,
    pub lambda_m: f64,
}

/// `ν = gap·E_J/h`, `λ = c/ν`.
pub fn cavity_frequency(gap_over_ej: f64, ej_freq: f64) -> Result<CavityMode> {
    positive("gap_over_ej", gap_over_ej)?;
    positive("ej_freq", ej_freq)?;
    let nu_ghz = gap_over_ej * ej_freq;
    Ok(CavityMode {
        nu_ghz,
        lambda_m: C / (nu_ghz * 1e9),
    })
}

/// Vacuum flux through the loop in units of the flux quantum.
pub fn vacuum_flux_ratio(nu_ghz: f64, cav: &CavityParams) -> Result<f64> {
    positive("nu", nu_ghz)?;
    cav.validate()?;
    let b_vac = (H * nu_ghz * 1e9 / (EPSILON_0 * C * C * cav.area * cav.thickness)).sqrt();
    Ok(b_vac * cav.loop_area / PHI_0)
}

/// Critical current `2πE_J/Φ₀` with `E_J = h·ej_freq`, in A.
pub fn critical_current(ej_freq: f64) -> Result<f64> {
    positive("ej_freq", ej_freq)?;
    Ok(2.0 * PI * H * ej_freq * 1e9 / PHI_0)
}

/// Vacuum Rabi coupling in rad/s.
pub fn coupling_rate(t01: f64, phi_ratio: f64, ej_freq: f64) -> Result<f64> {
    positive("t01", t01)?;
    positive("phi_ratio", phi_ratio)?;
    let i_c = critical_current(ej_freq)?;
    // |t01|·I_c·Φ_w, divided by ħ.
    Ok(t01 * i_c * phi_ratio * PHI_0 / HBAR)
}

/// Interaction time in ns that realizes `gτ√N_t = tau_int`.
pub fn interaction_time(g: f64, tau_int: f64, n_t: f64) -> Result<f64> {
    positive("g", g)?;
    positive("tau_int", tau_int)?;
    positive("n_t", n_t)?;
    Ok(tau_int / (g * n_t.sqrt()) * 1e9)
}

/// `τ_p = Q/(2πν)` in seconds.
pub fn photon_lifetime(nu_ghz: f64, quality: f64) -> Result<f64> {
    positive("nu", nu_ghz)?;
    positive("quality", quality)?;
    Ok(quality / (2.0 * PI * nu_ghz * 1e9))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inductances {
    pub i_c: f64,
    pub l_j: f64,
    pub l_loop: f64,
}

/// Critical current, Josephson inductance and the loop inductance at
/// `β_L = L/L_J`.
pub fn inductance_check(ej_freq: f64, beta_l: f64) -> Result<Inductances> {
    non_negative("beta_L", beta_l)?;
    let i_c = critical_current(ej_freq)?;
    let l_j = PHI_0 / (2.0 * PI * i_c);
    Ok(Inductances {
        i_c,
        l_j,
        l_loop: beta_l * l_j,
    })
}

/// Size of the neglected `σ_z` coupling relative to the level gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaZEstimate {
    /// In units of `E_J`.
    pub magnitude: f64,
    pub ratio_to_gap: f64,
}

/// Gap used to judge the `σ_z` term, in units of `E_J`.
pub const REFERENCE_GAP: f64 = 0.05;

/// `πΦ_w/Φ₀` in units of `E_J`.
pub fn sigma_z_term_estimate(phi_ratio: f64) -> Result<SigmaZEstimate> {
    non_negative("phi_ratio", phi_ratio)?;
    let magnitude = PI * phi_ratio;
    Ok(SigmaZEstimate {
        magnitude,
        ratio_to_gap: magnitude / REFERENCE_GAP,
    })
}

/// Everything needed to put the model in laboratory units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceInputs {
    /// `(E_1 − E_0)/E_J`.
    pub gap_over_ej: f64,
    /// `|t01|` in units of `I_c Φ_w`.
    pub t01: f64,
    /// `E_J/h` in GHz.
    pub ej_freq: f64,
    pub cavity: CavityParams,
    pub beta_l: f64,
    pub tau_int: f64,
    pub n_t: f64,
}

impl DeviceInputs {
    /// Operating point used for the single-photon maser.
    pub fn reference() -> Self {
        Self {
            gap_over_ej: 0.05,
            t01: 0.13,
            ej_freq: 400.0,
            cavity: CavityParams::reference(),
            beta_l: 0.1,
            tau_int: 1.4 * PI,
            n_t: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceReport {
    pub nu_ghz: f64,
    pub lambda_m: f64,
    pub phi_w0_over_phi0: f64,
    /// rad/s.
    pub g: f64,
    pub tau_interaction_ns: f64,
    pub tau_photon_s: f64,
    pub i_c: f64,
    pub l_j: f64,
    pub l_loop: f64,
    pub beta_l: f64,
    pub sigma_z_term_over_ej: f64,
    pub sigma_z_ratio_to_gap: f64,
}

impl DeviceReport {
    /// Name, value and unit of every field, in display order.
    pub fn rows(&self) -> [(&'static str, f64, &'static str); 12] {
        [
            ("nu", self.nu_ghz, "GHz"),
            ("lambda", self.lambda_m, "m"),
            ("phi_w0_over_phi0", self.phi_w0_over_phi0, "1"),
            ("g", self.g, "rad/s"),
            ("tau_interaction", self.tau_interaction_ns, "ns"),
            ("tau_photon", self.tau_photon_s, "s"),
            ("I_c", self.i_c, "A"),
            ("L_J", self.l_j, "H"),
            ("L_loop", self.l_loop, "H"),
            ("beta_L", self.beta_l, "1"),
            ("sigma_z_term_over_ej", self.sigma_z_term_over_ej, "E_J"),
            ("sigma_z_ratio_to_gap", self.sigma_z_ratio_to_gap, "1"),
        ]
    }
}

pub fn device_report(inputs: &DeviceInputs) -> Result<DeviceReport> {
    let mode = cavity_frequency(inputs.gap_over_ej, inputs.ej_freq)?;
    let phi = vacuum_flux_ratio(mode.nu_ghz, &inputs.cavity)?;
    let g = coupling_rate(inputs.t01, phi, inputs.ej_freq)?;
    let ind = inductance_check(inputs.ej_freq, inputs.beta_l)?;
    let sz = sigma_z_term_estimate(phi)?;
    Ok(DeviceReport {
        nu_ghz: mode.nu_ghz,
        lambda_m: mode.lambda_m,
        phi_w0_over_phi0: phi,
        g,
        tau_interaction_ns: interaction_time(g, inputs.tau_int, inputs.n_t)?,
        tau_photon_s: photon_lifetime(mode.nu_ghz, inputs.cavity.quality)?,
        i_c: ind.i_c,
        l_j: ind.l_j,
        l_loop: ind.l_loop,
        beta_l: inputs.beta_l,
        sigma_z_term_over_ej: sz.magnitude,
        sigma_z_ratio_to_gap: sz.ratio_to_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        ((a - b) / b).abs() <= rel
    }

    #[test]
    fn flux_quantum() {
        assert!(close(PHI_0, 2.067_833_848e-15, 1e-9));
    }

    #[test]
    fn cavity_frequency_examples() {
        let m = cavity_frequency(0.05, 400.0).unwrap();
        assert!(close(m.nu_ghz, 20.0, 1e-12));
        assert!(close(m.lambda_m, 0.015, 0.01));
        assert!(cavity_frequency(0.05, 0.0).is_err());
        assert!(close(cavity_frequency(0.1, 400.0).unwrap().nu_ghz, 40.0, 1e-12));
    }

    #[test]
    fn vacuum_flux_examples() {
        let cav = CavityParams::reference();
        let r = vacuum_flux_ratio(20.0, &cav).unwrap();
        assert!(close(r, 1.1e-4, 0.1), "{r}");
        let doubled = CavityParams {
            loop_area: 2.0 * cav.loop_area,
            ..cav
        };
        assert!(close(vacuum_flux_ratio(20.0, &doubled).unwrap(), 2.0 * r, 1e-12));
        let wide = CavityParams {
            area: 4.0 * cav.area,
            ..cav
        };
        assert!(close(vacuum_flux_ratio(20.0, &wide).unwrap(), 0.5 * r, 1e-12));
        assert!(CavityParams::new(0.0, 1e-6, 1e6, 1e-9).is_err());
    }

    #[test]
    fn coupling_examples() {
        let g = coupling_rate(0.13, 1.1e-4, 400.0).unwrap();
        assert!(close(g, 218e6, 0.05), "{g}");
        assert!(close(coupling_rate(0.13, 2.2e-4, 400.0).unwrap(), 2.0 * g, 1e-12));
        let tau = interaction_time(g, 1.4 * PI, 1.0).unwrap();
        assert!(close(tau, 20.0, 0.1), "{tau}");
        assert!(coupling_rate(0.0, 1e-4, 400.0).is_err());
    }

    #[test]
    fn lifetime_examples() {
        assert!(close(photon_lifetime(20.0, 1e6).unwrap(), 7.957_747e-6, 1e-6));
        assert!(close(photon_lifetime(20.0, 2e6).unwrap(), 15.915_494e-6, 1e-6));
        assert!(close(photon_lifetime(40.0, 1e6).unwrap(), 3.978_874e-6, 1e-6));
    }

    #[test]
    fn inductance_examples() {
        // 2πE_J/Φ₀ = 4π·e·ν_J = 4π × 1.602176634e-19 C × 4e11 Hz.
        const I_C_400_GHZ: f64 = 8.053_48e-7;
        let ind = inductance_check(400.0, 0.1).unwrap();
        assert!(close(ind.i_c, I_C_400_GHZ, 1e-5), "{}", ind.i_c);
        assert!(close(ind.l_loop, 40e-12, 0.05), "{}", ind.l_loop);
        assert_eq!(inductance_check(400.0, 0.0).unwrap().l_loop, 0.0);
    }

    #[test]
    fn sigma_z_examples() {
        let e = sigma_z_term_estimate(1.1e-4).unwrap();
        assert!(close(e.magnitude, 3.456e-4, 1e-3));
        assert!(close(e.ratio_to_gap, 0.0069, 0.01));
        assert_eq!(sigma_z_term_estimate(0.0).unwrap().magnitude, 0.0);
        assert!(close(
            sigma_z_term_estimate(2.2e-4).unwrap().magnitude,
            2.0 * e.magnitude,
            1e-12
        ));
    }

    #[test]
    fn report_round_trip() {
        let r = device_report(&DeviceInputs::reference()).unwrap();
        assert!(close(r.tau_interaction_ns, 20.0, 0.1));
        assert!(close(r.g, 218e6, 0.05));
        assert!(close(r.tau_photon_s, 8e-6, 0.01));
        assert!(r.rows().iter().all(|(_, v, _)| v.is_finite() && *v > 0.0));
    }
}
