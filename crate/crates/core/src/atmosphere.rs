//! Gaseous absorption and total path loss.
//!
//! Sea-level specific attenuation uses the simplified ITU expressions for
//! oxygen and water vapour at 20 °C, valid below 350 GHz. Both absorber
//! densities fall off exponentially with altitude, so a slant segment
//! integrates in closed form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Upper edge (exclusive) of the frequency range covered by the absorption model, in GHz.
pub const MAX_MODEL_FREQUENCY_GHZ: f64 = 350.0;

const FREQ_RANGE: &str = "(0, 350) GHz";

/// Carrier frequency together with the derived wavelength and wavenumber.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarrierPlan {
    f_c_ghz: f64,
    wavelength_m: f64,
    wavenumber: f64,
}

impl CarrierPlan {
    pub fn new(f_c_ghz: f64) -> Result<Self> {
        check_frequency(f_c_ghz)?;
        let wavelength_m = SPEED_OF_LIGHT / (f_c_ghz * 1e9);
        Ok(Self {
            f_c_ghz,
            wavelength_m,
            wavenumber: 2.0 * std::f64::consts::PI / wavelength_m,
        })
    }

    pub fn f_c_ghz(&self) -> f64 {
        self.f_c_ghz
    }

    pub fn wavelength_m(&self) -> f64 {
        self.wavelength_m
    }

    /// Wavenumber `2π/λ` in rad/m.
    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    pub fn half_wavelength_m(&self) -> f64 {
        0.5 * self.wavelength_m
    }
}

/// Water-vapour density, scale height and terminal elevations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtmosphereParams {
    /// Sea-level water-vapour density (g/m³).
    pub rho0: f64,
    /// Scale height of the absorber profile (km).
    pub h_scale_km: f64,
    /// Height of the CN terminal above sea level (km).
    pub ground_height_s_km: f64,
    /// Height of the RA terminal above sea level (km).
    pub ground_height_d_km: f64,
}

impl Default for AtmosphereParams {
    fn default() -> Self {
        Self {
            rho0: 7.5,
            h_scale_km: 1.5,
            ground_height_s_km: 0.0,
            ground_height_d_km: 0.0,
        }
    }
}

impl AtmosphereParams {
    pub fn new(
        rho0: f64,
        h_scale_km: f64,
        ground_height_s_km: f64,
        ground_height_d_km: f64,
    ) -> Result<Self> {
        if !(rho0 > 0.0) {
            return Err(Error::domain("rho0", rho0, "(0, inf) g/m^3"));
        }
        if !(h_scale_km > 0.0) {
            return Err(Error::domain("h_scale", h_scale_km, "(0, inf) km"));
        }
        if !(ground_height_s_km >= 0.0) {
            return Err(Error::domain("ground_height_s", ground_height_s_km, "[0, inf) km"));
        }
        if !(ground_height_d_km >= 0.0) {
            return Err(Error::domain("ground_height_d", ground_height_d_km, "[0, inf) km"));
        }
        Ok(Self {
            rho0,
            h_scale_km,
            ground_height_s_km,
            ground_height_d_km,
        })
    }

    /// Combined oxygen and water-vapour attenuation at sea level (dB/km).
    pub fn sea_level_attn(&self, f_c_ghz: f64) -> Result<f64> {
        Ok(oxygen_attn_sea_level(f_c_ghz)? + water_attn_sea_level(f_c_ghz, self.rho0)?)
    }

    /// Specific attenuation at altitude `h_km` above sea level (dB/km).
    pub fn specific_attn_at_height(&self, f_c_ghz: f64, h_km: f64) -> Result<f64> {
        if !(h_km >= 0.0) {
            return Err(Error::domain("height", h_km, "[0, inf) km"));
        }
        Ok(self.sea_level_attn(f_c_ghz)? * (-h_km / self.h_scale_km).exp())
    }

    /// Total gaseous attenuation (dB) of a straight segment climbing from
    /// `h1_km` to `h2_km` at elevation `psi` (rad).
    pub fn slant_attn_total(&self, f_c_ghz: f64, h1_km: f64, h2_km: f64, psi: f64) -> Result<f64> {
        if !(h1_km >= 0.0) {
            return Err(Error::domain("h1", h1_km, "[0, h2) km"));
        }
        if !(h2_km > h1_km) {
            return Err(Error::domain("h2", h2_km, "(h1, inf) km"));
        }
        if !(psi > 0.0 && psi <= std::f64::consts::FRAC_PI_2) {
            return Err(Error::domain("psi", psi, "(0, pi/2] rad"));
        }
        let hs = self.h_scale_km;
        let column = (-h1_km / hs).exp() - (-h2_km / hs).exp();
        Ok(self.sea_level_attn(f_c_ghz)? * column * hs / psi.sin())
    }
}

/// How the gaseous-absorption term of a link is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AbsorptionPath {
    /// Free-space loss only.
    None,
    /// Sea-level specific attenuation applied over the whole length.
    Horizontal,
    /// Slant segment from `h1_km` to `h2_km` at elevation `psi`.
    Slant { h1_km: f64, h2_km: f64, psi: f64 },
}

fn check_frequency(f_c_ghz: f64) -> Result<()> {
    if f_c_ghz > 0.0 && f_c_ghz < MAX_MODEL_FREQUENCY_GHZ {
        Ok(())
    } else {
        Err(Error::domain("f_c", f_c_ghz, FREQ_RANGE))
    }
}

fn oxygen_low_branch(f: f64) -> f64 {
    0.001 * f * f * (6.09 / (f * f + 0.227) + 4.81 / ((f - 57.0).powi(2) + 1.5))
}

/// Sea-level oxygen attenuation (dB/km) at 20 °C.
///
/// Three branches: a resonance fit below 57 GHz, a linear ramp anchored on
/// the low branch across 57–63 GHz, and a second fit above 63 GHz. The
/// boundary frequencies themselves belong to the ramp.
pub fn oxygen_attn_sea_level(f_c_ghz: f64) -> Result<f64> {
    check_frequency(f_c_ghz)?;
    let f = f_c_ghz;
    let value = if f < 57.0 {
        oxygen_low_branch(f)
    } else if f <= 63.0 {
        oxygen_low_branch(57.0) + 1.5 * (f - 57.0)
    } else {
        0.001 * f * f * (4.13 / ((f - 63.0).powi(2) + 1.1) + 0.19 / ((f - 118.7).powi(2) + 2.0))
    };
    Ok(value)
}

/// Sea-level water-vapour attenuation (dB/km) at 20 °C for density `rho0` (g/m³).
pub fn water_attn_sea_level(f_c_ghz: f64, rho0: f64) -> Result<f64> {
    check_frequency(f_c_ghz)?;
    if !(rho0 >= 0.0) {
        return Err(Error::domain("rho0", rho0, "[0, inf) g/m^3"));
    }
    let f = f_c_ghz;
    let lines = 0.05
        + 3.6 / ((f - 22.2).powi(2) + 8.5)
        + 10.6 / ((f - 183.3).powi(2) + 9.0)
        + 8.9 / ((f - 325.4).powi(2) + 26.3);
    Ok(0.0001 * f * f * rho0 * lines)
}

/// Free-space path loss `20·log10(4πL/λ)` in dB.
pub fn free_space_loss_db(carrier: &CarrierPlan, l_m: f64) -> Result<f64> {
    if !(l_m > 0.0) {
        return Err(Error::domain("link length", l_m, "(0, inf) m"));
    }
    Ok(20.0 * (4.0 * std::f64::consts::PI * l_m / carrier.wavelength_m()).log10())
}

/// Free-space loss plus gaseous absorption (dB).
pub fn total_path_loss_db(
    carrier: &CarrierPlan,
    atmosphere: &AtmosphereParams,
    l_m: f64,
    path: AbsorptionPath,
) -> Result<f64> {
    let fspl = free_space_loss_db(carrier, l_m)?;
    let f = carrier.f_c_ghz();
    let absorption = match path {
        AbsorptionPath::None => 0.0,
        AbsorptionPath::Horizontal => atmosphere.sea_level_attn(f)? * l_m / 1000.0,
        AbsorptionPath::Slant { h1_km, h2_km, psi } => {
            atmosphere.slant_attn_total(f, h1_km, h2_km, psi)?
        }
    };
    Ok(fspl + absorption)
}
