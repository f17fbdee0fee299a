//! Per-hop SNR and decode-and-forward combining for a single realisation.

use serde::{Deserialize, Serialize};

use crate::antenna::{composite_gain, ArrayConfig, ElementPattern, MisalignmentStats, PointingSample};
use crate::atmosphere::{total_path_loss_db, AbsorptionPath, AtmosphereParams, CarrierPlan};
use crate::error::{Error, Result};

/// Which hop of the relay a [`HopConfig`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HopSide {
    /// CN → UAV.
    Cu,
    /// UAV → RA.
    Ur,
}

impl HopSide {
    pub fn label(self) -> &'static str {
        match self {
            HopSide::Cu => "cu",
            HopSide::Ur => "ur",
        }
    }
}

/// One array with its pointing-error statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Terminal {
    pub array: ArrayConfig,
    pub misalignment: MisalignmentStats,
}

/// Gaseous-absorption treatment of a hop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AbsorptionModel {
    /// No gaseous absorption.
    FreeSpace,
    /// Sea-level rate over the full length.
    Horizontal,
    /// Exponential profile integrated along the slant path.
    Slant,
}

/// Everything needed to evaluate one hop's SNR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopConfig {
    pub side: HopSide,
    /// Transmit power (W).
    pub tx_power_w: f64,
    /// Receiver noise power (W).
    pub noise_power_w: f64,
    /// Array on the ground terminal.
    pub ground: Terminal,
    /// Array on the UAV facing this hop's ground terminal.
    pub uav: Terminal,
    pub element: ElementPattern,
    pub carrier: CarrierPlan,
    pub atmosphere: AtmosphereParams,
    pub absorption: AbsorptionModel,
}

impl HopConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tx_power_w > 0.0) {
            return Err(Error::domain("tx_power", self.tx_power_w, "(0, inf) W"));
        }
        if !(self.noise_power_w > 0.0) {
            return Err(Error::domain("noise_power", self.noise_power_w, "(0, inf) W"));
        }
        self.ground.array.validate()?;
        self.uav.array.validate()?;
        self.ground.misalignment.validate()?;
        self.uav.misalignment.validate()
    }

    /// Altitude of this hop's ground terminal above sea level (km).
    pub fn ground_height_km(&self) -> f64 {
        match self.side {
            HopSide::Cu => self.atmosphere.ground_height_s_km,
            HopSide::Ur => self.atmosphere.ground_height_d_km,
        }
    }

    /// Total path loss (dB) of a link of slant length `l_m` at elevation `psi`.
    ///
    /// The slant segment climbs from the ground terminal by `l_m·sin(psi)`.
    pub fn path_loss_db(&self, l_m: f64, psi: f64) -> Result<f64> {
        let path = match self.absorption {
            AbsorptionModel::FreeSpace => AbsorptionPath::None,
            AbsorptionModel::Horizontal => AbsorptionPath::Horizontal,
            AbsorptionModel::Slant => {
                let h1_km = self.ground_height_km();
                AbsorptionPath::Slant {
                    h1_km,
                    h2_km: h1_km + l_m * psi.sin() / 1000.0,
                    psi,
                }
            }
        };
        total_path_loss_db(&self.carrier, &self.atmosphere, l_m, path)
    }

    /// Linear channel power gain `h_L ≤ 1`.
    pub fn channel_gain(&self, l_m: f64, psi: f64) -> Result<f64> {
        Ok(db_to_linear(-self.path_loss_db(l_m, psi)?))
    }

    /// SNR with unit antenna gains: `P_t·h_L/σ_n²`.
    pub fn snr_scale(&self, l_m: f64, psi: f64) -> Result<f64> {
        Ok(self.tx_power_w / self.noise_power_w * self.channel_gain(l_m, psi)?)
    }

    /// Product of both composite antenna gains for one pointing realisation.
    pub fn antenna_gain(&self, ground: &PointingSample, uav: &PointingSample) -> f64 {
        let k = self.carrier.wavenumber();
        composite_gain(&self.ground.array, &self.element, k, ground)
            * composite_gain(&self.uav.array, &self.element, k, uav)
    }
}

/// Instantaneous SNR of one hop together with the pointing that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrRealization {
    pub gamma: f64,
    pub ground_pointing: PointingSample,
    pub uav_pointing: PointingSample,
}

pub fn hop_snr(
    hop: &HopConfig,
    l_m: f64,
    psi: f64,
    ground: PointingSample,
    uav: PointingSample,
) -> Result<SnrRealization> {
    let gamma = hop.snr_scale(l_m, psi)? * hop.antenna_gain(&ground, &uav);
    Ok(SnrRealization {
        gamma,
        ground_pointing: ground,
        uav_pointing: uav,
    })
}

/// Logarithm base used for capacities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CapacityUnit {
    /// bits/s/Hz
    #[default]
    Bits,
    /// nats/s/Hz
    Nats,
}

impl CapacityUnit {
    #[inline]
    pub fn capacity(self, gamma: f64) -> f64 {
        match self {
            CapacityUnit::Bits => gamma.ln_1p() * std::f64::consts::LOG2_E,
            CapacityUnit::Nats => gamma.ln_1p(),
        }
    }
}

/// `log2(1 + gamma)` in bits/s/Hz.
pub fn instantaneous_capacity(gamma: f64) -> f64 {
    CapacityUnit::Bits.capacity(gamma)
}

/// End-to-end SNR of a decode-and-forward relay: the weaker hop.
pub fn e2e_snr(gamma_cu: f64, gamma_ur: f64) -> f64 {
    gamma_cu.min(gamma_ur)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Thermal noise power (W) for a noise density in dBm/Hz, bandwidth and noise figure.
pub fn thermal_noise_power_w(psd_dbm_per_hz: f64, bandwidth_hz: f64, noise_figure_db: f64) -> f64 {
    let dbm = psd_dbm_per_hz + 10.0 * bandwidth_hz.log10() + noise_figure_db;
    db_to_linear(dbm - 30.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antenna::pointing_from_axes;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn hop(n_ground: (u32, u32), n_uav: (u32, u32), absorption: AbsorptionModel) -> HopConfig {
        let carrier = CarrierPlan::new(70.0).unwrap();
        let d = carrier.half_wavelength_m();
        let stats = MisalignmentStats::new(0.0, 0.0, 0.01, 0.01).unwrap();
        HopConfig {
            side: HopSide::Cu,
            tx_power_w: 1.0,
            noise_power_w: thermal_noise_power_w(-174.0, 1e9, 10.0),
            ground: Terminal {
                array: ArrayConfig::uniform(n_ground.0, n_ground.1, d).unwrap(),
                misalignment: stats,
            },
            uav: Terminal {
                array: ArrayConfig::uniform(n_uav.0, n_uav.1, d).unwrap(),
                misalignment: stats,
            },
            element: ElementPattern::default(),
            carrier,
            atmosphere: AtmosphereParams::default(),
            absorption,
        }
    }

    #[test]
    fn unit_loss_unit_power() {
        let mut h = hop((1, 1), (1, 1), AbsorptionModel::FreeSpace);
        h.noise_power_w = h.tx_power_w;
        let l = h.carrier.wavelength_m() / (4.0 * PI);
        let b = PointingSample::BORESIGHT;
        let g = hop_snr(&h, l, 0.5, b, b).unwrap().gamma;
        let ge = ElementPattern::default().gain(&b);
        assert_relative_eq!(g, ge * ge, max_relative = 1e-12);
    }

    #[test]
    fn null_kills_snr() {
        let h = hop((12, 12), (12, 18), AbsorptionModel::Slant);
        let null = pointing_from_axes((2.0f64 / 12.0).asin(), 0.0).unwrap();
        let g = hop_snr(&h, 5000.0, 0.5, null, PointingSample::BORESIGHT).unwrap().gamma;
        assert!(g < 1e-20);
    }

    #[test]
    fn reference_cu_hop_boresight() {
        // Independent hand computation: 1 W, −74 dBm noise, 18×18 ground
        // array, 12×18 UAV array, 11.4 km slant link at 0.27 rad.
        let h = hop((18, 18), (12, 18), AbsorptionModel::Slant);
        let b = PointingSample::BORESIGHT;
        let g = hop_snr(&h, 11_400.0, 0.27, b, b).unwrap().gamma;
        assert_relative_eq!(g, 31.953_504_342_055_93, max_relative = 1e-9);
    }

    #[test]
    fn snr_scaling_laws() {
        let h = hop((4, 4), (4, 4), AbsorptionModel::Slant);
        let b = PointingSample::BORESIGHT;
        let base = hop_snr(&h, 3000.0, 0.6, b, b).unwrap().gamma;
        let mut louder = h.clone();
        louder.tx_power_w *= 3.0;
        assert_relative_eq!(hop_snr(&louder, 3000.0, 0.6, b, b).unwrap().gamma, 3.0 * base, max_relative = 1e-12);
        let mut noisier = h.clone();
        noisier.noise_power_w *= 2.0;
        assert_relative_eq!(hop_snr(&noisier, 3000.0, 0.6, b, b).unwrap().gamma, 0.5 * base, max_relative = 1e-12);
        let mut prev = f64::INFINITY;
        for i in 1..50 {
            let g = hop_snr(&h, 500.0 * i as f64, 0.6, b, b).unwrap().gamma;
            assert!(g <= prev);
            prev = g;
        }
    }

    #[test]
    fn capacity_values() {
        assert_eq!(instantaneous_capacity(0.0), 0.0);
        assert_relative_eq!(instantaneous_capacity(1.0), 1.0, epsilon = 1e-15);
        assert_relative_eq!(instantaneous_capacity(255.0), 8.0, epsilon = 1e-14);
        assert_relative_eq!(CapacityUnit::Nats.capacity(std::f64::consts::E - 1.0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn df_combining() {
        assert_eq!(e2e_snr(4.0, 9.0), 4.0);
        assert_eq!(e2e_snr(9.0, 4.0), 4.0);
        assert_eq!(e2e_snr(2.5, 2.5), 2.5);
        assert_eq!(e2e_snr(0.0, 100.0), 0.0);
    }

    #[test]
    fn noise_default_is_minus_74_dbm() {
        let w = thermal_noise_power_w(-174.0, 1e9, 10.0);
        assert_relative_eq!(linear_to_db(w) + 30.0, -74.0, epsilon = 1e-12);
    }

    #[test]
    fn capacity_concave_increasing() {
        let xs: Vec<f64> = (0..200).map(|i| i as f64 * 0.37).collect();
        let c: Vec<f64> = xs.iter().map(|&x| instantaneous_capacity(x)).collect();
        assert!(c.windows(2).all(|w| w[1] > w[0]));
        assert!(c.windows(3).all(|w| w[2] - w[1] < w[1] - w[0]));
    }
}
