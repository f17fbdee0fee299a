//! Scenario files.
//!
//! A scenario is a TOML document whose keys carry their unit
//! (`f_c_ghz`, `sigma_x_deg`, `h_u_m`, ...). Every key is optional and
//! defaults to the reference deployment: 70 GHz, 19 km CN–RA distance,
//! 3.5 km orbit, 1 W / 200 mW transmitters, 18×18 ground arrays and 12×18
//! UAV arrays. Unknown keys are rejected. Angles are converted to radians
//! and powers to watts when the model objects are built.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::antenna::{ArrayConfig, ElementPattern, MisalignmentStats};
use crate::atmosphere::{AtmosphereParams, CarrierPlan, MAX_MODEL_FREQUENCY_GHZ};
use crate::geometry::PathGeometry;
use crate::link::{db_to_linear, thermal_noise_power_w, AbsorptionModel, CapacityUnit, HopConfig, HopSide, Terminal};
use crate::montecarlo::{LengthBounds, McSettings, RelayHops, Truncation, MIN_SAMPLES};
use crate::optimizer::{DesignSpace, OptimizerOptions};

/// A scenario file that could not be read or failed validation.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{}{}: {expected}", .key.as_deref().unwrap_or("<document>"), .line.map(|l| format!(" (line {l})")).unwrap_or_default())]
pub struct ConfigError {
    /// Dotted key path, when known.
    pub key: Option<String>,
    /// What the key should contain.
    pub expected: String,
    /// 1-based line in the source document.
    pub line: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CarrierSection {
    pub f_c_ghz: f64,
}

impl Default for CarrierSection {
    fn default() -> Self {
        Self { f_c_ghz: 70.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbsorptionKind {
    None,
    Horizontal,
    #[default]
    Slant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AtmosphereSection {
    pub rho0_g_per_m3: f64,
    pub h_scale_km: f64,
    pub ground_height_s_km: f64,
    pub ground_height_d_km: f64,
    pub absorption: AbsorptionKind,
}

impl Default for AtmosphereSection {
    fn default() -> Self {
        Self {
            rho0_g_per_m3: 7.5,
            h_scale_km: 1.5,
            ground_height_s_km: 0.0,
            ground_height_d_km: 0.0,
            absorption: AbsorptionKind::Slant,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometrySection {
    pub l_sd_m: f64,
    pub l_u1_m: f64,
    pub l_sc_m: f64,
    pub h_u_m: f64,
    pub psi_s_min_deg: f64,
    pub psi_d_min_deg: f64,
}

impl Default for GeometrySection {
    fn default() -> Self {
        Self {
            l_sd_m: 19_000.0,
            l_u1_m: 3_500.0,
            l_sc_m: 9_500.0,
            h_u_m: 3_000.0,
            psi_s_min_deg: 10.0,
            psi_d_min_deg: 15.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkSection {
    pub p_t_s_w: f64,
    pub p_t_d_w: f64,
    pub noise_psd_dbm_per_hz: f64,
    pub bandwidth_hz: f64,
    pub noise_figure_db: f64,
    /// Overrides the thermal noise model when set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_power_w: Option<f64>,
    pub gamma_th_db: f64,
    pub p_out_target: f64,
    pub capacity_unit: CapacityUnit,
}

impl Default for LinkSection {
    fn default() -> Self {
        Self {
            p_t_s_w: 1.0,
            p_t_d_w: 0.2,
            noise_psd_dbm_per_hz: -174.0,
            bandwidth_hz: 1e9,
            noise_figure_db: 10.0,
            noise_power_w: None,
            gamma_th_db: 0.0,
            p_out_target: 1e-3,
            capacity_unit: CapacityUnit::Bits,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ElementSection {
    pub g_max_dbi: f64,
    pub theta_3db_deg: f64,
    pub phi_3db_deg: f64,
    pub a_m_db: f64,
    pub sla_db: f64,
}

impl Default for ElementSection {
    fn default() -> Self {
        Self {
            g_max_dbi: 8.0,
            theta_3db_deg: 65.0,
            phi_3db_deg: 65.0,
            a_m_db: 30.0,
            sla_db: 30.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArraySection {
    pub n_x: u32,
    pub n_y: u32,
    pub spacing_x_wavelengths: f64,
    pub spacing_y_wavelengths: f64,
    pub beta_x_deg: f64,
    pub beta_y_deg: f64,
    pub mu_x_deg: f64,
    pub mu_y_deg: f64,
    pub sigma_x_deg: f64,
    pub sigma_y_deg: f64,
}

impl ArraySection {
    fn ground() -> Self {
        Self {
            n_x: 18,
            n_y: 18,
            spacing_x_wavelengths: 0.5,
            spacing_y_wavelengths: 0.5,
            beta_x_deg: 0.0,
            beta_y_deg: 0.0,
            mu_x_deg: 0.3,
            mu_y_deg: 0.3,
            sigma_x_deg: 0.5,
            sigma_y_deg: 0.5,
        }
    }

    fn uav() -> Self {
        Self {
            n_x: 12,
            n_y: 18,
            mu_x_deg: 1.7,
            mu_y_deg: 1.0,
            sigma_x_deg: 1.5,
            sigma_y_deg: 0.5,
            ..Self::ground()
        }
    }
}

impl Default for ArraySection {
    fn default() -> Self {
        Self::ground()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArraysSection {
    /// CN array.
    pub s: ArraySection,
    /// RA array.
    pub d: ArraySection,
    /// UAV array facing the CN.
    pub us: ArraySection,
    /// UAV array facing the RA.
    pub ud: ArraySection,
}

impl Default for ArraysSection {
    fn default() -> Self {
        Self {
            s: ArraySection::ground(),
            d: ArraySection::ground(),
            us: ArraySection::uav(),
            ud: ArraySection::uav(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonteCarloSection {
    pub samples: usize,
    pub seed: u64,
    pub path_points: usize,
    pub strict_truncation: bool,
    pub length_min_m: f64,
    pub length_max_m: f64,
}

impl Default for MonteCarloSection {
    fn default() -> Self {
        Self {
            samples: 100_000,
            seed: 20_220_419,
            path_points: 181,
            strict_truncation: false,
            length_min_m: 100.0,
            length_max_m: 200_000.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub l_sc_min_m: f64,
    pub l_sc_max_m: f64,
    pub l_sc_step_m: f64,
    pub with_path_average: bool,
    pub outage_map_theta_points: usize,
    pub atmos_f_min_ghz: f64,
    pub atmos_f_max_ghz: f64,
    pub atmos_f_step_ghz: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            l_sc_min_m: 4_000.0,
            l_sc_max_m: 15_000.0,
            l_sc_step_m: 250.0,
            with_path_average: true,
            outage_map_theta_points: 19,
            atmos_f_min_ghz: 1.0,
            atmos_f_max_ghz: 100.0,
            atmos_f_step_ghz: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerSection {
    pub n_sx: Vec<u32>,
    pub n_sy: Vec<u32>,
    pub n_dx: Vec<u32>,
    pub n_dy: Vec<u32>,
    pub n_usx: Vec<u32>,
    pub n_usy: Vec<u32>,
    pub n_udx: Vec<u32>,
    pub n_udy: Vec<u32>,
    pub h_u_m: Vec<f64>,
    pub l_sc_m: Vec<f64>,
    pub n_max: u32,
    pub tie_hops: bool,
    pub prune_axis_order: bool,
}

impl Default for OptimizerSection {
    fn default() -> Self {
        let uav: Vec<u32> = (6..=18).step_by(2).collect();
        Self {
            n_sx: vec![18],
            n_sy: vec![18],
            n_dx: vec![18],
            n_dy: vec![18],
            n_usx: uav.clone(),
            n_usy: uav.clone(),
            n_udx: uav.clone(),
            n_udy: uav,
            h_u_m: vec![3_000.0],
            l_sc_m: (0..6).map(|i| 8_500.0 + 500.0 * i as f64).collect(),
            n_max: 18,
            tie_hops: true,
            prune_axis_order: true,
        }
    }
}

/// Complete scenario description.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub carrier: CarrierSection,
    pub atmosphere: AtmosphereSection,
    pub geometry: GeometrySection,
    pub link: LinkSection,
    pub element: ElementSection,
    pub arrays: ArraysSection,
    pub montecarlo: MonteCarloSection,
    pub sweep: SweepSection,
    pub optimizer: OptimizerSection,
}

fn line_of_offset(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].matches('\n').count() + 1
}

/// Line on which dotted `key` is assigned, following `[table]` headers.
fn locate_key(src: &str, key: &str) -> Option<usize> {
    let (table, leaf) = key.rsplit_once('.').unwrap_or(("", key));
    let mut current = String::new();
    for (i, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if let Some(header) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = header.trim().to_string();
            continue;
        }
        let Some((lhs, _)) = line.split_once('=') else { continue };
        let lhs = lhs.trim();
        let full = if current.is_empty() {
            lhs.to_string()
        } else {
            format!("{current}.{lhs}")
        };
        if full == key || (current == table && lhs == leaf) {
            return Some(i + 1);
        }
    }
    None
}

fn parse_error(src: &str, err: toml::de::Error) -> ConfigError {
    let message = err.message().to_string();
    let line = err.span().map(|s| line_of_offset(src, s.start));
    let key = message
        .split('`')
        .nth(1)
        .filter(|_| message.starts_with("unknown field"))
        .map(str::to_string)
        .or_else(|| {
            let text = src.lines().nth(line? - 1)?;
            let (lhs, _) = text.split_once('=')?;
            Some(lhs.trim().to_string())
        });
    ConfigError {
        key,
        expected: message,
        line,
    }
}

/// Parse and validate a scenario from TOML text.
pub fn load_config_str(src: &str) -> Result<ScenarioConfig, ConfigError> {
    let cfg: ScenarioConfig = toml::from_str(src).map_err(|e| parse_error(src, e))?;
    cfg.validate().map_err(|mut e| {
        if let Some(key) = &e.key {
            e.line = locate_key(src, key);
        }
        e
    })?;
    Ok(cfg)
}

/// Read, parse and validate a scenario file.
pub fn load_config(path: impl AsRef<Path>) -> Result<ScenarioConfig, ConfigError> {
    let path = path.as_ref();
    let src = std::fs::read_to_string(path).map_err(|e| ConfigError {
        key: None,
        expected: format!("readable scenario file at {}: {e}", path.display()),
        line: None,
    })?;
    load_config_str(&src)
}

/// Serialise a scenario back to TOML.
pub fn save_config(cfg: &ScenarioConfig) -> String {
    toml::to_string(cfg).expect("scenario is always representable as TOML")
}

struct Checker(Vec<ConfigError>);

impl Checker {
    fn check(&mut self, ok: bool, key: &str, expected: &str) {
        if !ok {
            self.0.push(ConfigError {
                key: Some(key.to_string()),
                expected: expected.to_string(),
                line: None,
            });
        }
    }

    fn positive(&mut self, value: f64, key: &str, unit: &str) {
        self.check(value > 0.0 && value.is_finite(), key, &format!("positive number in {unit}"));
    }

    fn non_negative(&mut self, value: f64, key: &str, unit: &str) {
        self.check(value >= 0.0 && value.is_finite(), key, &format!("non-negative number in {unit}"));
    }

    fn elevation(&mut self, value: f64, key: &str) {
        self.check((0.0..90.0).contains(&value), key, "angle in degrees within [0, 90)");
    }
}

impl ScenarioConfig {
    /// Range checks; the first violation is reported.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut c = Checker(Vec::new());
        let f = self.carrier.f_c_ghz;
        c.check(
            f > 0.0 && f < MAX_MODEL_FREQUENCY_GHZ,
            "carrier.f_c_ghz",
            "frequency in GHz within the absorption model range (0, 350)",
        );

        let a = &self.atmosphere;
        c.positive(a.rho0_g_per_m3, "atmosphere.rho0_g_per_m3", "g/m^3");
        c.positive(a.h_scale_km, "atmosphere.h_scale_km", "km");
        c.non_negative(a.ground_height_s_km, "atmosphere.ground_height_s_km", "km");
        c.non_negative(a.ground_height_d_km, "atmosphere.ground_height_d_km", "km");

        let g = &self.geometry;
        c.positive(g.l_sd_m, "geometry.l_sd_m", "m");
        c.check(g.l_u1_m > 0.0 && g.l_u1_m < g.l_sd_m, "geometry.l_u1_m", "orbit diameter in m within (0, l_sd_m)");
        c.check(g.l_sc_m > 0.0 && g.l_sc_m < g.l_sd_m, "geometry.l_sc_m", "distance in m within (0, l_sd_m)");
        c.positive(g.h_u_m, "geometry.h_u_m", "m");
        c.elevation(g.psi_s_min_deg, "geometry.psi_s_min_deg");
        c.elevation(g.psi_d_min_deg, "geometry.psi_d_min_deg");

        let l = &self.link;
        c.positive(l.p_t_s_w, "link.p_t_s_w", "W");
        c.positive(l.p_t_d_w, "link.p_t_d_w", "W");
        c.positive(l.bandwidth_hz, "link.bandwidth_hz", "Hz");
        c.check(l.noise_psd_dbm_per_hz.is_finite(), "link.noise_psd_dbm_per_hz", "finite dBm/Hz");
        c.check(l.noise_figure_db.is_finite(), "link.noise_figure_db", "finite dB");
        if let Some(w) = l.noise_power_w {
            c.positive(w, "link.noise_power_w", "W");
        }
        c.check(l.gamma_th_db.is_finite(), "link.gamma_th_db", "finite dB");
        c.check(l.p_out_target > 0.0 && l.p_out_target <= 1.0, "link.p_out_target", "probability in (0, 1]");

        let e = &self.element;
        c.positive(e.theta_3db_deg, "element.theta_3db_deg", "degrees");
        c.positive(e.phi_3db_deg, "element.phi_3db_deg", "degrees");
        c.non_negative(e.a_m_db, "element.a_m_db", "dB");
        c.non_negative(e.sla_db, "element.sla_db", "dB");

        for (name, arr) in [
            ("s", &self.arrays.s),
            ("d", &self.arrays.d),
            ("us", &self.arrays.us),
            ("ud", &self.arrays.ud),
        ] {
            let key = |leaf: &str| format!("arrays.{name}.{leaf}");
            c.check(arr.n_x >= 1, &key("n_x"), "element count >= 1");
            c.check(arr.n_y >= 1, &key("n_y"), "element count >= 1");
            c.positive(arr.spacing_x_wavelengths, &key("spacing_x_wavelengths"), "wavelengths");
            c.positive(arr.spacing_y_wavelengths, &key("spacing_y_wavelengths"), "wavelengths");
            c.check(arr.mu_x_deg.abs() < 90.0, &key("mu_x_deg"), "angle in degrees within (-90, 90)");
            c.check(arr.mu_y_deg.abs() < 90.0, &key("mu_y_deg"), "angle in degrees within (-90, 90)");
            c.positive(arr.sigma_x_deg, &key("sigma_x_deg"), "degrees");
            c.positive(arr.sigma_y_deg, &key("sigma_y_deg"), "degrees");
        }

        let m = &self.montecarlo;
        c.check(m.samples >= MIN_SAMPLES, "montecarlo.samples", "sample count >= 100");
        c.check(m.path_points >= 2, "montecarlo.path_points", "point count >= 2");
        c.positive(m.length_min_m, "montecarlo.length_min_m", "m");
        c.check(m.length_max_m > m.length_min_m, "montecarlo.length_max_m", "length in m above length_min_m");

        let s = &self.sweep;
        c.check(
            s.l_sc_min_m > 0.0 && s.l_sc_min_m < g.l_sd_m,
            "sweep.l_sc_min_m",
            "distance in m within (0, l_sd_m)",
        );
        c.check(
            s.l_sc_max_m >= s.l_sc_min_m && s.l_sc_max_m < g.l_sd_m,
            "sweep.l_sc_max_m",
            "distance in m within [l_sc_min_m, l_sd_m)",
        );
        c.positive(s.l_sc_step_m, "sweep.l_sc_step_m", "m");
        c.check(s.outage_map_theta_points >= 2, "sweep.outage_map_theta_points", "point count >= 2");
        c.check(
            s.atmos_f_min_ghz > 0.0 && s.atmos_f_max_ghz < MAX_MODEL_FREQUENCY_GHZ && s.atmos_f_max_ghz >= s.atmos_f_min_ghz,
            "sweep.atmos_f_max_ghz",
            "frequency range in GHz within (0, 350)",
        );
        c.positive(s.atmos_f_step_ghz, "sweep.atmos_f_step_ghz", "GHz");

        let o = &self.optimizer;
        for (leaf, grid) in [
            ("n_sx", &o.n_sx),
            ("n_sy", &o.n_sy),
            ("n_dx", &o.n_dx),
            ("n_dy", &o.n_dy),
            ("n_usx", &o.n_usx),
            ("n_usy", &o.n_usy),
            ("n_udx", &o.n_udx),
            ("n_udy", &o.n_udy),
        ] {
            c.check(
                !grid.is_empty() && grid.iter().all(|&n| n >= 1 && n <= o.n_max),
                &format!("optimizer.{leaf}"),
                "non-empty list of element counts within [1, n_max]",
            );
        }
        c.check(
            !o.h_u_m.is_empty() && o.h_u_m.iter().all(|&h| h > 0.0),
            "optimizer.h_u_m",
            "non-empty list of altitudes in m",
        );
        c.check(
            !o.l_sc_m.is_empty() && o.l_sc_m.iter().all(|&x| x > 0.0 && x < g.l_sd_m),
            "optimizer.l_sc_m",
            "non-empty list of distances in m within (0, l_sd_m)",
        );

        match c.0.into_iter().next() {
            Some(err) => Err(err),
            None => Ok(()),
        }
    }

    /// SHA-256 of the canonical TOML form, first 16 hex digits.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(save_config(self).as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn carrier(&self) -> crate::Result<CarrierPlan> {
        CarrierPlan::new(self.carrier.f_c_ghz)
    }

    pub fn atmosphere(&self) -> crate::Result<AtmosphereParams> {
        let a = &self.atmosphere;
        AtmosphereParams::new(a.rho0_g_per_m3, a.h_scale_km, a.ground_height_s_km, a.ground_height_d_km)
    }

    pub fn geometry(&self) -> crate::Result<PathGeometry> {
        let g = &self.geometry;
        PathGeometry::new(
            g.l_sd_m,
            g.l_u1_m,
            g.l_sc_m,
            g.h_u_m,
            g.psi_s_min_deg.to_radians(),
            g.psi_d_min_deg.to_radians(),
        )
    }

    pub fn element(&self) -> ElementPattern {
        let e = &self.element;
        ElementPattern {
            g_max_dbi: e.g_max_dbi,
            theta_3db: e.theta_3db_deg.to_radians(),
            phi_3db: e.phi_3db_deg.to_radians(),
            a_m_db: e.a_m_db,
            sla_db: e.sla_db,
        }
    }

    /// Receiver noise power (W).
    pub fn noise_power_w(&self) -> f64 {
        let l = &self.link;
        l.noise_power_w
            .unwrap_or_else(|| thermal_noise_power_w(l.noise_psd_dbm_per_hz, l.bandwidth_hz, l.noise_figure_db))
    }

    /// Linear SNR threshold.
    pub fn gamma_th(&self) -> f64 {
        db_to_linear(self.link.gamma_th_db)
    }

    fn terminal(&self, section: &ArraySection, carrier: &CarrierPlan) -> crate::Result<Terminal> {
        let lambda = carrier.wavelength_m();
        Ok(Terminal {
            array: ArrayConfig::new(
                section.n_x,
                section.n_y,
                section.spacing_x_wavelengths * lambda,
                section.spacing_y_wavelengths * lambda,
                section.beta_x_deg.to_radians(),
                section.beta_y_deg.to_radians(),
            )?,
            misalignment: MisalignmentStats::new(
                section.mu_x_deg.to_radians(),
                section.mu_y_deg.to_radians(),
                section.sigma_x_deg.to_radians(),
                section.sigma_y_deg.to_radians(),
            )?,
        })
    }

    pub fn hops(&self) -> crate::Result<RelayHops> {
        let carrier = self.carrier()?;
        let atmosphere = self.atmosphere()?;
        let absorption = match self.atmosphere.absorption {
            AbsorptionKind::None => AbsorptionModel::FreeSpace,
            AbsorptionKind::Horizontal => AbsorptionModel::Horizontal,
            AbsorptionKind::Slant => AbsorptionModel::Slant,
        };
        let hop = |side, tx_power_w, ground: &ArraySection, uav: &ArraySection| -> crate::Result<HopConfig> {
            Ok(HopConfig {
                side,
                tx_power_w,
                noise_power_w: self.noise_power_w(),
                ground: self.terminal(ground, &carrier)?,
                uav: self.terminal(uav, &carrier)?,
                element: self.element(),
                carrier,
                atmosphere,
                absorption,
            })
        };
        Ok(RelayHops {
            cu: hop(HopSide::Cu, self.link.p_t_s_w, &self.arrays.s, &self.arrays.us)?,
            ur: hop(HopSide::Ur, self.link.p_t_d_w, &self.arrays.d, &self.arrays.ud)?,
        })
    }

    pub fn mc(&self) -> McSettings {
        McSettings {
            samples: self.montecarlo.samples,
            seed: self.montecarlo.seed,
            truncation: if self.montecarlo.strict_truncation {
                Truncation::Strict
            } else {
                Truncation::Symmetric
            },
            unit: self.link.capacity_unit,
        }
    }

    pub fn length_bounds(&self) -> LengthBounds {
        LengthBounds {
            min_m: self.montecarlo.length_min_m,
            max_m: self.montecarlo.length_max_m,
        }
    }

    pub fn optimizer_options(&self) -> OptimizerOptions {
        OptimizerOptions {
            gamma_th: self.gamma_th(),
            p_out_target: self.link.p_out_target,
            path_points: self.montecarlo.path_points,
            mc: self.mc(),
            bounds: self.length_bounds(),
            prune_axis_order: self.optimizer.prune_axis_order,
        }
    }

    pub fn design_space(&self) -> DesignSpace {
        let o = &self.optimizer;
        DesignSpace {
            n_sx: o.n_sx.clone(),
            n_sy: o.n_sy.clone(),
            n_dx: o.n_dx.clone(),
            n_dy: o.n_dy.clone(),
            n_usx: o.n_usx.clone(),
            n_usy: o.n_usy.clone(),
            n_udx: o.n_udx.clone(),
            n_udy: o.n_udy.clone(),
            h_u_m: o.h_u_m.clone(),
            l_sc_m: o.l_sc_m.clone(),
            n_max: o.n_max,
            tie_hops: o.tie_hops,
        }
    }

    /// Placement grid of the `L_s` sweep and the outage map.
    pub fn l_sc_grid(&self) -> Vec<f64> {
        let s = &self.sweep;
        uniform_grid(s.l_sc_min_m, s.l_sc_max_m, s.l_sc_step_m)
    }

    pub fn frequency_grid(&self) -> Vec<f64> {
        let s = &self.sweep;
        uniform_grid(s.atmos_f_min_ghz, s.atmos_f_max_ghz, s.atmos_f_step_ghz)
    }
}

/// `min, min + step, ...` up to `max` inclusive (within half a step).
pub fn uniform_grid(min: f64, max: f64, step: f64) -> Vec<f64> {
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| min + step * i as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_reference_defaults() {
        let cfg = load_config_str("").unwrap();
        assert_eq!(cfg, ScenarioConfig::default());
        assert_eq!(cfg.carrier.f_c_ghz, 70.0);
        assert_eq!(cfg.link.p_t_s_w, 1.0);
        assert_eq!(cfg.link.p_t_d_w, 0.2);
        assert_eq!(cfg.link.p_out_target, 1e-3);
        assert_eq!(cfg.geometry.l_u1_m, 3500.0);
        assert_eq!(cfg.geometry.l_sd_m, 19_000.0);
        assert_eq!(cfg.geometry.psi_s_min_deg, 10.0);
        assert_eq!(cfg.geometry.psi_d_min_deg, 15.0);
        assert_eq!(cfg.atmosphere.rho0_g_per_m3, 7.5);
        assert_eq!(cfg.atmosphere.h_scale_km, 1.5);
        for a in [&cfg.arrays.s, &cfg.arrays.d] {
            assert_eq!((a.mu_x_deg, a.sigma_x_deg, a.mu_y_deg, a.sigma_y_deg), (0.3, 0.5, 0.3, 0.5));
            assert_eq!((a.spacing_x_wavelengths, a.beta_x_deg), (0.5, 0.0));
        }
        for a in [&cfg.arrays.us, &cfg.arrays.ud] {
            assert_eq!((a.mu_x_deg, a.sigma_x_deg, a.mu_y_deg, a.sigma_y_deg), (1.7, 1.5, 1.0, 0.5));
        }
        assert_eq!(cfg.optimizer.n_usx, vec![6, 8, 10, 12, 14, 16, 18]);
        assert_eq!(cfg.optimizer.n_max, 18);
    }

    #[test]
    fn negative_sigma_is_rejected_with_line() {
        let src = "[arrays.us]\nn_x = 12\nsigma_x_deg = -1\n";
        let err = load_config_str(src).unwrap_err();
        assert_eq!(err.key.as_deref(), Some("arrays.us.sigma_x_deg"));
        assert_eq!(err.line, Some(3));
        assert!(err.expected.contains("degrees"));
    }

    #[test]
    fn out_of_model_frequency_is_rejected() {
        let err = load_config_str("[carrier]\nf_c_ghz = 400\n").unwrap_err();
        assert_eq!(err.key.as_deref(), Some("carrier.f_c_ghz"));
        assert!(err.expected.contains("350"), "{err}");
        assert_eq!(err.line, Some(2));
    }

    #[test]
    fn unknown_key_is_rejected() {
        let err = load_config_str("[geometry]\nl_sd_m = 19000\nl_sd_km = 19\n").unwrap_err();
        assert_eq!(err.key.as_deref(), Some("l_sd_km"));
        assert_eq!(err.line, Some(3));
    }

    #[test]
    fn wrong_type_names_key_and_line() {
        let err = load_config_str("[montecarlo]\n\nsamples = \"many\"\n").unwrap_err();
        assert_eq!(err.key.as_deref(), Some("samples"));
        assert_eq!(err.line, Some(3));
    }

    #[test]
    fn round_trip() {
        let mut cfg = ScenarioConfig::default();
        cfg.link.noise_power_w = Some(2.5e-11);
        cfg.montecarlo.seed = 99;
        cfg.optimizer.l_sc_m = vec![9000.0, 9500.5];
        assert_eq!(load_config_str(&save_config(&cfg)).unwrap(), cfg);
        assert_eq!(load_config_str(&save_config(&ScenarioConfig::default())).unwrap(), ScenarioConfig::default());
    }

    #[test]
    fn hash_tracks_content() {
        let a = ScenarioConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.montecarlo.seed += 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 16);
    }

    #[test]
    fn model_objects_are_in_si_units() {
        let cfg = ScenarioConfig::default();
        let hops = cfg.hops().unwrap();
        assert!((hops.cu.uav.misalignment.sigma_x - 1.5f64.to_radians()).abs() < 1e-15);
        assert!((hops.cu.ground.array.d_x - cfg.carrier().unwrap().half_wavelength_m()).abs() < 1e-15);
        assert_eq!(hops.ur.tx_power_w, 0.2);
        assert!((10.0 * cfg.noise_power_w().log10() + 30.0 + 74.0).abs() < 1e-9);
        assert_eq!(cfg.frequency_grid().len(), 100);
        assert_eq!(uniform_grid(0.0, 1.0, 0.25), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
