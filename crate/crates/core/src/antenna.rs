//! Uniform rectangular arrays under pointing error.
//!
//! An antenna's gain towards its peer is the broadside array gain `N_x·N_y`
//! times the single-element pattern times the squared per-axis array
//! factors, all evaluated at the realised misalignment.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Single-element radiation pattern (3GPP-style parabolic cuts with a floor).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElementPattern {
    pub g_max_dbi: f64,
    /// Vertical half-power beamwidth (rad).
    pub theta_3db: f64,
    /// Horizontal half-power beamwidth (rad).
    pub phi_3db: f64,
    /// Front-to-back floor (dB).
    pub a_m_db: f64,
    /// Vertical side-lobe limit (dB).
    pub sla_db: f64,
}

impl Default for ElementPattern {
    fn default() -> Self {
        Self {
            g_max_dbi: 8.0,
            theta_3db: 65f64.to_radians(),
            phi_3db: 65f64.to_radians(),
            a_m_db: 30.0,
            sla_db: 30.0,
        }
    }
}

impl ElementPattern {
    /// Element gain in dBi.
    ///
    /// The horizontal cut takes the offset projected on the x plane
    /// (`φ = 0`), the vertical cut the projection on the y plane.
    pub fn gain_db(&self, p: &PointingSample) -> f64 {
        let t = p.theta_xy.tan();
        let horizontal = (t * p.phi.cos()).atan();
        let vertical = (t * p.phi.sin()).atan();
        let a_v = (12.0 * (vertical / self.theta_3db).powi(2)).min(self.sla_db);
        let a_h = (12.0 * (horizontal / self.phi_3db).powi(2)).min(self.a_m_db);
        self.g_max_dbi - (a_v + a_h).min(self.a_m_db)
    }

    /// Element gain as a linear power ratio.
    pub fn gain(&self, p: &PointingSample) -> f64 {
        10f64.powf(self.gain_db(p) / 10.0)
    }
}

/// Element counts, spacings (m) and progressive phases (rad) of a URA.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayConfig {
    pub n_x: u32,
    pub n_y: u32,
    pub d_x: f64,
    pub d_y: f64,
    pub beta_x: f64,
    pub beta_y: f64,
}

impl ArrayConfig {
    pub fn new(n_x: u32, n_y: u32, d_x: f64, d_y: f64, beta_x: f64, beta_y: f64) -> Result<Self> {
        let cfg = Self {
            n_x,
            n_y,
            d_x,
            d_y,
            beta_x,
            beta_y,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Unsteered array with `spacing` between elements on both axes.
    pub fn uniform(n_x: u32, n_y: u32, spacing: f64) -> Result<Self> {
        Self::new(n_x, n_y, spacing, spacing, 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_x < 1 {
            return Err(Error::domain("N_x", self.n_x as f64, "[1, inf)"));
        }
        if self.n_y < 1 {
            return Err(Error::domain("N_y", self.n_y as f64, "[1, inf)"));
        }
        if !(self.d_x > 0.0) {
            return Err(Error::domain("d_x", self.d_x, "(0, inf) m"));
        }
        if !(self.d_y > 0.0) {
            return Err(Error::domain("d_y", self.d_y, "(0, inf) m"));
        }
        Ok(())
    }

    pub fn with_counts(self, n_x: u32, n_y: u32) -> Self {
        Self { n_x, n_y, ..self }
    }

    /// Broadside array gain `G_0 = N_x·N_y`.
    pub fn broadside_gain(&self) -> f64 {
        self.n_x as f64 * self.n_y as f64
    }

    pub fn elements(&self) -> u32 {
        self.n_x * self.n_y
    }
}

/// Gaussian pointing-error statistics per axis (rad).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MisalignmentStats {
    pub mu_x: f64,
    pub mu_y: f64,
    pub sigma_x: f64,
    pub sigma_y: f64,
}

impl MisalignmentStats {
    pub fn new(mu_x: f64, mu_y: f64, sigma_x: f64, sigma_y: f64) -> Result<Self> {
        let stats = Self {
            mu_x,
            mu_y,
            sigma_x,
            sigma_y,
        };
        stats.validate()?;
        Ok(stats)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_x > 0.0) {
            return Err(Error::domain("sigma_x", self.sigma_x, "(0, inf) rad"));
        }
        if !(self.sigma_y > 0.0) {
            return Err(Error::domain("sigma_y", self.sigma_y, "(0, inf) rad"));
        }
        if !(self.mu_x.abs() < FRAC_PI_2 && self.mu_y.abs() < FRAC_PI_2) {
            return Err(Error::domain("mu", self.mu_x.abs().max(self.mu_y.abs()), "(-pi/2, pi/2) rad"));
        }
        Ok(())
    }
}

/// A realised misalignment: per-axis tilts plus their polar composition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointingSample {
    pub theta_x: f64,
    pub theta_y: f64,
    /// Angle between boresight and the peer direction.
    pub theta_xy: f64,
    /// Azimuth of the offset, measured from the x axis.
    pub phi: f64,
}

impl PointingSample {
    pub const BORESIGHT: PointingSample = PointingSample {
        theta_x: 0.0,
        theta_y: 0.0,
        theta_xy: 0.0,
        phi: 0.0,
    };

    /// Direction sines `(sin θ_xy cos φ, sin θ_xy sin φ)` seen by the x and y array axes.
    pub fn direction_sines(&self) -> (f64, f64) {
        let s = self.theta_xy.sin();
        let (sin_phi, cos_phi) = self.phi.sin_cos();
        (s * cos_phi, s * sin_phi)
    }
}

/// Compose per-axis misalignments into a [`PointingSample`].
pub fn pointing_from_axes(theta_x: f64, theta_y: f64) -> Result<PointingSample> {
    if !(theta_x.abs() < FRAC_PI_2) {
        return Err(Error::domain("theta_x", theta_x, "(-pi/2, pi/2) rad"));
    }
    if !(theta_y.abs() < FRAC_PI_2) {
        return Err(Error::domain("theta_y", theta_y, "(-pi/2, pi/2) rad"));
    }
    let (tx, ty) = (theta_x.tan(), theta_y.tan());
    Ok(PointingSample {
        theta_x,
        theta_y,
        theta_xy: tx.hypot(ty).atan(),
        phi: ty.atan2(tx),
    })
}

/// Normalised Dirichlet kernel `sin(N u/2) / (N sin(u/2))` with
/// `u = k·d·direction_sine + beta`.
///
/// At the grating points `u = 2πm` the exact limit `(−1)^{m(N−1)}` is returned.
pub fn array_factor_axis(n: u32, d: f64, k: f64, beta: f64, direction_sine: f64) -> f64 {
    if n <= 1 {
        return 1.0;
    }
    let u = k * d * direction_sine + beta;
    let half = 0.5 * u;
    let denom = half.sin();
    if denom.abs() < 1e-12 {
        let m = (u / (2.0 * PI)).round() as i64;
        return if (m * (n as i64 - 1)).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    }
    let nf = n as f64;
    (nf * half).sin() / (nf * denom)
}

/// Linear power gain of an array with element pattern `element` at pointing `p`.
pub fn composite_gain(cfg: &ArrayConfig, element: &ElementPattern, k: f64, p: &PointingSample) -> f64 {
    let (sx, sy) = p.direction_sines();
    let af_x = array_factor_axis(cfg.n_x, cfg.d_x, k, cfg.beta_x, sx);
    let af_y = array_factor_axis(cfg.n_y, cfg.d_y, k, cfg.beta_y, sy);
    cfg.broadside_gain() * element.gain(p) * af_x * af_x * af_y * af_y
}

/// Array axis along which a pattern cut is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

fn axis_pointing(axis: Axis, angle: f64) -> PointingSample {
    match axis {
        Axis::X => pointing_from_axes(angle, 0.0),
        Axis::Y => pointing_from_axes(0.0, angle),
    }
    .expect("cut angle inside (-pi/2, pi/2)")
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let f_lo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

const CUT_STEP: f64 = 1e-4;

/// Smallest positive tilt along `axis` at which the array factor vanishes,
/// located by scanning the signed factor for a sign change and bisecting.
/// `None` when the axis has a single element or no null lies below π/2.
pub fn first_null_offset(cfg: &ArrayConfig, k: f64, axis: Axis) -> Option<f64> {
    let (n, d, beta) = match axis {
        Axis::X => (cfg.n_x, cfg.d_x, cfg.beta_x),
        Axis::Y => (cfg.n_y, cfg.d_y, cfg.beta_y),
    };
    if n <= 1 {
        return None;
    }
    let af = |angle: f64| {
        let (sx, sy) = axis_pointing(axis, angle).direction_sines();
        let s = if axis == Axis::X { sx } else { sy };
        array_factor_axis(n, d, k, beta, s)
    };
    let mut prev = 0.0;
    let mut prev_val = af(0.0);
    let mut angle = CUT_STEP;
    while angle < FRAC_PI_2 - CUT_STEP {
        let val = af(angle);
        if val == 0.0 {
            return Some(angle);
        }
        if (val > 0.0) != (prev_val > 0.0) {
            return Some(bisect(prev, angle, af));
        }
        prev = angle;
        prev_val = val;
        angle += CUT_STEP;
    }
    None
}

/// Smallest positive tilt along `axis` at which the composite gain is 3 dB
/// below its boresight value.
pub fn half_power_offset(cfg: &ArrayConfig, element: &ElementPattern, k: f64, axis: Axis) -> Option<f64> {
    let peak = composite_gain(cfg, element, k, &PointingSample::BORESIGHT);
    let target = peak * 10f64.powf(-0.3);
    let excess = |angle: f64| composite_gain(cfg, element, k, &axis_pointing(axis, angle)) - target;
    let mut prev = 0.0;
    let mut angle = CUT_STEP;
    while angle < FRAC_PI_2 - CUT_STEP {
        if excess(angle) <= 0.0 {
            return Some(bisect(prev, angle, excess));
        }
        prev = angle;
        angle += CUT_STEP;
    }
    None
}
