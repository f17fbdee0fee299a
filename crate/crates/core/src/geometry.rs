//! Circular flight path between the CN and RA terminals.
//!
//! Horizontal coordinates put the circle centre `B_p` at the origin with the
//! x axis along the CN–RA line; the CN sits at `x = -L_sc` and the RA at
//! `x = L_dc`. Only the semicircle `θ ∈ [0, π]` is modelled, the other half
//! mirrors it.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Placement of the circular orbit relative to the two terminals. Lengths in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathGeometry {
    /// Horizontal CN–RA distance.
    pub l_sd: f64,
    /// Orbit diameter.
    pub l_u1: f64,
    /// Horizontal CN–centre distance.
    pub l_sc: f64,
    /// UAV altitude above the terminal plane.
    pub h_u: f64,
    /// Minimum elevation angle seen from the CN (rad).
    pub psi_s_min: f64,
    /// Minimum elevation angle seen from the RA (rad).
    pub psi_d_min: f64,
}

/// One sampled position on the orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathPoint {
    pub theta: f64,
    pub x_u: f64,
    pub y_u: f64,
    pub l_s: f64,
    pub l_d: f64,
    pub psi_s: f64,
    pub psi_d: f64,
}

impl PathGeometry {
    pub fn new(
        l_sd: f64,
        l_u1: f64,
        l_sc: f64,
        h_u: f64,
        psi_s_min: f64,
        psi_d_min: f64,
    ) -> Result<Self> {
        let geom = Self {
            l_sd,
            l_u1,
            l_sc,
            h_u,
            psi_s_min,
            psi_d_min,
        };
        geom.validate()?;
        Ok(geom)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l_sd > 0.0) {
            return Err(Error::domain("L_sd", self.l_sd, "(0, inf) m"));
        }
        if !(self.l_u1 > 0.0 && self.l_u1 < self.l_sd) {
            return Err(Error::domain("L_u1", self.l_u1, "(0, L_sd) m"));
        }
        if !(self.l_sc > 0.0 && self.l_sc < self.l_sd) {
            return Err(Error::domain("L_sc", self.l_sc, "(0, L_sd) m"));
        }
        if !(self.h_u > 0.0) {
            return Err(Error::domain("H_u", self.h_u, "(0, inf) m"));
        }
        check_elevation_limit("psi_s_min", self.psi_s_min)?;
        check_elevation_limit("psi_d_min", self.psi_d_min)?;
        Ok(())
    }

    /// Horizontal RA–centre distance, `L_sd − L_sc`.
    pub fn l_dc(&self) -> f64 {
        self.l_sd - self.l_sc
    }

    pub fn with_l_sc(self, l_sc: f64) -> Self {
        Self { l_sc, ..self }
    }

    pub fn with_h_u(self, h_u: f64) -> Self {
        Self { h_u, ..self }
    }

    /// Slant lengths `(L_s, L_d)` from each terminal to the UAV at path angle `theta`.
    pub fn link_lengths(&self, theta: f64) -> Result<(f64, f64)> {
        check_path_angle(theta)?;
        let r = 0.5 * self.l_u1;
        let (sin, cos) = theta.sin_cos();
        let lateral = r * r * sin * sin;
        let h2 = self.h_u * self.h_u;
        let l_s = ((self.l_sc + r * cos).powi(2) + lateral + h2).sqrt();
        let l_d = ((self.l_dc() - r * cos).powi(2) + lateral + h2).sqrt();
        Ok((l_s, l_d))
    }

    pub fn point(&self, theta: f64) -> Result<PathPoint> {
        let (x_u, y_u) = uav_position(theta, self.l_u1)?;
        let (l_s, l_d) = self.link_lengths(theta)?;
        Ok(PathPoint {
            theta,
            x_u,
            y_u,
            l_s,
            l_d,
            psi_s: elevation_angle(l_s, self.h_u)?,
            psi_d: elevation_angle(l_d, self.h_u)?,
        })
    }

    /// `m` points uniformly spaced over `[0, π]`, endpoints included.
    pub fn profile(&self, m: usize) -> Result<Vec<PathPoint>> {
        theta_grid(m)?.into_iter().map(|t| self.point(t)).collect()
    }

    /// Lowest altitude keeping both terminals above their minimum elevation.
    pub fn min_height(&self) -> Result<f64> {
        min_height(self.l_sc, self.l_dc(), self.l_u1, self.psi_s_min, self.psi_d_min)
    }

    /// Longest CN link over the orbit (at `B_p1`, `θ = 0`).
    pub fn max_path_l_s(&self) -> f64 {
        self.link_lengths(0.0).map(|l| l.0).unwrap_or(f64::NAN)
    }

    /// Longest RA link over the orbit (at `B_p2`, `θ = π`).
    pub fn max_path_l_d(&self) -> f64 {
        self.link_lengths(PI).map(|l| l.1).unwrap_or(f64::NAN)
    }
}

fn check_elevation_limit(name: &'static str, psi: f64) -> Result<()> {
    if (0.0..FRAC_PI_2).contains(&psi) {
        Ok(())
    } else {
        Err(Error::domain(name, psi, "[0, pi/2) rad"))
    }
}

fn check_path_angle(theta: f64) -> Result<()> {
    if (0.0..=PI).contains(&theta) {
        Ok(())
    } else {
        Err(Error::domain("theta_R1", theta, "[0, pi] rad"))
    }
}

/// Horizontal UAV position on the semicircle.
pub fn uav_position(theta: f64, l_u1: f64) -> Result<(f64, f64)> {
    check_path_angle(theta)?;
    let r = 0.5 * l_u1;
    let (sin, cos) = theta.sin_cos();
    Ok((r * cos, r * sin))
}

/// Elevation angle `asin(H_u / L)` of a link of slant length `l`.
pub fn elevation_angle(l: f64, h_u: f64) -> Result<f64> {
    if !(h_u > 0.0) {
        return Err(Error::domain("H_u", h_u, "(0, inf) m"));
    }
    if !(l >= h_u) {
        return Err(Error::domain("link length", l, "[H_u, inf) m"));
    }
    Ok((h_u / l).asin())
}

/// Minimum UAV altitude so that the farthest orbit point still clears both
/// elevation limits.
pub fn min_height(l_sc: f64, l_dc: f64, l_u1: f64, psi_s_min: f64, psi_d_min: f64) -> Result<f64> {
    check_elevation_limit("psi_s_min", psi_s_min)?;
    check_elevation_limit("psi_d_min", psi_d_min)?;
    if !(l_sc > 0.0) {
        return Err(Error::domain("L_sc", l_sc, "(0, inf) m"));
    }
    if !(l_dc > 0.0) {
        return Err(Error::domain("L_dc", l_dc, "(0, inf) m"));
    }
    let r = 0.5 * l_u1;
    Ok(((l_sc + r) * psi_s_min.sin()).max((l_dc + r) * psi_d_min.sin()))
}

/// `m ≥ 2` uniformly spaced path angles on `[0, π]`; the last one is exactly π.
pub fn theta_grid(m: usize) -> Result<Vec<f64>> {
    if m < 2 {
        return Err(Error::domain("path points", m as f64, "[2, inf)"));
    }
    let last = m - 1;
    Ok((0..m)
        .map(|i| if i == last { PI } else { PI * i as f64 / last as f64 })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn table2(h_u: f64) -> PathGeometry {
        PathGeometry::new(19_000.0, 3_500.0, 9_500.0, h_u, 10f64.to_radians(), 15f64.to_radians()).unwrap()
    }

    #[test]
    fn positions_on_circle() {
        assert_eq!(uav_position(0.0, 3500.0).unwrap(), (1750.0, 0.0));
        let (x, y) = uav_position(PI, 3500.0).unwrap();
        assert_eq!((x, y.abs() < 1e-9), (-1750.0, true));
        let (x, y) = uav_position(FRAC_PI_2, 3500.0).unwrap();
        assert!(x.abs() < 1e-9);
        assert_relative_eq!(y, 1750.0);
        assert!(uav_position(-0.1, 3500.0).is_err());
        assert!(uav_position(3.2, 3500.0).is_err());
    }

    #[test]
    fn link_lengths_at_endpoints_and_midpoint() {
        let g = table2(2000.0);
        let (ls, ld) = g.link_lengths(0.0).unwrap();
        assert_relative_eq!(ls, (11_250f64.powi(2) + 4e6).sqrt(), max_relative = 1e-15);
        assert_relative_eq!(ld, (7_750f64.powi(2) + 4e6).sqrt(), max_relative = 1e-15);
        let (ls, _) = g.link_lengths(PI).unwrap();
        assert_relative_eq!(ls, (7_750f64.powi(2) + 4e6).sqrt(), max_relative = 1e-12);
        let (ls, ld) = g.link_lengths(FRAC_PI_2).unwrap();
        assert_relative_eq!(ls, 9_864.709_828_474_43, max_relative = 1e-12);
        assert_relative_eq!(ls, ld, max_relative = 1e-12);
    }

    #[test]
    fn elevation_examples() {
        assert_relative_eq!(elevation_angle(10.0, 10.0).unwrap(), FRAC_PI_2);
        assert_relative_eq!(elevation_angle(10.0, 5.0).unwrap(), PI / 6.0, epsilon = 1e-15);
        assert!((elevation_angle(9863.1, 2000.0).unwrap() - 0.2042).abs() < 1e-4);
        assert!(elevation_angle(5.0, 10.0).is_err());
    }

    #[test]
    fn min_height_examples() {
        assert_eq!(min_height(9500.0, 9500.0, 3500.0, 0.0, 0.0).unwrap(), 0.0);
        let a = min_height(9500.0, 9500.0, 3500.0, 0.2, 0.2).unwrap();
        assert_relative_eq!(a, 11_250.0 * 0.2f64.sin());
        let g = table2(3000.0);
        assert_relative_eq!(g.min_height().unwrap(), 2_911.714_257_403_358_3, epsilon = 1e-9);
        assert!(min_height(9500.0, 9500.0, 3500.0, FRAC_PI_2, 0.1).is_err());
    }

    #[test]
    fn min_height_meets_one_constraint_with_equality() {
        let g = table2(3000.0).with_l_sc(12_000.0);
        let h = g.min_height().unwrap();
        let s = (g.l_sc + 1750.0) * g.psi_s_min.sin();
        let d = (g.l_dc() + 1750.0) * g.psi_d_min.sin();
        assert!(h >= s && h >= d);
        assert!(h == s || h == d);
    }

    #[test]
    fn profile_grid() {
        let g = table2(3000.0);
        assert!(g.profile(1).is_err());
        let two = g.profile(2).unwrap();
        assert_eq!(two[0].theta, 0.0);
        assert_eq!(two[1].theta, PI);
        let fine = g.profile(181).unwrap();
        assert_relative_eq!(fine[1].theta - fine[0].theta, PI / 180.0, max_relative = 1e-12);
        let (lo, hi) = (g.link_lengths(PI).unwrap().0, g.link_lengths(0.0).unwrap().0);
        assert!(fine.iter().all(|p| p.l_s >= lo - 1e-9 && p.l_s <= hi + 1e-9));
        assert!(fine.iter().all(|p| p.l_s > g.h_u && p.l_d > g.h_u));
    }

    #[test]
    fn validation() {
        assert!(PathGeometry::new(19e3, 20e3, 9.5e3, 3e3, 0.1, 0.1).is_err());
        assert!(PathGeometry::new(19e3, 3.5e3, 19e3, 3e3, 0.1, 0.1).is_err());
        assert!(PathGeometry::new(19e3, 3.5e3, 9.5e3, 0.0, 0.1, 0.1).is_err());
        assert!(PathGeometry::new(19e3, 3.5e3, 9.5e3, 3e3, 1.6, 0.1).is_err());
    }

    proptest! {
        #[test]
        fn reciprocity(theta in 0.0..PI, l_sc in 2_000.0..17_000.0f64, h in 500.0..5_000.0f64) {
            let g = table2(h).with_l_sc(l_sc);
            let mirrored = g.with_l_sc(g.l_dc());
            let (ls, _) = g.link_lengths(theta).unwrap();
            let (_, ld_m) = mirrored.link_lengths(PI - theta).unwrap();
            prop_assert!((ls - ld_m).abs() <= 1e-9 * ls);
        }

        #[test]
        fn monotone_along_path(t1 in 0.001..3.1f64, dt in 1e-3..0.5f64, l_sc in 2_000.0..17_000.0f64) {
            let g = table2(3000.0).with_l_sc(l_sc);
            let t2 = (t1 + dt).min(PI - 1e-6);
            prop_assume!(t2 > t1 && l_sc > 1750.0 && g.l_dc() > 1750.0);
            let (ls1, ld1) = g.link_lengths(t1).unwrap();
            let (ls2, ld2) = g.link_lengths(t2).unwrap();
            prop_assert!(ls2 < ls1);
            prop_assert!(ld2 > ld1);
        }
    }
}
