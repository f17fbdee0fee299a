//! Monte Carlo estimators over the pointing-error distribution.
//!
//! Randomness is counter based: sample `i` of a hop is drawn from the ChaCha
//! stream selected by `(seed, hop side, i / BATCH_SIZE)`. Work is split on
//! the same batch boundaries and partial sums are combined in batch order,
//! so every estimate is bit-identical for any thread count, and the first
//! `n` samples of a larger run are the samples of an `n`-sample run.
//!
//! Antenna gains depend only on the pointing realisation, never on where
//! the UAV is, so each hop's gain samples are drawn once into a
//! [`HopEnsemble`] and reused for every link length. This is the common
//! random numbers scheme used across path points and design candidates.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::antenna::{pointing_from_axes, MisalignmentStats, PointingSample};
use crate::error::{Error, Result};
use crate::geometry::{elevation_angle, PathGeometry, PathPoint};
use crate::link::{CapacityUnit, HopConfig, HopSide};

/// Samples per random stream and per unit of parallel work.
pub const BATCH_SIZE: usize = 4096;

/// Smallest accepted sample count.
pub const MIN_SAMPLES: usize = 100;

/// Region a misalignment draw must fall in; draws outside are redrawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    /// `|θ| < π/2`, i.e. the full Gaussian minus the tangent singularity.
    #[default]
    Symmetric,
    /// `0 ≤ θ < π/2`, the integration limits written for the conditional capacity.
    Strict,
}

impl Truncation {
    fn accepts(self, theta: f64) -> bool {
        match self {
            Truncation::Symmetric => theta.abs() < FRAC_PI_2,
            Truncation::Strict => (0.0..FRAC_PI_2).contains(&theta),
        }
    }
}

/// Sample count, seed and estimator options shared by all estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSettings {
    pub samples: usize,
    pub seed: u64,
    pub truncation: Truncation,
    pub unit: CapacityUnit,
}

impl McSettings {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            seed,
            truncation: Truncation::Symmetric,
            unit: CapacityUnit::Bits,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < MIN_SAMPLES {
            return Err(Error::domain("samples", self.samples as f64, "[100, inf)"));
        }
        Ok(())
    }
}

/// Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorResult {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub seed: u64,
}

/// Fraction of realisations whose SNR fell below `gamma_th`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutageEstimate {
    pub probability: f64,
    pub n_samples: usize,
    pub n_failures: usize,
    pub seed: u64,
    pub gamma_th: f64,
}

impl OutageEstimate {
    fn new(n_failures: usize, n_samples: usize, seed: u64, gamma_th: f64) -> Self {
        Self {
            probability: n_failures as f64 / n_samples as f64,
            n_samples,
            n_failures,
            seed,
            gamma_th,
        }
    }

    /// Binomial standard error `sqrt(p(1−p)/n)`.
    pub fn std_error(&self) -> f64 {
        let p = self.probability;
        (p * (1.0 - p) / self.n_samples as f64).sqrt()
    }
}

/// Shifted first and second moments; shifting by a common offset keeps the
/// variance well conditioned when the spread is small next to the mean.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: usize,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    #[inline]
    fn push(&mut self, deviation: f64) {
        self.n += 1;
        self.sum += deviation;
        self.sum_sq += deviation * deviation;
    }

    fn merge(mut self, other: Moments) -> Moments {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self
    }

    fn finish(self, shift: f64, seed: u64) -> EstimatorResult {
        let n = self.n as f64;
        let mean_dev = self.sum / n;
        let var = if self.n > 1 {
            ((self.sum_sq - self.sum * mean_dev) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        EstimatorResult {
            mean: shift + mean_dev,
            std_error: (var / n).sqrt(),
            n_samples: self.n,
            seed,
        }
    }
}

/// Draw one misalignment realisation.
pub fn sample_misalignment<R: Rng + ?Sized>(
    stats: &MisalignmentStats,
    truncation: Truncation,
    rng: &mut R,
) -> PointingSample {
    let theta_x = draw_axis(stats.mu_x, stats.sigma_x, truncation, rng);
    let theta_y = draw_axis(stats.mu_y, stats.sigma_y, truncation, rng);
    pointing_from_axes(theta_x, theta_y).expect("truncation keeps draws inside (-pi/2, pi/2)")
}

const MAX_REDRAWS: usize = 1 << 16;

fn draw_axis<R: Rng + ?Sized>(mu: f64, sigma: f64, truncation: Truncation, rng: &mut R) -> f64 {
    for _ in 0..MAX_REDRAWS {
        let z: f64 = rng.sample(StandardNormal);
        let theta = mu + sigma * z;
        if truncation.accepts(theta) {
            return theta;
        }
    }
    // Acceptance region carries essentially no mass; pin to its nearest edge.
    match truncation {
        Truncation::Symmetric => mu.clamp(-FRAC_PI_2 + 1e-9, FRAC_PI_2 - 1e-9),
        Truncation::Strict => mu.clamp(0.0, FRAC_PI_2 - 1e-9),
    }
}

fn stream_rng(seed: u64, side: HopSide, batch: usize) -> ChaCha8Rng {
    let tag: u64 = match side {
        HopSide::Cu => 1,
        HopSide::Ur => 2,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((tag << 48) | batch as u64);
    rng
}

/// Per-sample antenna gain products `G_ground·G_uav` for one hop.
#[derive(Debug, Clone)]
pub struct HopEnsemble {
    side: HopSide,
    seed: u64,
    gains: Vec<f64>,
}

impl HopEnsemble {
    pub fn draw(hop: &HopConfig, mc: &McSettings) -> Result<Self> {
        hop.validate()?;
        mc.validate()?;
        let mut gains = vec![0.0; mc.samples];
        gains
            .par_chunks_mut(BATCH_SIZE)
            .enumerate()
            .for_each(|(batch, chunk)| {
                let mut rng = stream_rng(mc.seed, hop.side, batch);
                for g in chunk.iter_mut() {
                    let ground = sample_misalignment(&hop.ground.misalignment, mc.truncation, &mut rng);
                    let uav = sample_misalignment(&hop.uav.misalignment, mc.truncation, &mut rng);
                    *g = hop.antenna_gain(&ground, &uav);
                }
            });
        Ok(Self {
            side: hop.side,
            seed: mc.seed,
            gains,
        })
    }

    pub fn side(&self) -> HopSide {
        self.side
    }

    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    /// Mean capacity for unit-gain SNR `snr_scale`.
    pub fn capacity(&self, snr_scale: f64, unit: CapacityUnit) -> EstimatorResult {
        let shift = unit.capacity(snr_scale * self.gains[0]);
        self.gains
            .par_chunks(BATCH_SIZE)
            .map(|chunk| {
                let mut m = Moments::default();
                for &g in chunk {
                    m.push(unit.capacity(snr_scale * g) - shift);
                }
                m
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold(Moments::default(), Moments::merge)
            .finish(shift, self.seed)
    }

    /// Outage probability `P{snr_scale·G < gamma_th}`.
    pub fn outage(&self, snr_scale: f64, gamma_th: f64) -> OutageEstimate {
        let cut = gamma_th / snr_scale;
        let failures = self.gains.iter().filter(|&&g| g < cut).count();
        OutageEstimate::new(failures, self.len(), self.seed, gamma_th)
    }

    /// Gains sorted ascending, for repeated outage queries.
    pub fn sorted_gains(&self) -> SortedGains {
        let mut sorted = self.gains.clone();
        sorted.sort_by(f64::total_cmp);
        SortedGains {
            sorted,
            seed: self.seed,
        }
    }
}

/// Empirical gain distribution supporting `O(log n)` outage queries.
#[derive(Debug, Clone)]
pub struct SortedGains {
    sorted: Vec<f64>,
    seed: u64,
}

impl SortedGains {
    pub fn outage(&self, snr_scale: f64, gamma_th: f64) -> OutageEstimate {
        let cut = gamma_th / snr_scale;
        let failures = self.sorted.partition_point(|&g| g < cut);
        OutageEstimate::new(failures, self.sorted.len(), self.seed, gamma_th)
    }
}

/// The two hops of the relay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelayHops {
    pub cu: HopConfig,
    pub ur: HopConfig,
}

/// Gain ensembles for both hops, drawn from independent streams.
#[derive(Debug, Clone)]
pub struct RelayEnsemble {
    pub cu: HopEnsemble,
    pub ur: HopEnsemble,
    unit: CapacityUnit,
}

/// Per-point and path-averaged capacities along the orbit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathCapacity {
    pub points: Vec<PathPoint>,
    /// Trapezoid weights normalised to sum to one.
    pub weights: Vec<f64>,
    pub c_su: Vec<EstimatorResult>,
    pub c_du: Vec<EstimatorResult>,
    /// Path average of `min(C_su(θ), C_du(θ))`, the objective.
    pub e2e: EstimatorResult,
    /// Path average of the per-realisation minimum; never above `e2e`.
    pub avg_of_min: EstimatorResult,
    pub su_average: EstimatorResult,
    pub du_average: EstimatorResult,
}

impl PathCapacity {
    /// `min(C_su, C_du)` at each path point, carrying the weaker hop's error.
    pub fn e2e_curve(&self) -> Vec<EstimatorResult> {
        self.c_su
            .iter()
            .zip(&self.c_du)
            .map(|(s, d)| if s.mean <= d.mean { *s } else { *d })
            .collect()
    }
}

/// Outage at both ends of the orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EndpointOutage {
    /// `θ = 0`, where the CN link is longest.
    pub at_bp1: OutageEstimate,
    /// `θ = π`, where the RA link is longest.
    pub at_bp2: OutageEstimate,
}

impl EndpointOutage {
    pub fn worst(&self) -> OutageEstimate {
        if self.at_bp2.probability > self.at_bp1.probability {
            self.at_bp2
        } else {
            self.at_bp1
        }
    }
}

/// Trapezoid weights on `m` uniform nodes, normalised to sum to one.
pub fn trapezoid_weights(m: usize) -> Vec<f64> {
    let inner = 1.0 / (m - 1) as f64;
    (0..m)
        .map(|i| if i == 0 || i == m - 1 { 0.5 * inner } else { inner })
        .collect()
}

impl RelayEnsemble {
    pub fn draw(hops: &RelayHops, mc: &McSettings) -> Result<Self> {
        Ok(Self {
            cu: HopEnsemble::draw(&hops.cu, mc)?,
            ur: HopEnsemble::draw(&hops.ur, mc)?,
            unit: mc.unit,
        })
    }

    pub fn unit(&self) -> CapacityUnit {
        self.unit
    }

    /// Conditional end-to-end outage for fixed link lengths and elevations.
    pub fn conditional_outage(
        &self,
        hops: &RelayHops,
        l_s: f64,
        l_d: f64,
        psi_s: f64,
        psi_d: f64,
        gamma_th: f64,
    ) -> Result<OutageEstimate> {
        let cut_s = gamma_th / hops.cu.snr_scale(l_s, psi_s)?;
        let cut_d = gamma_th / hops.ur.snr_scale(l_d, psi_d)?;
        let failures = self
            .cu
            .gains
            .iter()
            .zip(&self.ur.gains)
            .filter(|(&gs, &gd)| gs < cut_s || gd < cut_d)
            .count();
        Ok(OutageEstimate::new(failures, self.cu.len(), self.cu.seed, gamma_th))
    }

    pub fn outage_at(&self, hops: &RelayHops, point: &PathPoint, gamma_th: f64) -> Result<OutageEstimate> {
        self.conditional_outage(hops, point.l_s, point.l_d, point.psi_s, point.psi_d, gamma_th)
    }

    /// Outage at the two orbit extremes, where each hop is longest.
    pub fn endpoint_outage(&self, geom: &PathGeometry, hops: &RelayHops, gamma_th: f64) -> Result<EndpointOutage> {
        let bp1 = geom.point(0.0)?;
        let bp2 = geom.point(std::f64::consts::PI)?;
        Ok(EndpointOutage {
            at_bp1: self.outage_at(hops, &bp1, gamma_th)?,
            at_bp2: self.outage_at(hops, &bp2, gamma_th)?,
        })
    }

    /// Conditional capacities of both hops at one position.
    pub fn point_capacity(
        &self,
        hops: &RelayHops,
        l_s: f64,
        l_d: f64,
        psi_s: f64,
        psi_d: f64,
    ) -> Result<(EstimatorResult, EstimatorResult)> {
        let a_s = hops.cu.snr_scale(l_s, psi_s)?;
        let a_d = hops.ur.snr_scale(l_d, psi_d)?;
        Ok((self.cu.capacity(a_s, self.unit), self.ur.capacity(a_d, self.unit)))
    }

    /// Path-averaged capacity over `m` uniformly spaced orbit angles.
    pub fn path_capacity(&self, geom: &PathGeometry, hops: &RelayHops, m: usize) -> Result<PathCapacity> {
        let points = geom.profile(m)?;
        let weights = trapezoid_weights(m);
        let scales = points
            .iter()
            .map(|p| Ok((hops.cu.snr_scale(p.l_s, p.psi_s)?, hops.ur.snr_scale(p.l_d, p.psi_d)?)))
            .collect::<Result<Vec<_>>>()?;
        let unit = self.unit;
        let seed = self.cu.seed;

        // Per-point conditional capacities.
        let per_point: Vec<(EstimatorResult, EstimatorResult)> = scales
            .par_iter()
            .map(|&(a_s, a_d)| (self.cu.capacity(a_s, unit), self.ur.capacity(a_d, unit)))
            .collect();
        let (c_su, c_du): (Vec<_>, Vec<_>) = per_point.into_iter().unzip();
        let cu_active: Vec<bool> = c_su.iter().zip(&c_du).map(|(s, d)| s.mean <= d.mean).collect();
        let objective: f64 = c_su
            .iter()
            .zip(&c_du)
            .zip(&weights)
            .map(|((s, d), w)| w * s.mean.min(d.mean))
            .sum();

        // Per-realisation path averages give the standard errors.
        let shift_e2e = objective;
        let partial: Vec<[Moments; 4]> = self
            .cu
            .gains
            .par_chunks(BATCH_SIZE)
            .zip(self.ur.gains.par_chunks(BATCH_SIZE))
            .map(|(gs_chunk, gd_chunk)| {
                let mut acc = [Moments::default(); 4];
                for (&gs, &gd) in gs_chunk.iter().zip(gd_chunk) {
                    let (mut y, mut z, mut su, mut du) = (0.0, 0.0, 0.0, 0.0);
                    for ((&(a_s, a_d), &w), &active) in scales.iter().zip(&weights).zip(&cu_active) {
                        let cs = unit.capacity(a_s * gs);
                        let cd = unit.capacity(a_d * gd);
                        y += w * if active { cs } else { cd };
                        z += w * cs.min(cd);
                        su += w * cs;
                        du += w * cd;
                    }
                    acc[0].push(y - shift_e2e);
                    acc[1].push(z - shift_e2e);
                    acc[2].push(su - shift_e2e);
                    acc[3].push(du - shift_e2e);
                }
                acc
            })
            .collect();
        let totals = partial.into_iter().fold([Moments::default(); 4], |mut t, p| {
            for (a, b) in t.iter_mut().zip(p) {
                *a = a.merge(b);
            }
            t
        });
        let mut e2e = totals[0].finish(shift_e2e, seed);
        // Same quantity as the running sum; keep the deterministic weighted form.
        e2e.mean = objective;
        Ok(PathCapacity {
            points,
            weights,
            c_su,
            c_du,
            e2e,
            avg_of_min: totals[1].finish(shift_e2e, seed),
            su_average: totals[2].finish(shift_e2e, seed),
            du_average: totals[3].finish(shift_e2e, seed),
        })
    }
}

/// How a hop's elevation angle follows its length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ElevationModel {
    /// UAV at a fixed altitude (m): `ψ = asin(H_u / L)`.
    FixedAltitude(f64),
    /// Fixed elevation angle (rad).
    FixedAngle(f64),
}

impl ElevationModel {
    fn psi(&self, l: f64) -> Result<f64> {
        match *self {
            ElevationModel::FixedAltitude(h_u) => elevation_angle(l, h_u),
            ElevationModel::FixedAngle(psi) => Ok(psi),
        }
    }

    fn min_length(&self) -> f64 {
        match *self {
            ElevationModel::FixedAltitude(h_u) => h_u,
            ElevationModel::FixedAngle(_) => 0.0,
        }
    }
}

/// Search interval for maximum link lengths (m).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthBounds {
    pub min_m: f64,
    pub max_m: f64,
}

impl Default for LengthBounds {
    fn default() -> Self {
        Self {
            min_m: 100.0,
            max_m: 200_000.0,
        }
    }
}

/// Relative tolerance of the maximum-length bisection.
pub const LENGTH_TOLERANCE: f64 = 1e-3;

/// Longest link keeping single-hop outage below `p_target`, by bisection on
/// the empirical outage of a fixed gain ensemble.
///
/// Returns the upper bound directly when `p_target ≥ 1`.
pub fn max_link_length_from(
    hop: &HopConfig,
    gains: &SortedGains,
    gamma_th: f64,
    p_target: f64,
    elevation: ElevationModel,
    bounds: LengthBounds,
) -> Result<f64> {
    let mut lo = bounds.min_m.max(elevation.min_length());
    let mut hi = bounds.max_m;
    if !(hi > lo && lo > 0.0) {
        return Err(Error::domain("length bounds", hi, "(max(min, H_u), inf) m"));
    }
    if p_target >= 1.0 {
        return Ok(hi);
    }
    let outage = |l: f64| -> Result<f64> {
        let scale = hop.snr_scale(l, elevation.psi(l)?)?;
        Ok(gains.outage(scale, gamma_th).probability)
    };
    let (out_lo, out_hi) = (outage(lo)?, outage(hi)?);
    if out_lo > out_hi {
        return Err(Error::NonMonotoneOutage {
            l_low_m: lo,
            l_high_m: hi,
            outage_low: out_lo,
            outage_high: out_hi,
        });
    }
    if out_lo >= p_target || out_hi < p_target {
        return Err(Error::NoBracket {
            target: p_target,
            l_low_m: lo,
            l_high_m: hi,
            outage_low: out_lo,
            outage_high: out_hi,
        });
    }
    while hi - lo > LENGTH_TOLERANCE * lo {
        let mid = 0.5 * (lo + hi);
        if outage(mid)? < p_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Mean capacity of one hop at length `l` and elevation `psi`.
pub fn conditional_hop_capacity(hop: &HopConfig, l: f64, psi: f64, mc: &McSettings) -> Result<EstimatorResult> {
    let scale = hop.snr_scale(l, psi)?;
    Ok(HopEnsemble::draw(hop, mc)?.capacity(scale, mc.unit))
}

/// Path-averaged end-to-end capacity on `m` orbit points.
pub fn e2e_avg_capacity(geom: &PathGeometry, hops: &RelayHops, m: usize, mc: &McSettings) -> Result<PathCapacity> {
    geom.validate()?;
    RelayEnsemble::draw(hops, mc)?.path_capacity(geom, hops, m)
}

/// End-to-end outage for fixed link lengths, both hops independent.
#[allow(clippy::too_many_arguments)]
pub fn conditional_outage(
    hops: &RelayHops,
    l_s: f64,
    l_d: f64,
    psi_s: f64,
    psi_d: f64,
    gamma_th: f64,
    mc: &McSettings,
) -> Result<OutageEstimate> {
    RelayEnsemble::draw(hops, mc)?.conditional_outage(hops, l_s, l_d, psi_s, psi_d, gamma_th)
}

/// Longest single-hop link meeting `p_target`.
pub fn max_link_length(
    hop: &HopConfig,
    gamma_th: f64,
    p_target: f64,
    elevation: ElevationModel,
    bounds: LengthBounds,
    mc: &McSettings,
) -> Result<f64> {
    let sorted = HopEnsemble::draw(hop, mc)?.sorted_gains();
    max_link_length_from(hop, &sorted, gamma_th, p_target, elevation, bounds)
}

/// Larger of the end-to-end outages at the two orbit extremes.
pub fn worst_case_path_outage(
    geom: &PathGeometry,
    hops: &RelayHops,
    gamma_th: f64,
    mc: &McSettings,
) -> Result<OutageEstimate> {
    geom.validate()?;
    Ok(RelayEnsemble::draw(hops, mc)?.endpoint_outage(geom, hops, gamma_th)?.worst())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antenna::{composite_gain, PointingSample};
    use crate::config::ScenarioConfig;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn scenario() -> (PathGeometry, RelayHops) {
        let cfg = ScenarioConfig::default();
        (cfg.geometry().unwrap(), cfg.hops().unwrap())
    }

    fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(f)
    }

    #[test]
    fn misalignment_draws_match_moments() {
        let stats = MisalignmentStats::new(0.03, -0.01, 0.02, 0.005).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 200_000;
        let draws: Vec<PointingSample> = (0..n)
            .map(|_| sample_misalignment(&stats, Truncation::Symmetric, &mut rng))
            .collect();
        for (values, mu, sigma) in [
            (draws.iter().map(|p| p.theta_x).collect::<Vec<_>>(), 0.03, 0.02),
            (draws.iter().map(|p| p.theta_y).collect::<Vec<_>>(), -0.01, 0.005),
        ] {
            let mean = values.iter().sum::<f64>() / n as f64;
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            assert!((mean - mu).abs() < 5.0 * sigma / (n as f64).sqrt(), "{mean} vs {mu}");
            assert!((var.sqrt() / sigma - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn strict_truncation_keeps_non_negative_angles() {
        let stats = MisalignmentStats::new(0.0, 0.0, 0.3, 0.3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let p = sample_misalignment(&stats, Truncation::Strict, &mut rng);
            assert!((0.0..FRAC_PI_2).contains(&p.theta_x) && (0.0..FRAC_PI_2).contains(&p.theta_y));
        }
    }

    #[test]
    fn far_tail_mean_is_pinned_to_edge() {
        let stats = MisalignmentStats::new(-1.5, 0.0, 1e-3, 1e-3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = sample_misalignment(&stats, Truncation::Strict, &mut rng);
        assert_eq!(p.theta_x, 0.0);
    }

    #[test]
    fn degenerate_jitter_gives_exact_capacity() {
        let (_, mut hops) = scenario();
        let tiny = MisalignmentStats::new(0.0, 0.0, 1e-15, 1e-15).unwrap();
        hops.cu.ground.misalignment = tiny;
        hops.cu.uav.misalignment = tiny;
        let (l, psi) = (11_400.0, 0.27);
        let est = conditional_hop_capacity(&hops.cu, l, psi, &McSettings::new(1_000, 1)).unwrap();
        let b = PointingSample::BORESIGHT;
        let k = hops.cu.carrier.wavenumber();
        let g = composite_gain(&hops.cu.ground.array, &hops.cu.element, k, &b)
            * composite_gain(&hops.cu.uav.array, &hops.cu.element, k, &b);
        let exact = (1.0 + hops.cu.snr_scale(l, psi).unwrap() * g).log2();
        assert_relative_eq!(est.mean, exact, max_relative = 1e-12);
        assert!(est.std_error < 1e-12);
    }

    #[test]
    fn identical_across_thread_counts() {
        let (geom, hops) = scenario();
        let mc = McSettings::new(3 * BATCH_SIZE + 17, 11);
        let one = in_pool(1, || e2e_avg_capacity(&geom, &hops, 31, &mc).unwrap());
        let many = in_pool(4, || e2e_avg_capacity(&geom, &hops, 31, &mc).unwrap());
        assert_eq!(one, many);
        let g1 = in_pool(1, || HopEnsemble::draw(&hops.ur, &mc).unwrap());
        let g4 = in_pool(4, || HopEnsemble::draw(&hops.ur, &mc).unwrap());
        assert_eq!(g1.gains(), g4.gains());
    }

    #[test]
    fn longer_runs_extend_shorter_ones() {
        let (_, hops) = scenario();
        let short = HopEnsemble::draw(&hops.cu, &McSettings::new(5_000, 4)).unwrap();
        let long = HopEnsemble::draw(&hops.cu, &McSettings::new(12_000, 4)).unwrap();
        assert_eq!(short.gains(), &long.gains()[..5_000]);
    }

    #[test]
    fn hops_use_independent_streams() {
        let (_, mut hops) = scenario();
        hops.ur = HopConfig {
            side: HopSide::Ur,
            ..hops.cu.clone()
        };
        let e = RelayEnsemble::draw(&hops, &McSettings::new(1_000, 9)).unwrap();
        assert_ne!(e.cu.gains(), e.ur.gains());
    }

    #[test]
    fn seed_changes_samples() {
        let (_, hops) = scenario();
        let a = HopEnsemble::draw(&hops.cu, &McSettings::new(500, 1)).unwrap();
        let b = HopEnsemble::draw(&hops.cu, &McSettings::new(500, 2)).unwrap();
        assert_ne!(a.gains(), b.gains());
    }

    #[test]
    fn too_few_samples_rejected() {
        let (_, hops) = scenario();
        assert!(matches!(
            HopEnsemble::draw(&hops.cu, &McSettings::new(99, 1)),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn standard_error_shrinks_as_root_n() {
        let (_, hops) = scenario();
        let big = HopEnsemble::draw(&hops.cu, &McSettings::new(160_000, 5)).unwrap();
        let scale = hops.cu.snr_scale(11_000.0, 0.28).unwrap();
        let se = |n: usize| {
            let sub = HopEnsemble {
                gains: big.gains[..n].to_vec(),
                ..big.clone()
            };
            sub.capacity(scale, CapacityUnit::Bits).std_error
        };
        let ratio = se(160_000) / se(40_000);
        assert!((0.45..0.55).contains(&ratio), "{ratio}");
    }

    #[test]
    fn outage_limits() {
        let (geom, hops) = scenario();
        let mc = McSettings::new(2_000, 1);
        let p = geom.point(1.0).unwrap();
        let at = |g: f64| conditional_outage(&hops, p.l_s, p.l_d, p.psi_s, p.psi_d, g, &mc).unwrap();
        assert_eq!(at(0.0).probability, 0.0);
        assert_eq!(at(1e30).probability, 1.0);
        assert_eq!(at(f64::INFINITY).probability, 1.0);
    }

    #[test]
    fn e2e_outage_bounded_by_hops() {
        let (geom, hops) = scenario();
        let e = RelayEnsemble::draw(&hops, &McSettings::new(20_000, 2)).unwrap();
        for theta in [0.0, 1.0, 2.5, std::f64::consts::PI] {
            let p = geom.point(theta).unwrap();
            for gamma_th in [0.5, 1.0, 2.0] {
                let s = e.cu.outage(hops.cu.snr_scale(p.l_s, p.psi_s).unwrap(), gamma_th).probability;
                let d = e.ur.outage(hops.ur.snr_scale(p.l_d, p.psi_d).unwrap(), gamma_th).probability;
                let both = e.outage_at(&hops, &p, gamma_th).unwrap().probability;
                assert!(both >= s.max(d) && both <= s + d);
            }
        }
    }

    #[test]
    fn sorted_and_plain_outage_agree() {
        let (_, hops) = scenario();
        let e = HopEnsemble::draw(&hops.cu, &McSettings::new(10_000, 8)).unwrap();
        let sorted = e.sorted_gains();
        for l in [8_000.0, 11_000.0, 14_000.0, 20_000.0] {
            let scale = hops.cu.snr_scale(l, 0.25).unwrap();
            assert_eq!(e.outage(scale, 1.0), sorted.outage(scale, 1.0));
        }
    }

    #[test]
    fn path_capacity_invariants() {
        let (geom, hops) = scenario();
        let pc = e2e_avg_capacity(&geom, &hops, 37, &McSettings::new(4_000, 3)).unwrap();
        assert_relative_eq!(pc.weights.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        assert!(pc.avg_of_min.mean <= pc.e2e.mean + 1e-12);
        assert!(pc.e2e.mean <= pc.su_average.mean.min(pc.du_average.mean) + 1e-12);
        let direct: f64 = pc
            .e2e_curve()
            .iter()
            .zip(&pc.weights)
            .map(|(c, w)| w * c.mean)
            .sum();
        assert_relative_eq!(direct, pc.e2e.mean, max_relative = 1e-12);
        assert!(pc.e2e.std_error > 0.0);
    }

    #[test]
    fn capacity_units() {
        let (_, hops) = scenario();
        let mut mc = McSettings::new(1_000, 1);
        let bits = conditional_hop_capacity(&hops.cu, 10_000.0, 0.3, &mc).unwrap();
        mc.unit = CapacityUnit::Nats;
        let nats = conditional_hop_capacity(&hops.cu, 10_000.0, 0.3, &mc).unwrap();
        assert_relative_eq!(nats.mean, bits.mean * std::f64::consts::LN_2, max_relative = 1e-12);
    }

    #[test]
    fn max_length_meets_target() {
        let (_, hops) = scenario();
        let mc = McSettings::new(20_000, 6);
        let sorted = HopEnsemble::draw(&hops.cu, &mc).unwrap().sorted_gains();
        let elevation = ElevationModel::FixedAltitude(3_000.0);
        let target = 1e-2;
        let l = max_link_length_from(&hops.cu, &sorted, 1.0, target, elevation, LengthBounds::default()).unwrap();
        let outage = |l: f64| {
            let psi = (3_000.0 / l).asin();
            sorted.outage(hops.cu.snr_scale(l, psi).unwrap(), 1.0).probability
        };
        assert!(outage(l) < target);
        assert!(outage(l * (1.0 + 2.0 * LENGTH_TOLERANCE)) >= target);

        let stricter = max_link_length_from(&hops.cu, &sorted, 2.0, target, elevation, LengthBounds::default()).unwrap();
        assert!(stricter < l);
        let looser = max_link_length_from(&hops.cu, &sorted, 1.0, 0.1, elevation, LengthBounds::default()).unwrap();
        assert!(looser > l);
        let all = max_link_length_from(&hops.cu, &sorted, 1.0, 1.0, elevation, LengthBounds::default()).unwrap();
        assert_eq!(all, LengthBounds::default().max_m);
    }

    #[test]
    fn max_length_reports_missing_bracket() {
        let (_, hops) = scenario();
        let mc = McSettings::new(1_000, 6);
        let bounds = LengthBounds {
            min_m: 100.0,
            max_m: 4_000.0,
        };
        let err = max_link_length(&hops.cu, 1.0, 1e-3, ElevationModel::FixedAngle(0.3), bounds, &mc).unwrap_err();
        assert!(matches!(err, Error::NoBracket { .. }));
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn worst_case_is_larger_endpoint() {
        let (geom, hops) = scenario();
        let mc = McSettings::new(20_000, 2);
        let e = RelayEnsemble::draw(&hops, &mc).unwrap();
        let ends = e.endpoint_outage(&geom, &hops, 1.0).unwrap();
        let worst = worst_case_path_outage(&geom, &hops, 1.0, &mc).unwrap();
        assert_eq!(worst.probability, ends.at_bp1.probability.max(ends.at_bp2.probability));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn outage_monotone_in_length(l in 2_000.0f64..40_000.0, dl in 1.0f64..5_000.0, g in 0.1f64..10.0) {
            let (_, hops) = scenario();
            let e = HopEnsemble::draw(&hops.ur, &McSettings::new(2_000, 1)).unwrap();
            let p1 = e.outage(hops.ur.snr_scale(l, 0.2).unwrap(), g).probability;
            let p2 = e.outage(hops.ur.snr_scale(l + dl, 0.2).unwrap(), g).probability;
            prop_assert!(p2 >= p1);
        }

        #[test]
        fn capacity_decreases_with_length(l in 2_000.0f64..40_000.0, dl in 1.0f64..5_000.0) {
            let (_, hops) = scenario();
            let e = HopEnsemble::draw(&hops.cu, &McSettings::new(1_000, 1)).unwrap();
            let c1 = e.capacity(hops.cu.snr_scale(l, 0.2).unwrap(), CapacityUnit::Bits).mean;
            let c2 = e.capacity(hops.cu.snr_scale(l + dl, 0.2).unwrap(), CapacityUnit::Bits).mean;
            prop_assert!(c2 < c1);
            prop_assert!(c2 >= 0.0);
        }
    }
}
