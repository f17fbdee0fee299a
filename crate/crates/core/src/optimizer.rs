//! Constrained design search and parameter sweeps.
//!
//! The objective is the path-averaged end-to-end capacity. A candidate is
//! feasible when the worst end-of-orbit outage is below the target, the UAV
//! flies above the line-of-sight minimum altitude, and the longest link of
//! each hop over the orbit is shorter than that hop's maximum length.
//!
//! Every candidate draws its gain ensembles from the same seed, so ranking
//! differences come from the designs and not from sampling noise.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::f64::consts::PI;

use log::{debug, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PathGeometry;
use crate::link::HopConfig;
use crate::montecarlo::{
    max_link_length_from, ElevationModel, EstimatorResult, LengthBounds, McSettings, OutageEstimate,
    PathCapacity, RelayEnsemble, RelayHops, SortedGains,
};

/// Element counts of all four arrays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ArrayChoice {
    pub n_sx: u32,
    pub n_sy: u32,
    pub n_dx: u32,
    pub n_dy: u32,
    pub n_usx: u32,
    pub n_usy: u32,
    pub n_udx: u32,
    pub n_udy: u32,
}

impl ArrayChoice {
    /// Counts currently configured on `hops`.
    pub fn from_hops(hops: &RelayHops) -> Self {
        Self {
            n_sx: hops.cu.ground.array.n_x,
            n_sy: hops.cu.ground.array.n_y,
            n_dx: hops.ur.ground.array.n_x,
            n_dy: hops.ur.ground.array.n_y,
            n_usx: hops.cu.uav.array.n_x,
            n_usy: hops.cu.uav.array.n_y,
            n_udx: hops.ur.uav.array.n_x,
            n_udy: hops.ur.uav.array.n_y,
        }
    }

    pub fn total_elements(&self) -> u32 {
        self.n_sx * self.n_sy + self.n_dx * self.n_dy + self.n_usx * self.n_usy + self.n_udx * self.n_udy
    }

    pub fn apply(&self, hops: &RelayHops) -> RelayHops {
        let mut out = hops.clone();
        out.cu.ground.array = out.cu.ground.array.with_counts(self.n_sx, self.n_sy);
        out.ur.ground.array = out.ur.ground.array.with_counts(self.n_dx, self.n_dy);
        out.cu.uav.array = out.cu.uav.array.with_counts(self.n_usx, self.n_usy);
        out.ur.uav.array = out.ur.uav.array.with_counts(self.n_udx, self.n_udy);
        out
    }

    /// Both UAV arrays with their x and y counts exchanged.
    pub fn swapped_uav(&self) -> Self {
        Self {
            n_usx: self.n_usy,
            n_usy: self.n_usx,
            n_udx: self.n_udy,
            n_udy: self.n_udx,
            ..*self
        }
    }
}

/// Grids for every decision variable.
///
/// With `tie_hops` the RA arrays copy the CN grids (`n_dx = n_sx`, ...) and
/// the RA-facing UAV array copies the CN-facing one, so the `n_d*` and
/// `n_ud*` grids are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSpace {
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
}

impl DesignSpace {
    /// A space containing only `arrays` at one altitude and placement.
    pub fn single(arrays: ArrayChoice, h_u_m: f64, l_sc_m: f64) -> Self {
        Self {
            n_sx: vec![arrays.n_sx],
            n_sy: vec![arrays.n_sy],
            n_dx: vec![arrays.n_dx],
            n_dy: vec![arrays.n_dy],
            n_usx: vec![arrays.n_usx],
            n_usy: vec![arrays.n_usy],
            n_udx: vec![arrays.n_udx],
            n_udy: vec![arrays.n_udy],
            h_u_m: vec![h_u_m],
            l_sc_m: vec![l_sc_m],
            n_max: u32::MAX,
            tie_hops: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let grids = [
            &self.n_sx, &self.n_sy, &self.n_dx, &self.n_dy, &self.n_usx, &self.n_usy, &self.n_udx, &self.n_udy,
        ];
        for grid in grids {
            if grid.is_empty() {
                return Err(Error::domain("element grid size", 0.0, "[1, inf)"));
            }
            if let Some(&bad) = grid.iter().find(|&&n| n < 1 || n > self.n_max) {
                return Err(Error::domain("element count", bad as f64, "[1, N_max]"));
            }
        }
        if self.h_u_m.is_empty() || self.l_sc_m.is_empty() {
            return Err(Error::domain("placement grid size", 0.0, "[1, inf)"));
        }
        Ok(())
    }

    /// All array combinations, in lexicographic order.
    pub fn array_choices(&self) -> Vec<ArrayChoice> {
        let mut out = Vec::new();
        for &n_sx in &self.n_sx {
            for &n_sy in &self.n_sy {
                for &n_usx in &self.n_usx {
                    for &n_usy in &self.n_usy {
                        if self.tie_hops {
                            out.push(ArrayChoice {
                                n_sx,
                                n_sy,
                                n_dx: n_sx,
                                n_dy: n_sy,
                                n_usx,
                                n_usy,
                                n_udx: n_usx,
                                n_udy: n_usy,
                            });
                            continue;
                        }
                        for &n_dx in &self.n_dx {
                            for &n_dy in &self.n_dy {
                                for &n_udx in &self.n_udx {
                                    for &n_udy in &self.n_udy {
                                        out.push(ArrayChoice {
                                            n_sx,
                                            n_sy,
                                            n_dx,
                                            n_dy,
                                            n_usx,
                                            n_usy,
                                            n_udx,
                                            n_udy,
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    fn contains(&self, a: &ArrayChoice) -> bool {
        self.array_choices().contains(a)
    }
}

/// Search settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOptions {
    /// Linear SNR threshold.
    pub gamma_th: f64,
    /// Outage target `P_out,tr`.
    pub p_out_target: f64,
    /// Orbit points of the capacity trapezoid.
    pub path_points: usize,
    pub mc: McSettings,
    pub bounds: LengthBounds,
    /// Evaluate only `N_uy ≥ N_ux` on UAV arrays whose y jitter is smaller.
    pub prune_axis_order: bool,
}

/// A violated constraint of a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "constraint", rename_all = "snake_case")]
pub enum Violation {
    Outage { worst: f64, target: f64 },
    MinHeight { h_u: f64, h_u_min: f64 },
    LsInterval { path_max_l_s: f64, l_s_max: f64 },
    LdInterval { path_max_l_d: f64, l_d_max: f64 },
}

impl Violation {
    pub fn name(&self) -> &'static str {
        match self {
            Violation::Outage { .. } => "outage",
            Violation::MinHeight { .. } => "min_height",
            Violation::LsInterval { .. } => "l_s_interval",
            Violation::LdInterval { .. } => "l_d_interval",
        }
    }
}

/// Outcome of the constraint checks for one placement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Feasibility {
    pub feasible: bool,
    pub worst_outage: OutageEstimate,
    pub l_s_max: f64,
    pub l_d_max: f64,
    pub h_u_min: f64,
    pub violations: Vec<Violation>,
}

/// One evaluated candidate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignPoint {
    pub arrays: ArrayChoice,
    pub h_u_m: f64,
    pub l_sc_m: f64,
    pub feasible: bool,
    pub worst_outage: f64,
    /// Path-averaged capacity; only computed for feasible candidates.
    pub avg_capacity: Option<EstimatorResult>,
    pub l_s_max: f64,
    pub l_d_max: f64,
    pub h_u_min: f64,
    pub violations: Vec<Violation>,
}

impl DesignPoint {
    fn ranking(&self, other: &Self) -> Ordering {
        let cap = |d: &DesignPoint| d.avg_capacity.map(|c| c.mean).unwrap_or(f64::NEG_INFINITY);
        other
            .feasible
            .cmp(&self.feasible)
            .then_with(|| cap(other).total_cmp(&cap(self)))
            .then_with(|| self.worst_outage.total_cmp(&other.worst_outage))
            .then_with(|| self.arrays.total_elements().cmp(&other.arrays.total_elements()))
            .then_with(|| self.arrays.cmp(&other.arrays))
            .then_with(|| self.h_u_m.total_cmp(&other.h_u_m))
            .then_with(|| self.l_sc_m.total_cmp(&other.l_sc_m))
    }
}

/// Why a candidate was skipped without evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PruneRule {
    /// `N_uy < N_ux` although the UAV's y jitter is the smaller one.
    AxisOrder,
    /// A smaller `L_sc` already broke the CN length limit.
    LsDominated,
    /// A larger `L_sc` already broke the RA length limit.
    LdDominated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrunedCandidate {
    pub arrays: ArrayChoice,
    pub h_u_m: Option<f64>,
    pub l_sc_m: Option<f64>,
    pub rule: PruneRule,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationReport {
    pub best: DesignPoint,
    /// Evaluated candidates, best first.
    pub ranked: Vec<DesignPoint>,
    pub pruned: Vec<PrunedCandidate>,
    /// Set when the swapped-axis probe beat the pruned optimum and the
    /// search was repeated without the element-count pruning.
    pub axis_pruning_disabled: bool,
}

/// Returned inside [`Error::NoFeasibleDesign`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfeasibilityReport {
    pub evaluated: usize,
    pub pruned: usize,
    pub violation_counts: BTreeMap<String, usize>,
    /// Candidate with the lowest worst-case outage.
    pub closest: Option<DesignPoint>,
}

/// Maximum link length, with out-of-range brackets resolved to the bounds.
fn resolved_max_length(
    hop: &HopConfig,
    gains: &SortedGains,
    opts: &OptimizerOptions,
    h_u: f64,
) -> Result<f64> {
    match max_link_length_from(
        hop,
        gains,
        opts.gamma_th,
        opts.p_out_target,
        ElevationModel::FixedAltitude(h_u),
        opts.bounds,
    ) {
        Ok(l) => Ok(l),
        Err(Error::NoBracket {
            target,
            l_low_m,
            l_high_m,
            outage_low,
            ..
        }) => Ok(if outage_low >= target { l_low_m } else { l_high_m }),
        Err(e) => Err(e),
    }
}

struct PreparedArrays {
    arrays: ArrayChoice,
    hops: RelayHops,
    ensemble: RelayEnsemble,
    sorted_cu: SortedGains,
    sorted_ur: SortedGains,
}

impl PreparedArrays {
    fn new(arrays: ArrayChoice, template: &RelayHops, mc: &McSettings) -> Result<Self> {
        let hops = arrays.apply(template);
        let ensemble = RelayEnsemble::draw(&hops, mc)?;
        let sorted_cu = ensemble.cu.sorted_gains();
        let sorted_ur = ensemble.ur.sorted_gains();
        Ok(Self {
            arrays,
            hops,
            ensemble,
            sorted_cu,
            sorted_ur,
        })
    }

    fn max_lengths(&self, opts: &OptimizerOptions, h_u: f64) -> Result<(f64, f64)> {
        Ok((
            resolved_max_length(&self.hops.cu, &self.sorted_cu, opts, h_u)?,
            resolved_max_length(&self.hops.ur, &self.sorted_ur, opts, h_u)?,
        ))
    }

    fn feasibility(&self, geom: &PathGeometry, opts: &OptimizerOptions, l_max: (f64, f64)) -> Result<Feasibility> {
        let (l_s_max, l_d_max) = l_max;
        let h_u_min = geom.min_height()?;
        let worst_outage = self
            .ensemble
            .endpoint_outage(geom, &self.hops, opts.gamma_th)?
            .worst();
        let mut violations = Vec::new();
        if opts.p_out_target < 1.0 && !(worst_outage.probability < opts.p_out_target) {
            violations.push(Violation::Outage {
                worst: worst_outage.probability,
                target: opts.p_out_target,
            });
        }
        if geom.h_u < h_u_min {
            violations.push(Violation::MinHeight {
                h_u: geom.h_u,
                h_u_min,
            });
        }
        let path_max_l_s = geom.max_path_l_s();
        if path_max_l_s > l_s_max {
            violations.push(Violation::LsInterval { path_max_l_s, l_s_max });
        }
        let path_max_l_d = geom.max_path_l_d();
        if path_max_l_d > l_d_max {
            violations.push(Violation::LdInterval { path_max_l_d, l_d_max });
        }
        Ok(Feasibility {
            feasible: violations.is_empty(),
            worst_outage,
            l_s_max,
            l_d_max,
            h_u_min,
            violations,
        })
    }

    fn evaluate(&self, geom: &PathGeometry, opts: &OptimizerOptions, l_max: (f64, f64)) -> Result<DesignPoint> {
        let f = self.feasibility(geom, opts, l_max)?;
        let avg_capacity = if f.feasible {
            Some(self.ensemble.path_capacity(geom, &self.hops, opts.path_points)?.e2e)
        } else {
            None
        };
        Ok(DesignPoint {
            arrays: self.arrays,
            h_u_m: geom.h_u,
            l_sc_m: geom.l_sc,
            feasible: f.feasible,
            worst_outage: f.worst_outage.probability,
            avg_capacity,
            l_s_max: f.l_s_max,
            l_d_max: f.l_d_max,
            h_u_min: f.h_u_min,
            violations: f.violations,
        })
    }

    /// Evaluate every placement of this array choice, skipping placements
    /// dominated by an earlier length-limit violation.
    fn evaluate_space(
        &self,
        geom: &PathGeometry,
        space: &DesignSpace,
        opts: &OptimizerOptions,
    ) -> Result<(Vec<DesignPoint>, Vec<PrunedCandidate>)> {
        let mut l_sc = space.l_sc_m.clone();
        l_sc.sort_by(f64::total_cmp);
        l_sc.dedup();
        let mut points = Vec::new();
        let mut pruned = Vec::new();
        for &h_u in &space.h_u_m {
            let l_max = self.max_lengths(opts, h_u)?;
            let at = |x: f64| geom.with_h_u(h_u).with_l_sc(x);
            // Longest RA link shrinks as L_sc grows; the longest CN link grows.
            let first = l_sc
                .iter()
                .rposition(|&x| at(x).max_path_l_d() > l_max.1)
                .unwrap_or(0);
            let last = l_sc
                .iter()
                .position(|&x| at(x).max_path_l_s() > l_max.0)
                .unwrap_or(l_sc.len() - 1)
                .max(first);
            for (i, &x) in l_sc.iter().enumerate() {
                let rule = if i < first {
                    Some(PruneRule::LdDominated)
                } else if i > last {
                    Some(PruneRule::LsDominated)
                } else {
                    None
                };
                if let Some(rule) = rule {
                    debug!("pruned {:?} h_u={h_u} l_sc={x} by {rule:?}", self.arrays);
                    pruned.push(PrunedCandidate {
                        arrays: self.arrays,
                        h_u_m: Some(h_u),
                        l_sc_m: Some(x),
                        rule,
                    });
                    continue;
                }
                let g = at(x);
                g.validate()?;
                points.push(self.evaluate(&g, opts, l_max)?);
            }
        }
        Ok((points, pruned))
    }
}

/// Constraint checks for one fully specified candidate.
pub fn feasibility_check(geom: &PathGeometry, hops: &RelayHops, opts: &OptimizerOptions) -> Result<Feasibility> {
    geom.validate()?;
    let prepared = PreparedArrays::new(ArrayChoice::from_hops(hops), hops, &opts.mc)?;
    let l_max = prepared.max_lengths(opts, geom.h_u)?;
    prepared.feasibility(geom, opts, l_max)
}

fn axis_order_excludes(arrays: &ArrayChoice, hops: &RelayHops) -> bool {
    let cu = hops.cu.uav.misalignment;
    let ur = hops.ur.uav.misalignment;
    (cu.sigma_y < cu.sigma_x && arrays.n_usy < arrays.n_usx) || (ur.sigma_y < ur.sigma_x && arrays.n_udy < arrays.n_udx)
}

fn search(
    space: &DesignSpace,
    geom: &PathGeometry,
    hops: &RelayHops,
    opts: &OptimizerOptions,
    prune: bool,
) -> Result<(Vec<DesignPoint>, Vec<PrunedCandidate>)> {
    let mut pruned = Vec::new();
    let mut candidates = Vec::new();
    for arrays in space.array_choices() {
        if prune && axis_order_excludes(&arrays, hops) {
            debug!("pruned {arrays:?} by axis order");
            pruned.push(PrunedCandidate {
                arrays,
                h_u_m: None,
                l_sc_m: None,
                rule: PruneRule::AxisOrder,
            });
        } else {
            candidates.push(arrays);
        }
    }
    let results: Vec<(Vec<DesignPoint>, Vec<PrunedCandidate>)> = candidates
        .par_iter()
        .map(|&arrays| PreparedArrays::new(arrays, hops, &opts.mc)?.evaluate_space(geom, space, opts))
        .collect::<Result<_>>()?;
    let mut points = Vec::new();
    for (p, q) in results {
        points.extend(p);
        pruned.extend(q);
    }
    points.sort_by(DesignPoint::ranking);
    Ok((points, pruned))
}

fn infeasibility_report(points: &[DesignPoint], pruned: usize) -> InfeasibilityReport {
    let mut violation_counts = BTreeMap::new();
    for v in points.iter().flat_map(|p| &p.violations) {
        *violation_counts.entry(v.name().to_string()).or_insert(0) += 1;
    }
    let closest = points
        .iter()
        .min_by(|a, b| a.worst_outage.total_cmp(&b.worst_outage).then_with(|| a.ranking(b)))
        .cloned();
    InfeasibilityReport {
        evaluated: points.len(),
        pruned,
        violation_counts,
        closest,
    }
}

/// Distinct leading array choices whose swapped UAV counts are probed.
const PROBE_LEADERS: usize = 3;

/// Exhaustive search over `space`; geometry and hops supply every fixed parameter.
pub fn optimize(
    space: &DesignSpace,
    geom: &PathGeometry,
    hops: &RelayHops,
    opts: &OptimizerOptions,
) -> Result<OptimizationReport> {
    space.validate()?;
    opts.mc.validate()?;
    let (mut ranked, mut pruned) = search(space, geom, hops, opts, opts.prune_axis_order)?;
    let mut axis_pruning_disabled = false;

    if opts.prune_axis_order {
        if let Some(best) = ranked.first().filter(|d| d.feasible).cloned() {
            let mut leaders: Vec<ArrayChoice> = Vec::new();
            for d in ranked.iter().filter(|d| d.feasible) {
                if !leaders.contains(&d.arrays) {
                    leaders.push(d.arrays);
                    if leaders.len() == PROBE_LEADERS {
                        break;
                    }
                }
            }
            let mirrors: Vec<ArrayChoice> = leaders
                .iter()
                .map(ArrayChoice::swapped_uav)
                .filter(|m| axis_order_excludes(m, hops) && space.contains(m))
                .collect();
            let mut better = None;
            for mirror in mirrors {
                let (probe_points, _) = PreparedArrays::new(mirror, hops, &opts.mc)?.evaluate_space(geom, space, opts)?;
                if probe_points
                    .iter()
                    .any(|p| p.feasible && p.ranking(&best) == Ordering::Less)
                {
                    better = Some(mirror);
                    break;
                }
            }
            if let Some(mirror) = better {
                warn!("swapped UAV array {mirror:?} beats the pruned optimum; repeating the search without pruning");
                let (r, p) = search(space, geom, hops, opts, false)?;
                ranked = r;
                pruned = p;
                axis_pruning_disabled = true;
            }
        }
    }

    match ranked.first() {
        Some(best) if best.feasible => Ok(OptimizationReport {
            best: best.clone(),
            ranked,
            pruned,
            axis_pruning_disabled,
        }),
        _ => Err(Error::NoFeasibleDesign(Box::new(infeasibility_report(&ranked, pruned.len())))),
    }
}

/// Quantity on the horizontal axis of a [`SweepCurve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Abscissa {
    /// CN link length to the orbit centre (m).
    Ls,
    /// Orbit angle (rad).
    ThetaR1,
    /// Element count along x of both UAV arrays.
    NUqx,
    /// Element count along y of both UAV arrays.
    NUqy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub x: f64,
    pub l_s: f64,
    pub l_d: f64,
    pub c_su: EstimatorResult,
    pub c_du: EstimatorResult,
    pub c_e2e: EstimatorResult,
    pub p_out_su: f64,
    pub p_out_du: f64,
    pub p_out_e2e: f64,
    /// Orbit-averaged capacity for the placement or design at this point.
    pub path_avg: Option<EstimatorResult>,
    pub feasible: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCurve {
    pub abscissa: Abscissa,
    pub points: Vec<SweepPoint>,
}

impl SweepCurve {
    fn new(abscissa: Abscissa, points: Vec<SweepPoint>) -> Result<Self> {
        if let Some(w) = points.windows(2).find(|w| !(w[1].x > w[0].x)) {
            return Err(Error::domain("sweep abscissa", w[1].x, "strictly increasing"));
        }
        Ok(Self { abscissa, points })
    }

    /// Abscissa where `C_su` and `C_du` cross, linearly interpolated.
    pub fn crossing(&self) -> Option<f64> {
        self.points.windows(2).find_map(|w| {
            let d0 = w[0].c_su.mean - w[0].c_du.mean;
            let d1 = w[1].c_su.mean - w[1].c_du.mean;
            if d0 == 0.0 {
                Some(w[0].x)
            } else if (d0 > 0.0) != (d1 > 0.0) || d1 == 0.0 {
                Some(w[0].x + (w[1].x - w[0].x) * d0 / (d0 - d1))
            } else {
                None
            }
        })
    }

    /// Abscissa of the largest end-to-end capacity.
    pub fn argmax_e2e(&self) -> Option<f64> {
        self.points
            .iter()
            .max_by(|a, b| a.c_e2e.mean.total_cmp(&b.c_e2e.mean))
            .map(|p| p.x)
    }

    /// Abscissa of the largest orbit-averaged capacity.
    pub fn argmax_path_avg(&self) -> Option<f64> {
        self.points
            .iter()
            .filter_map(|p| p.path_avg.map(|c| (p.x, c.mean)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(x, _)| x)
    }

    /// Trapezoid mean of the end-to-end curve over its abscissa range.
    pub fn trapezoid_mean(&self) -> f64 {
        let pts = &self.points;
        let span = pts.last().map(|p| p.x).unwrap_or(0.0) - pts.first().map(|p| p.x).unwrap_or(0.0);
        let area: f64 = pts
            .windows(2)
            .map(|w| 0.5 * (w[0].c_e2e.mean + w[1].c_e2e.mean) * (w[1].x - w[0].x))
            .sum();
        area / span
    }
}

fn min_estimate(a: EstimatorResult, b: EstimatorResult) -> EstimatorResult {
    if a.mean <= b.mean {
        a
    } else {
        b
    }
}

/// Performance versus the CN link length to the orbit centre, obtained by
/// moving the centre along the CN–RA line over `l_sc_grid`.
///
/// With `path_points` set, each placement also gets its orbit-averaged capacity.
pub fn sweep_vs_ls(
    geom: &PathGeometry,
    hops: &RelayHops,
    l_sc_grid: &[f64],
    gamma_th: f64,
    path_points: Option<usize>,
    mc: &McSettings,
) -> Result<SweepCurve> {
    let ensemble = RelayEnsemble::draw(hops, mc)?;
    let mut grid = l_sc_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let points = grid
        .iter()
        .map(|&l_sc| {
            let g = geom.with_l_sc(l_sc);
            g.validate()?;
            let h = g.h_u;
            let l_s = l_sc.hypot(h);
            let l_d = g.l_dc().hypot(h);
            let (psi_s, psi_d) = ((h / l_s).asin(), (h / l_d).asin());
            let (c_su, c_du) = ensemble.point_capacity(hops, l_s, l_d, psi_s, psi_d)?;
            let a_s = hops.cu.snr_scale(l_s, psi_s)?;
            let a_d = hops.ur.snr_scale(l_d, psi_d)?;
            let path_avg = match path_points {
                Some(m) => Some(ensemble.path_capacity(&g, hops, m)?.e2e),
                None => None,
            };
            Ok(SweepPoint {
                x: l_s,
                l_s,
                l_d,
                c_su,
                c_du,
                c_e2e: min_estimate(c_su, c_du),
                p_out_su: ensemble.cu.outage(a_s, gamma_th).probability,
                p_out_du: ensemble.ur.outage(a_d, gamma_th).probability,
                p_out_e2e: ensemble.conditional_outage(hops, l_s, l_d, psi_s, psi_d, gamma_th)?.probability,
                path_avg,
                feasible: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SweepCurve::new(Abscissa::Ls, points)
}

/// Per-hop and end-to-end capacity along the orbit on `m` angles, together
/// with the orbit average it integrates to.
pub fn sweep_vs_flight_angle(
    geom: &PathGeometry,
    hops: &RelayHops,
    m: usize,
    gamma_th: f64,
    mc: &McSettings,
) -> Result<(SweepCurve, PathCapacity)> {
    geom.validate()?;
    let ensemble = RelayEnsemble::draw(hops, mc)?;
    let path = ensemble.path_capacity(geom, hops, m)?;
    let points = path
        .points
        .iter()
        .zip(path.c_su.iter().zip(&path.c_du))
        .map(|(p, (&c_su, &c_du))| {
            let a_s = hops.cu.snr_scale(p.l_s, p.psi_s)?;
            let a_d = hops.ur.snr_scale(p.l_d, p.psi_d)?;
            Ok(SweepPoint {
                x: p.theta,
                l_s: p.l_s,
                l_d: p.l_d,
                c_su,
                c_du,
                c_e2e: min_estimate(c_su, c_du),
                p_out_su: ensemble.cu.outage(a_s, gamma_th).probability,
                p_out_du: ensemble.ur.outage(a_d, gamma_th).probability,
                p_out_e2e: ensemble.outage_at(hops, p, gamma_th)?.probability,
                path_avg: None,
                feasible: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((SweepCurve::new(Abscissa::ThetaR1, points)?, path))
}

/// Orbit-averaged performance versus the element count of both UAV arrays
/// along one axis; everything else stays as configured.
pub fn sweep_vs_elements(
    geom: &PathGeometry,
    hops: &RelayHops,
    abscissa: Abscissa,
    counts: &[u32],
    opts: &OptimizerOptions,
) -> Result<SweepCurve> {
    if !matches!(abscissa, Abscissa::NUqx | Abscissa::NUqy) {
        return Err(Error::domain("element sweep axis", 0.0, "N_uqx or N_uqy"));
    }
    geom.validate()?;
    let base = ArrayChoice::from_hops(hops);
    let mut counts = counts.to_vec();
    counts.sort_unstable();
    counts.dedup();
    let points = counts
        .par_iter()
        .map(|&n| {
            let arrays = match abscissa {
                Abscissa::NUqx => ArrayChoice {
                    n_usx: n,
                    n_udx: n,
                    ..base
                },
                _ => ArrayChoice {
                    n_usy: n,
                    n_udy: n,
                    ..base
                },
            };
            let prepared = PreparedArrays::new(arrays, hops, &opts.mc)?;
            let l_max = prepared.max_lengths(opts, geom.h_u)?;
            let f = prepared.feasibility(geom, opts, l_max)?;
            let path = prepared.ensemble.path_capacity(geom, &prepared.hops, opts.path_points)?;
            let bp1 = geom.point(0.0)?;
            let bp2 = geom.point(PI)?;
            let a_s = prepared.hops.cu.snr_scale(bp1.l_s, bp1.psi_s)?;
            let a_d = prepared.hops.ur.snr_scale(bp2.l_d, bp2.psi_d)?;
            Ok(SweepPoint {
                x: n as f64,
                l_s: bp1.l_s,
                l_d: bp2.l_d,
                c_su: path.su_average,
                c_du: path.du_average,
                c_e2e: path.e2e,
                p_out_su: prepared.ensemble.cu.outage(a_s, opts.gamma_th).probability,
                p_out_du: prepared.ensemble.ur.outage(a_d, opts.gamma_th).probability,
                p_out_e2e: f.worst_outage.probability,
                path_avg: Some(path.e2e),
                feasible: Some(f.feasible),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SweepCurve::new(abscissa, points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ScenarioConfig;

    fn setup(samples: usize) -> (PathGeometry, RelayHops, OptimizerOptions) {
        let mut cfg = ScenarioConfig::default();
        cfg.link.noise_power_w = Some(10f64.powf(-10.6));
        cfg.montecarlo.samples = samples;
        cfg.montecarlo.path_points = 21;
        (cfg.geometry().unwrap(), cfg.hops().unwrap(), cfg.optimizer_options())
    }

    fn uav_space(base: ArrayChoice, n_x: &[u32], n_y: &[u32], l_sc: &[f64]) -> DesignSpace {
        DesignSpace {
            n_usx: n_x.to_vec(),
            n_usy: n_y.to_vec(),
            l_sc_m: l_sc.to_vec(),
            n_max: 18,
            tie_hops: true,
            ..DesignSpace::single(base, 3_000.0, 9_500.0)
        }
    }

    #[test]
    fn single_point_matches_direct_evaluation() {
        let (geom, hops, opts) = setup(4_000);
        let arrays = ArrayChoice::from_hops(&hops);
        let report = optimize(&DesignSpace::single(arrays, geom.h_u, geom.l_sc), &geom, &hops, &opts).unwrap();
        assert_eq!(report.ranked.len(), 1);
        let f = feasibility_check(&geom, &hops, &opts).unwrap();
        assert!(f.feasible);
        assert_eq!(report.best.worst_outage, f.worst_outage.probability);
        let direct = RelayEnsemble::draw(&hops, &opts.mc)
            .unwrap()
            .path_capacity(&geom, &hops, opts.path_points)
            .unwrap()
            .e2e;
        assert_eq!(report.best.avg_capacity, Some(direct));
    }

    #[test]
    fn two_points_pick_higher_capacity() {
        let (geom, hops, opts) = setup(4_000);
        let base = ArrayChoice::from_hops(&hops);
        let report = optimize(&uav_space(base, &[8, 12], &[18], &[9_500.0]), &geom, &hops, &opts).unwrap();
        assert_eq!(report.ranked.len(), 2);
        let caps: Vec<f64> = report.ranked.iter().map(|d| d.avg_capacity.unwrap().mean).collect();
        assert!(caps[0] > caps[1]);
        assert_eq!(report.best.arrays.n_usx, 12);
        assert_eq!(report.best.arrays.n_udx, 12);
    }

    #[test]
    fn ties_prefer_fewer_elements() {
        let base = ArrayChoice {
            n_sx: 4,
            n_sy: 4,
            n_dx: 4,
            n_dy: 4,
            n_usx: 4,
            n_usy: 4,
            n_udx: 4,
            n_udy: 4,
        };
        let point = |arrays: ArrayChoice| DesignPoint {
            arrays,
            h_u_m: 3_000.0,
            l_sc_m: 9_500.0,
            feasible: true,
            worst_outage: 0.0,
            avg_capacity: Some(EstimatorResult {
                mean: 1.0,
                std_error: 0.0,
                n_samples: 100,
                seed: 0,
            }),
            l_s_max: 1.0,
            l_d_max: 1.0,
            h_u_min: 0.0,
            violations: vec![],
        };
        let small = point(base);
        let large = point(ArrayChoice { n_sx: 6, ..base });
        assert_eq!(small.ranking(&large), Ordering::Less);
        let mut infeasible = point(base);
        infeasible.feasible = false;
        assert_eq!(large.ranking(&infeasible), Ordering::Less);
    }

    #[test]
    fn looser_target_never_shrinks_feasible_set() {
        let (geom, hops, mut opts) = setup(4_000);
        let base = ArrayChoice::from_hops(&hops);
        let space = uav_space(base, &[8, 12, 16], &[12, 18], &[8_500.0, 9_500.0, 10_500.0]);
        opts.prune_axis_order = false;
        let feasible_set = |opts: &OptimizerOptions| -> Vec<(ArrayChoice, u64)> {
            let (points, _) = search(&space, &geom, &hops, opts, false).unwrap();
            let mut f: Vec<_> = points
                .iter()
                .filter(|d| d.feasible)
                .map(|d| (d.arrays, d.l_sc_m.to_bits()))
                .collect();
            f.sort();
            f
        };
        let mut previous = Vec::new();
        for target in [1e-4, 1e-3, 1e-2, 1e-1] {
            opts.p_out_target = target;
            let current = feasible_set(&opts);
            assert!(previous.iter().all(|p| current.contains(p)), "target {target}");
            previous = current;
        }
        assert!(!previous.is_empty());
    }

    #[test]
    fn pruning_does_not_change_the_optimum() {
        let (geom, hops, mut opts) = setup(4_000);
        let base = ArrayChoice::from_hops(&hops);
        let space = uav_space(base, &[8, 12, 16], &[8, 12, 16, 18], &[8_000.0, 9_500.0, 11_000.0, 16_000.0]);
        opts.prune_axis_order = true;
        let pruned = optimize(&space, &geom, &hops, &opts).unwrap();
        opts.prune_axis_order = false;
        let full = optimize(&space, &geom, &hops, &opts).unwrap();
        assert_eq!(pruned.best, full.best);
        assert!(pruned.pruned.iter().any(|p| p.rule == PruneRule::AxisOrder));
        assert!(pruned.pruned.iter().any(|p| p.rule == PruneRule::LdDominated));
        assert!(pruned.best.arrays.n_usy >= pruned.best.arrays.n_usx);
        // Every skipped placement is infeasible when evaluated anyway.
        for p in pruned.pruned.iter().filter(|p| p.rule != PruneRule::AxisOrder) {
            let g = geom.with_h_u(p.h_u_m.unwrap()).with_l_sc(p.l_sc_m.unwrap());
            let f = feasibility_check(&g, &p.arrays.apply(&hops), &opts).unwrap();
            assert!(!f.feasible, "{p:?}");
        }
    }

    #[test]
    fn mirrored_probe_disables_unsound_pruning() {
        let (geom, mut hops, mut opts) = setup(4_000);
        // y jitter is smaller, but the y axis also carries a large bias, so
        // the pruned half of the space holds the optimum.
        for t in [&mut hops.cu.uav.misalignment, &mut hops.ur.uav.misalignment] {
            t.sigma_x = 0.6f64.to_radians();
            t.sigma_y = 0.5f64.to_radians();
            t.mu_x = 0.0;
            t.mu_y = 4.0f64.to_radians();
        }
        opts.p_out_target = 1.0;
        let base = ArrayChoice::from_hops(&hops);
        let space = uav_space(base, &[6, 18], &[6, 18], &[9_500.0]);
        opts.prune_axis_order = true;
        let probed = optimize(&space, &geom, &hops, &opts).unwrap();
        opts.prune_axis_order = false;
        let full = optimize(&space, &geom, &hops, &opts).unwrap();
        assert_eq!(probed.best, full.best);
        assert!(probed.axis_pruning_disabled);
    }

    #[test]
    fn infeasible_space_reports_closest() {
        let (geom, hops, mut opts) = setup(2_000);
        opts.gamma_th = 1e6;
        let base = ArrayChoice::from_hops(&hops);
        let err = optimize(&uav_space(base, &[8, 12], &[18], &[9_500.0]), &geom, &hops, &opts).unwrap_err();
        let Error::NoFeasibleDesign(report) = err else { panic!("{err:?}") };
        assert_eq!(report.evaluated, 2);
        assert_eq!(report.violation_counts["outage"], 2);
        assert!(report.closest.is_some());
    }

    #[test]
    fn min_height_violation_is_reported() {
        let (geom, hops, opts) = setup(2_000);
        let low = geom.with_h_u(1_000.0);
        let f = feasibility_check(&low, &hops, &opts).unwrap();
        assert!(f.violations.iter().any(|v| v.name() == "min_height"));
        assert!(!f.feasible);
    }

    #[test]
    fn array_choices_are_sorted_and_tied() {
        let (_, hops, _) = setup(2_000);
        let base = ArrayChoice::from_hops(&hops);
        let space = uav_space(base, &[12, 8], &[18, 10], &[9_500.0]);
        let choices = space.array_choices();
        assert_eq!(choices.len(), 4);
        assert!(choices.windows(2).all(|w| w[0] < w[1]));
        assert!(choices.iter().all(|c| c.n_udx == c.n_usx && c.n_udy == c.n_usy));
        assert_eq!(base.swapped_uav().swapped_uav(), base);
    }

    fn curve(xs: &[f64], su: &[f64], du: &[f64]) -> Result<SweepCurve> {
        let est = |mean| EstimatorResult {
            mean,
            std_error: 0.0,
            n_samples: 1,
            seed: 0,
        };
        let points = xs
            .iter()
            .zip(su.iter().zip(du))
            .map(|(&x, (&s, &d))| SweepPoint {
                x,
                l_s: x,
                l_d: x,
                c_su: est(s),
                c_du: est(d),
                c_e2e: est(s.min(d)),
                p_out_su: 0.0,
                p_out_du: 0.0,
                p_out_e2e: 0.0,
                path_avg: None,
                feasible: None,
            })
            .collect();
        SweepCurve::new(Abscissa::Ls, points)
    }

    #[test]
    fn sweep_curve_helpers() {
        let c = curve(&[0.0, 1.0, 2.0, 3.0], &[4.0, 3.0, 2.0, 1.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(c.crossing(), Some(1.5));
        assert!(matches!(c.argmax_e2e(), Some(x) if x == 1.0 || x == 2.0));
        let flat = curve(&[0.0, 0.5, 2.0], &[3.0; 3], &[3.0; 3]).unwrap();
        assert_eq!(flat.trapezoid_mean(), 3.0);
        assert!(curve(&[0.0, 0.0], &[1.0; 2], &[1.0; 2]).is_err());
    }

    #[test]
    fn ls_sweep_is_monotone_per_hop() {
        let (geom, hops, opts) = setup(3_000);
        let grid: Vec<f64> = (0..12).map(|i| 5_000.0 + 800.0 * i as f64).collect();
        let c = sweep_vs_ls(&geom, &hops, &grid, opts.gamma_th, None, &opts.mc).unwrap();
        assert!(c.points.windows(2).all(|w| w[1].c_su.mean < w[0].c_su.mean));
        assert!(c.points.windows(2).all(|w| w[1].c_du.mean > w[0].c_du.mean));
        let crossing = c.crossing().unwrap();
        let argmax = c.argmax_e2e().unwrap();
        let step = c.points[1].x - c.points[0].x;
        assert!((crossing - argmax).abs() <= 1.5 * step);
    }

    #[test]
    fn element_sweep_rejects_wrong_axis() {
        let (geom, hops, opts) = setup(2_000);
        assert!(sweep_vs_elements(&geom, &hops, Abscissa::Ls, &[8], &opts).is_err());
    }
}
