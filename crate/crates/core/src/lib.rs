//! Link-level simulation and design optimisation of a fixed-wing UAV relay
//! for millimetre-wave backhaul.
//!
//! A central node (CN) on the ground reaches a remote access point (RA)
//! through a UAV flying a circular orbit between them. Each hop uses uniform
//! planar arrays on both ends whose beams are perturbed by random pointing
//! errors. The crate estimates per-hop and end-to-end capacity and outage by
//! Monte Carlo, finds maximum link lengths under an outage target and
//! searches array sizes and placements for the best feasible design.
//!
//! Modules, bottom up:
//!
//! - [`atmosphere`]: free-space loss and oxygen / water-vapour absorption
//! - [`geometry`]: orbit, link lengths and elevation angles
//! - [`antenna`]: element pattern, array factor and composite gain
//! - [`link`]: per-hop SNR and decode-and-forward combining
//! - [`montecarlo`]: reproducible ensembles, capacity and outage estimators
//! - [`optimizer`]: feasibility, grid search and parameter sweeps
//! - [`config`] and [`commands`]: scenario files and the command-line runs

// Negated comparisons are deliberate: they reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod antenna;
pub mod atmosphere;
pub mod commands;
pub mod config;
pub mod error;
pub mod geometry;
pub mod link;
pub mod montecarlo;
pub mod optimizer;

pub use error::{Error, Result};
