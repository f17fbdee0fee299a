//! Orbit-averaged capacity versus the UAV array size along x.
//!
//! Larger arrays give more gain but narrower beams, so under strong pointing
//! jitter the capacity stops growing and the outage constraint eventually
//! fails. Uses the -76 dBm noise scenario shipped in `scenarios/`.

use uav_backhaul::config::load_config;
use uav_backhaul::optimizer::{sweep_vs_elements, Abscissa};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/calibrated_noise.toml");
    let mut cfg = load_config(path)?;
    cfg.montecarlo.samples = 20_000;
    let counts = [4, 8, 12, 16, 18, 22, 26, 30];
    let curve = sweep_vs_elements(
        &cfg.geometry()?,
        &cfg.hops()?,
        Abscissa::NUqx,
        &counts,
        &cfg.optimizer_options(),
    )?;
    for p in &curve.points {
        println!(
            "N_uqx {:>2}: C = {:.4}  worst P_out {:.2e}  feasible {}",
            p.x,
            p.path_avg.map_or(f64::NAN, |c| c.mean),
            p.p_out_e2e,
            p.feasible.unwrap_or(false)
        );
    }
    Ok(())
}
