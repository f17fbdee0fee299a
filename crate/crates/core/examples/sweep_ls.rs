//! Per-hop and end-to-end capacity as the orbit moves along the CN–RA line.
//! The end-to-end capacity peaks near where the two hop curves cross.

use uav_backhaul::config::{uniform_grid, ScenarioConfig};
use uav_backhaul::optimizer::sweep_vs_ls;

fn main() -> uav_backhaul::Result<()> {
    let cfg = ScenarioConfig::default();
    let mut mc = cfg.mc();
    mc.samples = 20_000;
    let grid = uniform_grid(4_000.0, 15_000.0, 500.0);
    let curve = sweep_vs_ls(&cfg.geometry()?, &cfg.hops()?, &grid, cfg.gamma_th(), Some(61), &mc)?;

    println!("{:>7} {:>8} {:>8} {:>8} {:>9}", "L_s m", "C_su", "C_du", "C_e2e", "orbit avg");
    for p in &curve.points {
        let avg = p.path_avg.map_or(f64::NAN, |c| c.mean);
        println!("{:>7.0} {:>8.4} {:>8.4} {:>8.4} {:>9.4}", p.x, p.c_su.mean, p.c_du.mean, p.c_e2e.mean, avg);
    }
    println!("\ncrossing  {:?}", curve.crossing());
    println!("best C_e2e at {:?}", curve.argmax_e2e());
    println!("best orbit average at {:?}", curve.argmax_path_avg());
    Ok(())
}
