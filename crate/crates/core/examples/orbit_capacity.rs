//! Capacity of both hops around the orbit and the orbit-averaged end-to-end
//! capacity of the decode-and-forward relay.

use uav_backhaul::config::ScenarioConfig;
use uav_backhaul::optimizer::sweep_vs_flight_angle;

fn main() -> uav_backhaul::Result<()> {
    let cfg = ScenarioConfig::default();
    let mut mc = cfg.mc();
    mc.samples = 20_000;
    let (curve, path) = sweep_vs_flight_angle(&cfg.geometry()?, &cfg.hops()?, 37, cfg.gamma_th(), &mc)?;

    println!("{:>7} {:>8} {:>8} {:>8}", "theta°", "C_su", "C_du", "C_e2e");
    for p in curve.points.iter().step_by(3) {
        println!(
            "{:>7.1} {:>8.4} {:>8.4} {:>8.4}",
            p.x.to_degrees(),
            p.c_su.mean,
            p.c_du.mean,
            p.c_e2e.mean
        );
    }
    println!("\norbit average: {:.4} ± {:.4} bit/s/Hz", path.e2e.mean, path.e2e.std_error);
    println!("average of the per-sample minimum: {:.4}", path.avg_of_min.mean);
    if let Some(theta) = curve.crossing() {
        println!("hops balance at theta = {:.1}°", theta.to_degrees());
    }
    Ok(())
}
