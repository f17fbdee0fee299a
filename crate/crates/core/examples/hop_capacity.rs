//! Ergodic capacity and outage of each hop for one UAV position, estimated
//! by Monte Carlo over the pointing errors.

use uav_backhaul::config::ScenarioConfig;
use uav_backhaul::montecarlo::{HopEnsemble, McSettings};

fn main() -> uav_backhaul::Result<()> {
    let cfg = ScenarioConfig::default();
    let geom = cfg.geometry()?;
    let hops = cfg.hops()?;
    let mc = McSettings::new(50_000, cfg.montecarlo.seed);
    let gamma_th = cfg.gamma_th();

    // Closest approach to the CN.
    let p = geom.point(std::f64::consts::PI)?;
    for (hop, l, psi) in [(&hops.cu, p.l_s, p.psi_s), (&hops.ur, p.l_d, p.psi_d)] {
        let ensemble = HopEnsemble::draw(hop, &mc)?;
        let scale = hop.snr_scale(l, psi)?;
        let c = ensemble.capacity(scale, mc.unit);
        let out = ensemble.outage(scale, gamma_th);
        println!(
            "{}: L = {l:.0} m  C = {:.4} ± {:.4} bit/s/Hz  P_out = {:.2e} ± {:.1e}",
            hop.side.label(),
            c.mean,
            c.std_error,
            out.probability,
            out.std_error()
        );
    }
    Ok(())
}
