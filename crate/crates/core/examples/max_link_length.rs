//! Longest link each hop supports at the outage target, compared with the
//! longest link the orbit actually demands.

use uav_backhaul::config::ScenarioConfig;
use uav_backhaul::montecarlo::{max_link_length, ElevationModel};

fn main() -> uav_backhaul::Result<()> {
    let cfg = ScenarioConfig::default();
    let geom = cfg.geometry()?;
    let hops = cfg.hops()?;
    let mut mc = cfg.mc();
    mc.samples = 50_000;
    let elevation = ElevationModel::FixedAltitude(geom.h_u);
    for (hop, needed) in [(&hops.cu, geom.max_path_l_s()), (&hops.ur, geom.max_path_l_d())] {
        let l_max = max_link_length(hop, cfg.gamma_th(), cfg.link.p_out_target, elevation, cfg.length_bounds(), &mc)?;
        println!("{}: supports {l_max:.0} m, orbit needs {needed:.0} m", hop.side.label());
    }
    Ok(())
}
