//! Worst-case end-to-end outage on the orbit as the orbit centre slides
//! between the two ground terminals.

use uav_backhaul::config::ScenarioConfig;
use uav_backhaul::montecarlo::worst_case_path_outage;

fn main() -> uav_backhaul::Result<()> {
    let cfg = ScenarioConfig::default();
    let geom = cfg.geometry()?;
    let hops = cfg.hops()?;
    let mut mc = cfg.mc();
    mc.samples = 50_000;
    let target = cfg.link.p_out_target;
    for l_sc in (0..=8).map(|i| 7_500.0 + 500.0 * i as f64) {
        let out = worst_case_path_outage(&geom.with_l_sc(l_sc), &hops, cfg.gamma_th(), &mc)?;
        let mark = if out.probability < target { "ok" } else { "" };
        println!("L_sc {l_sc:>7.0} m  worst P_out {:.3e}  {mark}", out.probability);
    }
    Ok(())
}
