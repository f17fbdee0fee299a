//! Link lengths and elevation angles around the circular orbit, plus the
//! lowest altitude that keeps both ground terminals above their minimum
//! elevation.

use uav_backhaul::config::ScenarioConfig;

fn main() -> uav_backhaul::Result<()> {
    let geom = ScenarioConfig::default().geometry()?;
    println!("orbit centre {} m from the CN, diameter {} m, altitude {} m", geom.l_sc, geom.l_u1, geom.h_u);
    println!("minimum altitude {:.1} m", geom.min_height()?);
    println!("{:>8} {:>9} {:>9} {:>7} {:>7}", "theta°", "L_s m", "L_d m", "psi_s°", "psi_d°");
    for p in geom.profile(13)? {
        println!(
            "{:>8.1} {:>9.1} {:>9.1} {:>7.2} {:>7.2}",
            p.theta.to_degrees(),
            p.l_s,
            p.l_d,
            p.psi_s.to_degrees(),
            p.psi_d.to_degrees()
        );
    }
    Ok(())
}
