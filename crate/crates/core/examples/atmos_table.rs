//! Sea-level gaseous attenuation over the mmWave band, and how much of it a
//! slanted link actually sees compared with a horizontal one.
//!
//! ```text
//! cargo run --example atmos_table
//! ```

use uav_backhaul::atmosphere::{oxygen_attn_sea_level, water_attn_sea_level, AtmosphereParams};

fn main() -> uav_backhaul::Result<()> {
    let atm = AtmosphereParams::default();
    println!("{:>6} {:>10} {:>10} {:>10}", "f/GHz", "O2 dB/km", "H2O dB/km", "total");
    for f in [10.0, 28.0, 38.0, 50.0, 57.0, 60.0, 63.0, 70.0, 80.0, 94.0] {
        let ox = oxygen_attn_sea_level(f)?;
        let wa = water_attn_sea_level(f, atm.rho0)?;
        println!("{f:>6.1} {ox:>10.4} {wa:>10.4} {:>10.4}", ox + wa);
    }

    // A 10 km link climbing to 3 km altitude at 70 GHz.
    let (l_km, h_km): (f64, f64) = (10.0, 3.0);
    let psi = (h_km / l_km).asin();
    let slant = atm.slant_attn_total(70.0, 0.0, h_km, psi)?;
    let flat = atm.sea_level_attn(70.0)? * l_km;
    println!("\n70 GHz, {l_km} km to {h_km} km altitude: slant {slant:.3} dB, horizontal {flat:.3} dB");
    Ok(())
}
