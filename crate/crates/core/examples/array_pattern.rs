//! Gain cuts of a uniform rectangular array with 3GPP elements.

use uav_backhaul::antenna::{
    composite_gain, first_null_offset, half_power_offset, pointing_from_axes, ArrayConfig, Axis, ElementPattern,
};
use uav_backhaul::atmosphere::CarrierPlan;
use uav_backhaul::link::linear_to_db;

fn main() -> uav_backhaul::Result<()> {
    let carrier = CarrierPlan::new(70.0)?;
    let k = carrier.wavenumber();
    let element = ElementPattern::default();

    for (nx, ny) in [(8, 8), (12, 18), (18, 18)] {
        let array = ArrayConfig::uniform(nx, ny, carrier.half_wavelength_m())?;
        let hpbw = |axis| half_power_offset(&array, &element, k, axis).map_or(f64::NAN, |a| 2.0 * a.to_degrees());
        let null = |axis| first_null_offset(&array, k, axis).map_or(f64::NAN, f64::to_degrees);
        println!(
            "{nx:>2}x{ny:<2} broadside {:5.2} dBi  HPBW x {:5.2}° y {:5.2}°  first null x {:5.2}° y {:5.2}°",
            linear_to_db(array.broadside_gain() * element.gain(&pointing_from_axes(0.0, 0.0)?)),
            hpbw(Axis::X),
            hpbw(Axis::Y),
            null(Axis::X),
            null(Axis::Y),
        );
    }

    let array = ArrayConfig::uniform(12, 18, carrier.half_wavelength_m())?;
    println!("\n12x18 cut along x");
    for deg in [0.0, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0] {
        let p = pointing_from_axes(f64::to_radians(deg), 0.0)?;
        println!("{deg:>5.1}°  {:7.2} dBi", linear_to_db(composite_gain(&array, &element, k, &p)));
    }
    Ok(())
}
