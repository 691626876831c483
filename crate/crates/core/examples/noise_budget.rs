// Background photons per mode for a lidar receiver under cloudy sky, and
// how they scale with aperture and sky brightness.

use sqprobe::receiver::{background_photons, collection_parameter, ReceiverConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ReceiverConfig::cloudy_800nm();
    println!("Γ_R = {:.5e} nm·s·sr·m²", collection_parameter(&cfg)?);
    println!("n_B = {:.5e} photons/mode", background_photons(&cfg)?);

    for radius in [0.05, 0.1, 0.2, 0.5] {
        let n_b = background_photons(&ReceiverConfig {
            aperture_radius: radius,
            ..cfg
        })?;
        println!("  a_R = {radius:>4} m  ->  n_B = {n_b:.4e}");
    }

    let dark = ReceiverConfig {
        sky_brightness: 0.0,
        ..cfg
    };
    println!("dark sky: n_B = {}", background_photons(&dark)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
