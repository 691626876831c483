// Optimal squeezing for target detection as the number of modes grows.
// The optimum stays below a tenth of a dB.

use sqprobe::discrimination::sweep_modes;
use sqprobe::presets::illumination;
use sqprobe::search::logspace;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let preset = illumination(1.0);
    let modes = logspace(1.0, 1000.0, 7);
    println!("{:>8}  {:>10}  {:>14}  {:>14}", "M", "dB", "p_err opt", "p_err coh");
    for o in sweep_modes(preset.n_s, &preset.scenario, &modes)? {
        println!(
            "{:>8.1}  {:>10.6}  {:>14.8e}  {:>14.8e}",
            o.modes,
            o.squeezing_db(),
            o.outcome.p_err,
            o.coherent_baseline.p_err
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
