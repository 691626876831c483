// Reading a memory cell: mean error probability of the optimized and the
// coherent probe, and the advantage in decades.

use sqprobe::discrimination::sweep_modes;
use sqprobe::presets::reading;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let preset = reading(1.0);
    let modes = [10.0, 50.0, 100.0, 500.0, 2000.0, 10000.0];
    for o in sweep_modes(preset.n_s, &preset.scenario, &modes)? {
        println!(
            "M = {:>6}: {:.3} dB, p_err {:.4e} vs {:.4e}, log10 ratio {:.4}",
            o.modes,
            o.squeezing_db(),
            o.outcome.p_err,
            o.coherent_baseline.p_err,
            o.log10_advantage()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
