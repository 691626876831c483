// Direct sampling of the summed homodyne statistic against the closed-form
// error probabilities.

use sqprobe::discrimination::{error_probabilities, optimal_threshold};
use sqprobe::mc::simulate_error_probabilities;
use sqprobe::presets::illumination;
use sqprobe::probe::DisplacedSqueezedProbe;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let preset = illumination(20.0);
    let probe = DisplacedSqueezedProbe::new(preset.n_s, 0.98)?;
    let t = optimal_threshold(&probe, &preset.scenario).outcome.threshold;
    let exact = error_probabilities(&probe, &preset.scenario, t)?;
    let mc = simulate_error_probabilities(&probe, &preset.scenario, t, 200_000, 7)?;
    for (name, p, est) in [
        ("p_FA", exact.p_fa, mc.false_alarm),
        ("p_MD", exact.p_md, mc.missed_detection),
    ] {
        println!(
            "{name}: analytic {p:.6e}, sampled {:.6e} ± {:.1e}, z = {:+.2}",
            est.p_hat,
            est.stderr,
            est.z_score(p)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
