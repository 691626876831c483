// Error probabilities of the homodyne threshold test for one probe, and
// the threshold that minimizes their prior-weighted sum.

use sqprobe::discrimination::{error_probabilities, optimal_threshold};
use sqprobe::presets::illumination;
use sqprobe::probe::{summed_statistic, DisplacedSqueezedProbe};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let preset = illumination(100.0);
    let scenario = preset.scenario;
    let probe = DisplacedSqueezedProbe::new(preset.n_s, 0.98)?;

    for (label, eta) in [("H0", scenario.eta0()), ("H1", scenario.eta1())] {
        let s = summed_statistic(&probe, eta, scenario.background(), scenario.modes())?;
        println!("{label}: z ~ N({:.6}, {:.6})", s.mean, s.variance);
    }

    for t in [0.0, 5.0, 10.0, 15.0, 20.0] {
        let o = error_probabilities(&probe, &scenario, t)?;
        println!(
            "t = {t:>4}: p_FA = {:.6e}  p_MD = {:.6e}  p_err = {:.6e}",
            o.p_fa, o.p_md, o.p_err
        );
    }

    let best = optimal_threshold(&probe, &scenario);
    println!(
        "optimal t = {:.9} ({:?}), p_err = {:.9e}",
        best.outcome.threshold, best.method, best.outcome.p_err
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
