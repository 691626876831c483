//! Random scenarios shared by the integration suites.

#![allow(dead_code)]

use rand::Rng;
use sqprobe::probe::{min_squeezing, BinaryLossScenario, DisplacedSqueezedProbe};

#[derive(Debug, Clone, Copy)]
pub struct Case {
    pub probe: DisplacedSqueezedProbe,
    pub scenario: BinaryLossScenario,
}

/// η₀ ∈ [0, 0.9], η₁ ∈ (η₀, 1], n_S ∈ [0.01, 2], n_B ∈ [0, 0.5], whole
/// M ∈ [1, 200], r ∈ [r_min(n_S), 1], equal priors.
pub fn random_case<R: Rng>(rng: &mut R) -> Case {
    let eta0 = rng.gen_range(0.0..=0.9);
    let eta1 = loop {
        let e = rng.gen_range(eta0..=1.0);
        if e > eta0 {
            break e;
        }
    };
    let n_s = rng.gen_range(0.01..=2.0);
    let n_b = rng.gen_range(0.0..=0.5);
    let modes = rng.gen_range(1..=200u32) as f64;
    let r = rng.gen_range(min_squeezing(n_s).unwrap()..=1.0);
    Case {
        probe: DisplacedSqueezedProbe::new(n_s, r).unwrap(),
        scenario: BinaryLossScenario::new(eta0, eta1, n_b, modes, 0.5).unwrap(),
    }
}

pub fn relative_error(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
