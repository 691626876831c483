//! Reference configurations: lidar target detection and optical reading.

use crate::probe::BinaryLossScenario;
use crate::receiver::{background_photons, ReceiverConfig};

/// A photon budget together with the channels it probes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub n_s: f64,
    pub scenario: BinaryLossScenario,
}

/// n_B ≈ 5.69×10⁻² from [`ReceiverConfig::cloudy_800nm`].
pub fn cloudy_background() -> f64 {
    background_photons(&ReceiverConfig::cloudy_800nm()).expect("preset receiver is valid")
}

/// Target detection: η = 0 against η = 0.2, n_S = 0.1.
pub fn illumination(modes: f64) -> Preset {
    Preset {
        n_s: 0.1,
        scenario: BinaryLossScenario::target_detection(0.2, cloudy_background(), modes)
            .expect("preset scenario is valid"),
    }
}

/// Reading a two-reflectivity cell: η₀ = 0.9 against η₁ = 0.98, n_S = 1.
pub fn reading(modes: f64) -> Preset {
    Preset {
        n_s: 1.0,
        scenario: BinaryLossScenario::symmetric(0.9, 0.98, cloudy_background(), modes)
            .expect("preset scenario is valid"),
    }
}
