//! Background photons per mode seen by a free-space homodyne receiver.
//!
//! Interface units: wavelength and filter width in nanometres, sky spectral
//! radiance in W·m⁻²·nm⁻¹·sr⁻¹. The nanometres cancel between the radiance
//! and the filter width, so the only conversion is the wavelength to metres
//! inside [`background_photons`].

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Planck constant, J·s (exact SI).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Speed of light, m/s (exact SI).
pub const LIGHT_SPEED: f64 = 299_792_458.0;
const METRES_PER_NM: f64 = 1e-9;

/// Exponents of kg, m, s, sr and nm (the spectral interval unit).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Dim([i8; 5]);

impl Dim {
    const fn mul(self, o: Dim) -> Dim {
        let (a, b) = (self.0, o.0);
        Dim([a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3], a[4] + b[4]])
    }

    const fn eq(self, o: Dim) -> bool {
        let (a, b) = (self.0, o.0);
        a[0] == b[0] && a[1] == b[1] && a[2] == b[2] && a[3] == b[3] && a[4] == b[4]
    }
}

const JOULE: Dim = Dim([1, 2, -2, 0, 0]);
/// W·m⁻²·nm⁻¹·sr⁻¹
const RADIANCE: Dim = Dim([1, 0, -3, -1, -1]);
/// nm·s·sr·m²
const COLLECTION: Dim = Dim([0, 2, 1, 1, 1]);

const _: () = assert!(RADIANCE.mul(COLLECTION).eq(JOULE), "B·Γ_R must be an energy");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReceiverConfig {
    /// Aperture radius a_R, metres.
    pub aperture_radius: f64,
    /// Field of view Ω_fov, steradians.
    pub fov: f64,
    /// Detector bandwidth W, hertz.
    pub bandwidth: f64,
    /// Spectral filter width Δλ, nanometres.
    pub filter: f64,
    /// Operating wavelength λ, nanometres.
    pub wavelength: f64,
    /// Sky spectral radiance B, W·m⁻²·nm⁻¹·sr⁻¹.
    pub sky_brightness: f64,
}

impl ReceiverConfig {
    /// 10 cm aperture, 3×10⁻⁶ sr field of view, 100 MHz bandwidth, 10⁻⁴ nm
    /// filter at 800 nm under cloudy sky (0.15 W·m⁻²·nm⁻¹·sr⁻¹).
    pub fn cloudy_800nm() -> Self {
        ReceiverConfig {
            aperture_radius: 0.1,
            fov: 3e-6,
            bandwidth: 100e6,
            filter: 1e-4,
            wavelength: 800.0,
            sky_brightness: 0.15,
        }
    }

    /// All geometry fields must be strictly positive; a dark sky (B = 0) is
    /// allowed and yields no background.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("aperture_radius", self.aperture_radius),
            ("fov", self.fov),
            ("bandwidth", self.bandwidth),
            ("filter", self.filter),
            ("wavelength", self.wavelength),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(domain(name, value, "a finite value > 0"));
            }
        }
        if !(self.sky_brightness >= 0.0 && self.sky_brightness.is_finite()) {
            return Err(domain("sky_brightness", self.sky_brightness, "a finite value >= 0"));
        }
        Ok(())
    }
}

/// Photon collection parameter Γ_R = Δλ·W⁻¹·Ω_fov·a_R², in nm·s·sr·m².
pub fn collection_parameter(cfg: &ReceiverConfig) -> Result<f64> {
    cfg.validate()?;
    Ok(cfg.filter / cfg.bandwidth * cfg.fov * cfg.aperture_radius * cfg.aperture_radius)
}

/// Mean thermal photons per mode, n_B = (πλ/hc)·B·Γ_R.
pub fn background_photons(cfg: &ReceiverConfig) -> Result<f64> {
    let gamma = collection_parameter(cfg)?;
    let energy = cfg.sky_brightness * gamma;
    let photon_energy = PLANCK * LIGHT_SPEED / (cfg.wavelength * METRES_PER_NM);
    Ok(std::f64::consts::PI * energy / photon_energy)
}
