//! Photon budget of displaced-squeezed probes and the Gaussian statistics
//! of the summed homodyne record after a thermal-loss channel.
//!
//! Quadrature conventions: vacuum variance is 1/2, the probe covariance is
//! ½·diag(r, 1/r) with position squeezing `r ∈ (0, 1]`, and the displacement
//! α is real and lies along the squeezed quadrature.

use serde::Serialize;

use crate::error::{domain, Error, Result};

/// Relative slack allowed when checking n_S ≥ f(r), so that r = r_min(n_S)
/// survives its own rounding.
const BUDGET_SLACK: f64 = 1e-12;

/// Mean photons spent on squeezing, f(r) = (r + 1/r - 2)/4.
///
/// Evaluated as (1-r)²/(4r), which has no cancellation near r = 1.
pub fn squeezing_photons(r: f64) -> Result<f64> {
    check_squeezing(r)?;
    Ok(squeezing_photons_unchecked(r))
}

pub(crate) fn squeezing_photons_unchecked(r: f64) -> f64 {
    let d = 1.0 - r;
    d * d / (4.0 * r)
}

/// Smallest admissible squeezing parameter for a budget of `n_s` photons,
/// r₋ = 2n_S + 1 - 2√(n_S(n_S+1)).
///
/// Computed through the conjugate 1/(2n_S + 1 + 2√(n_S(n_S+1))), which is the
/// same number without the subtraction.
pub fn min_squeezing(n_s: f64) -> Result<f64> {
    if !(n_s >= 0.0 && n_s.is_finite()) {
        return Err(domain("n_S", n_s, "a finite value >= 0"));
    }
    Ok(1.0 / (2.0 * n_s + 1.0 + 2.0 * (n_s * (n_s + 1.0)).sqrt()))
}

/// -10·log₁₀ r.
pub fn squeezing_db(r: f64) -> f64 {
    -10.0 * r.log10()
}

/// Inverse of [`squeezing_db`].
pub fn squeezing_from_db(db: f64) -> f64 {
    10f64.powf(-db / 10.0)
}

fn check_squeezing(r: f64) -> Result<()> {
    if r > 0.0 && r <= 1.0 {
        Ok(())
    } else {
        Err(domain("r", r, "a value in (0, 1]"))
    }
}

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(domain(name, value, "a value in [0, 1]"))
    }
}

fn check_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(domain(name, value, "a finite value >= 0"))
    }
}

fn check_modes(modes: f64) -> Result<()> {
    if modes >= 1.0 && modes.is_finite() {
        Ok(())
    } else {
        Err(domain("M", modes, "a finite value >= 1"))
    }
}

/// Single-mode displaced-squeezed probe with a fixed mean photon number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DisplacedSqueezedProbe {
    n_s: f64,
    r: f64,
}

impl DisplacedSqueezedProbe {
    pub fn new(n_s: f64, r: f64) -> Result<Self> {
        check_non_negative("n_S", n_s)?;
        check_squeezing(r)?;
        let squeezing = squeezing_photons_unchecked(r);
        if n_s - squeezing < -BUDGET_SLACK * n_s.max(f64::MIN_POSITIVE) {
            return Err(Error::BudgetViolation {
                r,
                budget: n_s,
                squeezing,
            });
        }
        Ok(DisplacedSqueezedProbe { n_s, r })
    }

    /// The r = 1 probe with the same photon number.
    pub fn coherent(n_s: f64) -> Result<Self> {
        Self::new(n_s, 1.0)
    }

    /// The probe that spends its whole budget on squeezing.
    pub fn fully_squeezed(n_s: f64) -> Result<Self> {
        Self::new(n_s, min_squeezing(n_s)?)
    }

    pub fn signal_photons(&self) -> f64 {
        self.n_s
    }

    pub fn squeezing(&self) -> f64 {
        self.r
    }

    pub fn squeezing_db(&self) -> f64 {
        squeezing_db(self.r)
    }

    pub fn squeezing_photons(&self) -> f64 {
        squeezing_photons_unchecked(self.r)
    }

    /// n_A = n_S - f(r). Residues within the budget slack are rounding
    /// at r = r_min and count as zero.
    pub fn displacement_photons(&self) -> f64 {
        let n_a = self.n_s - self.squeezing_photons();
        if n_a <= BUDGET_SLACK * self.n_s {
            0.0
        } else {
            n_a
        }
    }

    /// Real displacement amplitude α = √n_A.
    pub fn amplitude(&self) -> f64 {
        self.displacement_photons().sqrt()
    }

    /// Mean and variance of one q-homodyne outcome on the bare probe.
    pub fn pre_channel_statistic(&self) -> QuadratureStatistic {
        QuadratureStatistic {
            mean: (2.0 * self.displacement_photons()).sqrt(),
            variance: self.r / 2.0,
        }
    }
}

/// Mean and variance of a single quadrature outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureStatistic {
    pub mean: f64,
    pub variance: f64,
}

/// Two thermal-loss channels to be told apart, plus the test setup.
///
/// Each channel is a beam splitter of transmissivity η fed by a thermal mode
/// with n_B/(1-η) photons, so that n_B background photons reach the receiver
/// regardless of η.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinaryLossScenario {
    eta0: f64,
    eta1: f64,
    n_b: f64,
    modes: f64,
    prior0: f64,
}

impl BinaryLossScenario {
    pub fn new(eta0: f64, eta1: f64, n_b: f64, modes: f64, prior0: f64) -> Result<Self> {
        check_unit("eta0", eta0)?;
        check_unit("eta1", eta1)?;
        if eta0 > eta1 {
            return Err(domain("eta0", eta0, "a value <= eta1"));
        }
        check_non_negative("n_B", n_b)?;
        check_modes(modes)?;
        check_unit("prior0", prior0)?;
        Ok(BinaryLossScenario {
            eta0,
            eta1,
            n_b,
            modes,
            prior0,
        })
    }

    /// Equal priors.
    pub fn symmetric(eta0: f64, eta1: f64, n_b: f64, modes: f64) -> Result<Self> {
        Self::new(eta0, eta1, n_b, modes, 0.5)
    }

    /// Target absent (η = 0) against target present with reflectivity `eta`.
    pub fn target_detection(eta: f64, n_b: f64, modes: f64) -> Result<Self> {
        Self::symmetric(0.0, eta, n_b, modes)
    }

    pub fn with_modes(&self, modes: f64) -> Result<Self> {
        check_modes(modes)?;
        Ok(BinaryLossScenario { modes, ..*self })
    }

    pub fn with_prior0(&self, prior0: f64) -> Result<Self> {
        check_unit("prior0", prior0)?;
        Ok(BinaryLossScenario { prior0, ..*self })
    }

    pub fn eta0(&self) -> f64 {
        self.eta0
    }

    pub fn eta1(&self) -> f64 {
        self.eta1
    }

    pub fn background(&self) -> f64 {
        self.n_b
    }

    pub fn modes(&self) -> f64 {
        self.modes
    }

    pub fn prior0(&self) -> f64 {
        self.prior0
    }

    pub fn prior1(&self) -> f64 {
        1.0 - self.prior0
    }

    pub fn is_degenerate(&self) -> bool {
        self.eta0 == self.eta1
    }

    /// Thermal photons at the beam-splitter input, n_B/(1-η); infinite at η = 1.
    pub fn thermal_input_noise(&self, eta: f64) -> f64 {
        self.n_b / (1.0 - eta)
    }
}

/// Mean and variance of z, the sum of M homodyne outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummedHomodyneStatistic {
    pub mean: f64,
    pub variance: f64,
}

impl SummedHomodyneStatistic {
    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// 2λ_η² = 2n_B + 1 - η(1-r): twice the single-mode quadrature variance
/// after the channel. Kept in this form because the error probabilities
/// divide by √(M·(2n_B + 1 - η(1-r))) directly.
pub(crate) fn doubled_mode_variance(r: f64, eta: f64, n_b: f64) -> f64 {
    2.0 * n_b + 1.0 - eta * (1.0 - r)
}

/// Mean of z, M·√(2η(n_S - f(r))).
pub(crate) fn summed_mean(probe: &DisplacedSqueezedProbe, eta: f64, modes: f64) -> f64 {
    modes * (2.0 * eta * probe.displacement_photons()).sqrt()
}

/// Statistic of z under a channel of transmissivity `eta`.
pub fn summed_statistic(
    probe: &DisplacedSqueezedProbe,
    eta: f64,
    n_b: f64,
    modes: f64,
) -> Result<SummedHomodyneStatistic> {
    check_unit("eta", eta)?;
    check_non_negative("n_B", n_b)?;
    check_modes(modes)?;
    Ok(SummedHomodyneStatistic {
        mean: summed_mean(probe, eta, modes),
        variance: modes * doubled_mode_variance(probe.squeezing(), eta, n_b) / 2.0,
    })
}

/// Single-mode post-channel statistic: mean √η·q̄, variance λ_η².
pub fn mode_statistic(probe: &DisplacedSqueezedProbe, eta: f64, n_b: f64) -> Result<QuadratureStatistic> {
    let s = summed_statistic(probe, eta, n_b, 1.0)?;
    Ok(QuadratureStatistic {
        mean: s.mean,
        variance: s.variance,
    })
}
