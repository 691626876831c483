//! Error function family and Gaussian tail probabilities.
//!
//! The bulk rational approximations are the classic SunPro ones (FreeBSD
//! `s_erf.c`), which carry the notice below. On top of them this module adds
//! a log-domain complementary error function that stays finite far past the
//! point where `erfc` underflows, and an inverse built on Newton refinement.
//!
//! ====================================================
//! Copyright (C) 1993 by Sun Microsystems, Inc. All rights reserved.
//!
//! Developed at SunPro, a Sun Microsystems, Inc. business.
//! Permission to use, copy, modify, and distribute this
//! software is freely granted, provided that this notice
//! is preserved.
//! ====================================================

#![allow(clippy::excessive_precision)]

use std::f64::consts::{FRAC_2_SQRT_PI, LN_2, PI};
use std::fmt;

use crate::error::{domain, Result};

/// Natural logarithm of a probability.
///
/// Stored as the log so that probabilities far below `f64::MIN_POSITIVE`
/// can still be compared and reported.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, serde::Serialize)]
#[serde(transparent)]
pub struct LogProb(f64);

impl LogProb {
    pub const ZERO: LogProb = LogProb(f64::NEG_INFINITY);
    pub const ONE: LogProb = LogProb(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value > 0.0 {
            return Err(domain("log probability", value, "a value <= 0"));
        }
        Ok(LogProb(value))
    }

    pub fn from_prob(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(domain("probability", p, "a value in [0, 1]"));
        }
        Ok(LogProb(p.ln()))
    }

    /// Clamps rounding excursions above zero; only for values that are
    /// mathematically known to be log-probabilities.
    pub(crate) fn saturating(value: f64) -> Self {
        LogProb(value.min(0.0))
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn log10(self) -> f64 {
        self.0 / std::f64::consts::LN_10
    }

    pub fn prob(self) -> f64 {
        self.0.exp()
    }

    /// log(w·p) for a weight w in [0, 1].
    pub fn weighted(self, weight: f64) -> Self {
        LogProb::saturating(self.0 + weight.ln())
    }

    /// log(p + q), evaluated without leaving the log domain.
    pub fn ln_add(self, other: LogProb) -> Self {
        LogProb::saturating(log_sum_exp(self.0, other.0))
    }
}

impl fmt::Display for LogProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ln {}", self.0)
    }
}

pub fn log_sum_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    hi + (lo - hi).exp().ln_1p()
}

const ERX: f64 = 8.45062911510467529297e-01;
const EFX8: f64 = 1.02703333676410069053e+00;
const PP0: f64 = 1.28379167095512558561e-01;
const PP1: f64 = -3.25042107247001499370e-01;
const PP2: f64 = -2.84817495755985104766e-02;
const PP3: f64 = -5.77027029648944159157e-03;
const PP4: f64 = -2.37630166566501626084e-05;
const QQ1: f64 = 3.97917223959155352819e-01;
const QQ2: f64 = 6.50222499887672944485e-02;
const QQ3: f64 = 5.08130628187576562776e-03;
const QQ4: f64 = 1.32494738004321644526e-04;
const QQ5: f64 = -3.96022827877536812320e-06;

const PA0: f64 = -2.36211856075265944077e-03;
const PA1: f64 = 4.14856118683748331666e-01;
const PA2: f64 = -3.72207876035701323847e-01;
const PA3: f64 = 3.18346619901161753674e-01;
const PA4: f64 = -1.10894694282396677476e-01;
const PA5: f64 = 3.54783043256182359371e-02;
const PA6: f64 = -2.16637559486879084300e-03;
const QA1: f64 = 1.06420880400844228286e-01;
const QA2: f64 = 5.40397917702171048937e-01;
const QA3: f64 = 7.18286544141962662868e-02;
const QA4: f64 = 1.26171219808761642112e-01;
const QA5: f64 = 1.36370839120290507362e-02;
const QA6: f64 = 1.19844998467991074170e-02;

const RA0: f64 = -9.86494403484714822705e-03;
const RA1: f64 = -6.93858572707181764372e-01;
const RA2: f64 = -1.05586262253232909814e+01;
const RA3: f64 = -6.23753324503260060396e+01;
const RA4: f64 = -1.62396669462573470355e+02;
const RA5: f64 = -1.84605092906711035994e+02;
const RA6: f64 = -8.12874355063065934246e+01;
const RA7: f64 = -9.81432934416914548592e+00;
const SA1: f64 = 1.96512716674392571292e+01;
const SA2: f64 = 1.37657754143519042600e+02;
const SA3: f64 = 4.34565877475229228821e+02;
const SA4: f64 = 6.45387271733267880336e+02;
const SA5: f64 = 4.29008140027567833386e+02;
const SA6: f64 = 1.08635005541779435134e+02;
const SA7: f64 = 6.57024977031928170135e+00;
const SA8: f64 = -6.04244152148580987438e-02;

const RB0: f64 = -9.86494292470009928597e-03;
const RB1: f64 = -7.99283237680523006574e-01;
const RB2: f64 = -1.77579549177547519889e+01;
const RB3: f64 = -1.60636384855821916062e+02;
const RB4: f64 = -6.37566443368389627722e+02;
const RB5: f64 = -1.02509513161107724954e+03;
const RB6: f64 = -4.83519191608651397019e+02;
const SB1: f64 = 3.03380607434824582924e+01;
const SB2: f64 = 3.25792512996573918826e+02;
const SB3: f64 = 1.53672958608443695994e+03;
const SB4: f64 = 3.19985821950859553908e+03;
const SB5: f64 = 2.55305040643316442583e+03;
const SB6: f64 = 4.74528541206955367215e+02;
const SB7: f64 = -2.24409524465858183362e+01;

/// |x| below which erf(x) = x + x·R(x²).
const SMALL: f64 = 0.84375;
/// |x| below which erfc uses the expansion about x = 1.
const NEAR_ONE: f64 = 1.25;
/// 1/0.35: switch between the two rational fits in 1/x².
const MID: f64 = 1.0 / 0.35;
/// 2⁻²⁸: below this erf(x) is linear to working precision.
const TINY: f64 = 3.725_290_298_461_914e-9;
/// Start of the asymptotic series for ln erfc.
const ASYMPTOTIC: f64 = 28.0;

/// erf(x) - x over x, for |x| < 0.84375.
fn small_ratio(x: f64) -> f64 {
    let z = x * x;
    let r = PP0 + z * (PP1 + z * (PP2 + z * (PP3 + z * PP4)));
    let s = 1.0 + z * (QQ1 + z * (QQ2 + z * (QQ3 + z * (QQ4 + z * QQ5))));
    r / s
}

/// erf(1 + s) - ERX, for |x| in [0.84375, 1.25).
fn near_one(ax: f64) -> f64 {
    let s = ax - 1.0;
    let p = PA0 + s * (PA1 + s * (PA2 + s * (PA3 + s * (PA4 + s * (PA5 + s * PA6)))));
    let q = 1.0 + s * (QA1 + s * (QA2 + s * (QA3 + s * (QA4 + s * (QA5 + s * QA6)))));
    p / q
}

/// ln(erfc(x)) for x in [1.25, 28), without forming erfc itself.
fn ln_erfc_rational(x: f64) -> f64 {
    let s = 1.0 / (x * x);
    let (r, big_s) = if x < MID {
        (
            RA0 + s * (RA1 + s * (RA2 + s * (RA3 + s * (RA4 + s * (RA5 + s * (RA6 + s * RA7)))))),
            1.0 + s * (SA1 + s * (SA2 + s * (SA3 + s * (SA4 + s * (SA5 + s * (SA6 + s * (SA7 + s * SA8))))))),
        )
    } else {
        (
            RB0 + s * (RB1 + s * (RB2 + s * (RB3 + s * (RB4 + s * (RB5 + s * RB6))))),
            1.0 + s * (SB1 + s * (SB2 + s * (SB3 + s * (SB4 + s * (SB5 + s * (SB6 + s * SB7)))))),
        )
    };
    // Split x² as z² - (z-x)(z+x) with z truncated to 32 significant bits.
    let z = f64::from_bits(x.to_bits() & 0xffff_ffff_0000_0000);
    -z * z - 0.5625 + ((z - x) * (z + x) + r / big_s) - x.ln()
}

/// ln(erfc(x)) for x >= 28 from the asymptotic expansion
/// erfc(x) ~ exp(-x²)/(x√π) · Σ (-1)^k (2k-1)!! / (2x²)^k.
fn ln_erfc_asymptotic(x: f64) -> f64 {
    let inv = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut tail = 0.0;
    for k in 1..=12 {
        term *= -((2 * k - 1) as f64) * inv;
        tail += term;
    }
    -x * x - x.ln() - 0.5 * PI.ln() + tail.ln_1p()
}

/// erfc(|x|) for 0.84375 <= |x| < 28 in the linear domain.
fn erfc_mid(ax: f64) -> f64 {
    if ax < NEAR_ONE {
        1.0 - ERX - near_one(ax)
    } else {
        ln_erfc_rational(ax).exp()
    }
}

pub(crate) fn erf_unchecked(x: f64) -> f64 {
    if x.is_nan() {
        return x;
    }
    let ax = x.abs();
    if ax < SMALL {
        if ax < TINY {
            return 0.125 * (8.0 * x + EFX8 * x);
        }
        return x + x * small_ratio(x);
    }
    let y = if ax < NEAR_ONE {
        ERX + near_one(ax)
    } else if ax < 6.0 {
        1.0 - erfc_mid(ax)
    } else {
        1.0
    };
    if x.is_sign_negative() {
        -y
    } else {
        y
    }
}

pub(crate) fn erfc_log_unchecked(x: f64) -> f64 {
    if x.is_nan() {
        return x;
    }
    let ax = x.abs();
    if ax < SMALL {
        return (-(x + x * small_ratio(x))).ln_1p();
    }
    if x < 0.0 {
        // erfc(x) = 2 - erfc(|x|), in [1.23, 2]
        return if ax < ASYMPTOTIC {
            (2.0 - erfc_mid(ax)).ln()
        } else {
            LN_2
        };
    }
    if x < NEAR_ONE {
        (1.0 - ERX - near_one(x)).ln()
    } else if x < ASYMPTOTIC {
        ln_erfc_rational(x)
    } else if x.is_finite() {
        ln_erfc_asymptotic(x)
    } else {
        f64::NEG_INFINITY
    }
}

fn check_finite(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(domain(name, x, "a finite value"))
    }
}

/// The error function, accurate to about one ulp.
pub fn erf(x: f64) -> Result<f64> {
    check_finite("x", x)?;
    Ok(erf_unchecked(x))
}

/// ln(erfc(x)). Finite for every finite `x`: ln erfc(200) ≈ -40005.87.
pub fn erfc_log(x: f64) -> Result<f64> {
    check_finite("x", x)?;
    Ok(erfc_log_unchecked(x))
}

/// erfc(x) = exp(erfc_log(x)); underflows to zero past x ≈ 26.5.
pub fn erfc(x: f64) -> Result<f64> {
    Ok(erfc_log(x)?.exp())
}

/// ln(½·erfc(x)): the upper tail probability of a standard normal at √2·x.
pub fn log_half_erfc(x: f64) -> Result<LogProb> {
    check_finite("x", x)?;
    Ok(log_half_erfc_unchecked(x))
}

pub(crate) fn log_half_erfc_unchecked(x: f64) -> LogProb {
    LogProb::saturating(erfc_log_unchecked(x) - LN_2)
}

/// Central-region initial guess for erf⁻¹, good to a few parts in 10⁷.
/// `w` is -ln((1-y)(1+y)).
fn inverse_erf_guess(y: f64, w: f64) -> f64 {
    let p = if w < 5.0 {
        let w = w - 2.5;
        let mut p = 2.810_226_36e-08;
        p = 3.432_739_39e-07 + p * w;
        p = -3.523_387_7e-06 + p * w;
        p = -4.391_506_54e-06 + p * w;
        p = 0.000_218_580_87 + p * w;
        p = -0.001_253_725_03 + p * w;
        p = -0.004_177_681_64 + p * w;
        p = 0.246_640_727 + p * w;
        1.501_409_41 + p * w
    } else {
        let w = w.sqrt() - 3.0;
        let mut p = -0.000_200_214_257;
        p = 0.000_100_950_558 + p * w;
        p = 0.001_349_343_22 + p * w;
        p = -0.003_673_428_44 + p * w;
        p = 0.005_739_507_73 + p * w;
        p = -0.007_622_461_3 + p * w;
        p = 0.009_438_870_47 + p * w;
        p = 1.001_674_06 + p * w;
        2.832_976_82 + p * w
    };
    p * y
}

/// Solves erfc(x) = q for q in (0, 1], returning x >= 0.
fn inverse_erfc_upper(q: f64) -> f64 {
    if q == 1.0 {
        return 0.0;
    }
    let ln_q = q.ln();
    let w = -(q * (2.0 - q)).ln();
    let mut x = if w < 36.0 {
        inverse_erf_guess(1.0 - q, w)
    } else {
        // erfc(x) ≈ exp(-x²)/(x√π) with x ≈ √(-ln q)
        (-ln_q - 0.5 * (-PI * ln_q).ln()).sqrt()
    };
    // Newton on ln erfc(x) - ln q, which is smooth and nearly quadratic.
    for _ in 0..60 {
        let g = erfc_log_unchecked(x);
        let slope = -FRAC_2_SQRT_PI * (-x * x - g).exp();
        let step = (g - ln_q) / slope;
        let next = (x - step).max(0.0);
        let done = (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-300);
        x = next;
        if done {
            break;
        }
    }
    x
}

/// Inverse of erfc on (0, 2).
pub fn inverse_erfc(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 2.0) {
        return Err(domain("q", q, "a value in (0, 2)"));
    }
    Ok(if q <= 1.0 {
        inverse_erfc_upper(q)
    } else {
        -inverse_erfc_upper(2.0 - q)
    })
}

/// Inverse error function on (-1, 1), with |erf(x) - y| <= 1e-12.
pub fn inverse_erf(y: f64) -> Result<f64> {
    if !(y > -1.0 && y < 1.0) {
        return Err(domain("y", y, "a value in (-1, 1)"));
    }
    let ay = y.abs();
    let x = if ay <= 0.5 {
        let w = -((1.0 - ay) * (1.0 + ay)).ln();
        let mut x = inverse_erf_guess(ay, w);
        for _ in 0..3 {
            let slope = FRAC_2_SQRT_PI * (-x * x).exp();
            x -= (erf_unchecked(x) - ay) / slope;
        }
        x
    } else {
        // 1 - |y| is exact here
        inverse_erfc_upper(1.0 - ay)
    };
    Ok(if y.is_sign_negative() { -x } else { x })
}

fn check_variance(variance: f64) -> Result<()> {
    if variance > 0.0 && variance.is_finite() {
        Ok(())
    } else {
        Err(domain("variance", variance, "a finite value > 0"))
    }
}

/// P(X <= x) for X ~ N(mean, variance), i.e. ½(1 + erf((x - mean)/√(2·variance))).
pub fn gaussian_cdf(x: f64, mean: f64, variance: f64) -> Result<f64> {
    check_variance(variance)?;
    check_finite("mean", mean)?;
    if x.is_nan() {
        return Err(domain("x", x, "a number"));
    }
    let z = (x - mean) / (2.0 * variance).sqrt();
    Ok(0.5 * erfc_log_unchecked(-z).exp())
}

/// Density of N(mean, variance) at x.
pub fn gaussian_pdf(x: f64, mean: f64, variance: f64) -> Result<f64> {
    check_variance(variance)?;
    let d = x - mean;
    Ok((-d * d / (2.0 * variance)).exp() / (2.0 * PI * variance).sqrt())
}
