//! Threshold test on the summed homodyne record: error probabilities,
//! optimal threshold, squeezing optimization at fixed photon number, and
//! ROC curves.
//!
//! The test decides H₁ when z > t. With Ω_u = erf[(t - z̄_u)/√(M(2n_B + 1 - η_u(1-r)))],
//! p_FA = ½(1 - Ω₀) and p_MD = ½(1 + Ω₁). Both are evaluated as ½·erfc(·)
//! in the log domain, so nothing underflows however many modes are summed.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::gaussmath::{inverse_erfc, log_half_erfc_unchecked, LogProb};
use crate::probe::{
    doubled_mode_variance, min_squeezing, squeezing_db, squeezing_from_db, summed_mean, BinaryLossScenario,
    DisplacedSqueezedProbe,
};
use crate::search::{linspace, scan_then_refine, Tolerance};

/// Points in the coarse squeezing scan, uniform in dB.
pub const SQUEEZING_SCAN_POINTS: usize = 200;
/// Relative bracket width at which squeezing refinement stops.
pub const SQUEEZING_REL_TOL: f64 = 1e-10;
/// Optimized and coherent error probabilities closer than this (relative)
/// are reported as no squeezing advantage.
pub const TIE_REL_TOL: f64 = 1e-14;

/// Error probabilities of the test at one threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestOutcome {
    pub threshold: f64,
    pub p_fa: f64,
    pub p_md: f64,
    pub p_err: f64,
    pub log_p_fa: LogProb,
    pub log_p_md: LogProb,
    pub log_p_err: LogProb,
}

impl TestOutcome {
    fn from_logs(threshold: f64, log_p_fa: LogProb, log_p_md: LogProb, prior0: f64) -> Self {
        let log_p_err = log_p_fa.weighted(prior0).ln_add(log_p_md.weighted(1.0 - prior0));
        TestOutcome {
            threshold,
            p_fa: log_p_fa.prob(),
            p_md: log_p_md.prob(),
            p_err: log_p_err.prob(),
            log_p_fa,
            log_p_md,
            log_p_err,
        }
    }
}

/// The pair of Gaussians P₀(z), P₁(z) for a given probe and scenario.
/// `scale_u` is √(M(2n_B + 1 - η_u(1-r))) = √(2σ_u²).
#[derive(Debug, Clone, Copy)]
struct Hypotheses {
    mean0: f64,
    scale0: f64,
    mean1: f64,
    scale1: f64,
    prior0: f64,
}

impl Hypotheses {
    fn new(probe: &DisplacedSqueezedProbe, scenario: &BinaryLossScenario) -> Self {
        let m = scenario.modes();
        let r = probe.squeezing();
        let n_b = scenario.background();
        Hypotheses {
            mean0: summed_mean(probe, scenario.eta0(), m),
            scale0: (m * doubled_mode_variance(r, scenario.eta0(), n_b)).sqrt(),
            mean1: summed_mean(probe, scenario.eta1(), m),
            scale1: (m * doubled_mode_variance(r, scenario.eta1(), n_b)).sqrt(),
            prior0: scenario.prior0(),
        }
    }

    fn variance0(&self) -> f64 {
        self.scale0 * self.scale0 / 2.0
    }

    fn variance1(&self) -> f64 {
        self.scale1 * self.scale1 / 2.0
    }

    fn log_p_fa(&self, t: f64) -> LogProb {
        log_half_erfc_unchecked((t - self.mean0) / self.scale0)
    }

    fn log_p_md(&self, t: f64) -> LogProb {
        log_half_erfc_unchecked(-((t - self.mean1) / self.scale1))
    }

    fn outcome(&self, t: f64) -> TestOutcome {
        if self.identical() {
            return self.identical_outcome(t);
        }
        TestOutcome::from_logs(t, self.log_p_fa(t), self.log_p_md(t), self.prior0)
    }

    /// With P₀ = P₁, p_MD = 1 - p_FA. The smaller of the two comes from
    /// erfc and the larger is its complement, so the identity holds to
    /// rounding and p_err = π₁ + (π₀ - π₁)p_FA is exactly ½ for equal priors.
    fn identical_outcome(&self, t: f64) -> TestOutcome {
        let complement = |small: LogProb| LogProb::saturating((-small.prob()).ln_1p());
        let (log_p_fa, log_p_md) = if t >= self.mean0 {
            let fa = self.log_p_fa(t);
            (fa, complement(fa))
        } else {
            let md = self.log_p_md(t);
            (complement(md), md)
        };
        let mut generic = TestOutcome::from_logs(t, log_p_fa, log_p_md, self.prior0);
        if t >= self.mean0 {
            generic.p_md = 1.0 - generic.p_fa;
        } else {
            generic.p_fa = 1.0 - generic.p_md;
        }
        let prior1 = 1.0 - self.prior0;
        let p_err = prior1 + (self.prior0 - prior1) * generic.p_fa;
        if p_err < 0.5 * self.prior0.max(prior1) {
            return generic;
        }
        TestOutcome {
            p_err,
            log_p_err: LogProb::saturating(p_err.ln()),
            ..generic
        }
    }

    fn log_p_err(&self, t: f64) -> f64 {
        self.outcome(t).log_p_err.ln()
    }

    fn identical(&self) -> bool {
        self.mean0 == self.mean1 && self.scale0 == self.scale1
    }
}

fn check_threshold(t: f64) -> Result<()> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(domain("t", t, "a finite threshold"))
    }
}

/// p_FA, p_MD and p_err of the test "decide H₁ iff z > t".
pub fn error_probabilities(
    probe: &DisplacedSqueezedProbe,
    scenario: &BinaryLossScenario,
    t: f64,
) -> Result<TestOutcome> {
    check_threshold(t)?;
    Ok(Hypotheses::new(probe, scenario).outcome(t))
}

/// Target-detection form (η₀ = 0) of the false-alarm and miss probabilities:
/// p_FA = ½{1 - erf[t/√(M(2n_B+1))]},
/// p_MD = ½{1 + erf[(t - M√(2η(n_S - f_r)))/√(M(2n_B + 1 - η(1-r)))]}.
///
/// Returned as (ln p_FA, ln p_MD). Kept separate from [`error_probabilities`]
/// so the two can be checked against each other.
pub fn target_detection_error_probabilities(
    probe: &DisplacedSqueezedProbe,
    eta: f64,
    n_b: f64,
    modes: f64,
    t: f64,
) -> Result<(LogProb, LogProb)> {
    check_threshold(t)?;
    crate::probe::summed_statistic(probe, eta, n_b, modes)?;
    let r = probe.squeezing();
    let p_fa = log_half_erfc_unchecked(t / (modes * (2.0 * n_b + 1.0)).sqrt());
    let mean1 = modes * (2.0 * eta * probe.displacement_photons()).sqrt();
    let scale1 = (modes * (2.0 * n_b + 1.0 - eta * (1.0 - r))).sqrt();
    let p_md = log_half_erfc_unchecked(-((t - mean1) / scale1));
    Ok((p_fa, p_md))
}

/// How [`optimal_threshold`] arrived at its answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMethod {
    /// Root of the density-equality quadratic.
    ClosedForm,
    /// Grid scan plus golden-section search over the threshold.
    Bracketed,
    /// Both hypotheses give the same distribution of z.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalThreshold {
    pub outcome: TestOutcome,
    pub method: ThresholdMethod,
}

/// Closed-form optimal threshold.
///
/// Setting π₀P₀(t) = π₁P₁(t) gives
/// (σ₀² - σ₁²)t² - 2(z̄₁σ₀² - z̄₀σ₁²)t + z̄₁²σ₀² - z̄₀²σ₁² - Kσ₀²σ₁² = 0,
/// K = 2 ln(π₁/π₀) + ln(σ₀²/σ₁²). Since σ₀² ≥ σ₁² always, p_err has its
/// local minimum at the smaller root. That root is taken as C/q, the form
/// that stays accurate when the leading coefficient vanishes.
fn closed_form_threshold(h: &Hypotheses, scenario: &BinaryLossScenario, r: f64) -> Option<f64> {
    let v0 = h.variance0();
    let v1 = h.variance1();
    // σ₀² - σ₁² = (M/2)(η₁ - η₀)(1 - r), formed without cancellation
    let a = 0.5 * scenario.modes() * (scenario.eta1() - scenario.eta0()) * (1.0 - r);
    let prior_term = 2.0 * (scenario.prior1().ln() - scenario.prior0().ln());
    let k = prior_term + (a / v1).ln_1p();
    let b = -2.0 * (h.mean1 * v0 - h.mean0 * v1);
    let c = h.mean1 * h.mean1 * v0 - h.mean0 * h.mean0 * v1 - k * v0 * v1;
    let root = if a == 0.0 {
        -c / b
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return None;
        }
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        let (r1, r2) = (q / a, c / q);
        if r1.is_finite() && r2.is_finite() {
            r1.min(r2)
        } else if r2.is_finite() {
            r2
        } else {
            r1
        }
    };
    root.is_finite().then_some(root)
}

fn bracketed_threshold_of(h: &Hypotheses) -> TestOutcome {
    let lo = h.mean0 - 10.0 * h.variance0().sqrt();
    let hi = h.mean1 + 10.0 * h.variance1().sqrt();
    let scale = h.scale0.max(h.scale1);
    let tol = Tolerance {
        rel: 1e-13,
        abs: 1e-13 * scale,
    };
    let (best, _) = scan_then_refine(|t| h.log_p_err(t), &linspace(lo, hi, 65), tol);
    h.outcome(best.x)
}

/// Threshold minimizing p_err by direct search over
/// [z̄₀ - 10σ₀, z̄₁ + 10σ₁]; the independent check on the closed form.
pub fn bracketed_threshold(probe: &DisplacedSqueezedProbe, scenario: &BinaryLossScenario) -> TestOutcome {
    bracketed_threshold_of(&Hypotheses::new(probe, scenario))
}

/// Threshold minimizing the prior-weighted error probability.
pub fn optimal_threshold(probe: &DisplacedSqueezedProbe, scenario: &BinaryLossScenario) -> OptimalThreshold {
    let h = Hypotheses::new(probe, scenario);
    if h.identical() {
        return OptimalThreshold {
            outcome: h.outcome(h.mean0),
            method: ThresholdMethod::Degenerate,
        };
    }
    match closed_form_threshold(&h, scenario, probe.squeezing()) {
        Some(t) => OptimalThreshold {
            outcome: h.outcome(t),
            method: ThresholdMethod::ClosedForm,
        },
        None => OptimalThreshold {
            outcome: bracketed_threshold_of(&h),
            method: ThresholdMethod::Bracketed,
        },
    }
}

/// Densities π₀P₀(t) and π₁P₁(t) at `t`; equal at an interior optimum.
pub fn weighted_densities(probe: &DisplacedSqueezedProbe, scenario: &BinaryLossScenario, t: f64) -> (f64, f64) {
    let h = Hypotheses::new(probe, scenario);
    let density = |mean: f64, variance: f64| {
        let d = t - mean;
        (-d * d / (2.0 * variance)).exp() / (2.0 * std::f64::consts::PI * variance).sqrt()
    };
    (
        h.prior0 * density(h.mean0, h.variance0()),
        (1.0 - h.prior0) * density(h.mean1, h.variance1()),
    )
}

/// Squeezing and threshold that minimize p_err at a fixed photon number,
/// alongside the coherent-state result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizationResult {
    pub modes: f64,
    pub r_star: f64,
    pub t_star: f64,
    pub outcome: TestOutcome,
    pub coherent_baseline: TestOutcome,
    /// p_err did not vary across the scan to machine precision.
    pub flat: bool,
}

impl OptimizationResult {
    pub fn squeezing_db(&self) -> f64 {
        squeezing_db(self.r_star)
    }

    /// log₁₀(p_err coherent / p_err optimized), from the log fields.
    pub fn log10_advantage(&self) -> f64 {
        self.coherent_baseline.log_p_err.log10() - self.outcome.log_p_err.log10()
    }
}

fn check_budget(n_s: f64) -> Result<()> {
    if n_s > 0.0 && n_s.is_finite() {
        Ok(())
    } else {
        Err(domain("n_S", n_s, "a finite value > 0"))
    }
}

/// Scan grid over r ∈ [r_min, 1], uniform in dB, starting at r = 1.
fn squeezing_grid(n_s: f64) -> Result<Vec<f64>> {
    let r_min = min_squeezing(n_s)?;
    let mut grid: Vec<f64> = linspace(0.0, squeezing_db(r_min), SQUEEZING_SCAN_POINTS)
        .into_iter()
        .map(squeezing_from_db)
        .collect();
    grid[0] = 1.0;
    *grid.last_mut().expect("non-empty grid") = r_min;
    Ok(grid)
}

/// Minimizes `objective(r)` over the squeezing grid for `n_s`. Returns the
/// winning r and whether the objective was flat across the scan.
fn optimize_over_squeezing<F: Fn(f64) -> f64>(n_s: f64, objective: F) -> Result<(f64, bool)> {
    let grid = squeezing_grid(n_s)?;
    let tol = Tolerance {
        rel: SQUEEZING_REL_TOL,
        abs: 0.0,
    };
    let (best, values) = scan_then_refine(&objective, &grid, tol);
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    let flat = hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs());
    if flat {
        return Ok((1.0, true));
    }
    let coherent = values[0];
    if (best.value - coherent).abs() <= TIE_REL_TOL {
        return Ok((1.0, false));
    }
    Ok((best.x, false))
}

/// Probe at squeezing `r` for budget `n_s`; `r` comes from the feasible
/// grid, so a budget error here is a bug.
fn probe_at(n_s: f64, r: f64) -> DisplacedSqueezedProbe {
    DisplacedSqueezedProbe::new(n_s, r).expect("squeezing grid stays within the photon budget")
}

/// Minimizes p_err over r ∈ [r_min(n_S), 1], re-optimizing the threshold at
/// every r. The comparison runs on ln p_err.
pub fn optimize_squeezing(n_s: f64, scenario: &BinaryLossScenario) -> Result<OptimizationResult> {
    check_budget(n_s)?;
    let objective = |r: f64| optimal_threshold(&probe_at(n_s, r), scenario).outcome.log_p_err.ln();
    let (r_star, flat) = optimize_over_squeezing(n_s, objective)?;
    let coherent_baseline = optimal_threshold(&DisplacedSqueezedProbe::coherent(n_s)?, scenario).outcome;
    let outcome = if r_star == 1.0 {
        coherent_baseline
    } else {
        optimal_threshold(&probe_at(n_s, r_star), scenario).outcome
    };
    Ok(OptimizationResult {
        modes: scenario.modes(),
        r_star,
        t_star: outcome.threshold,
        outcome,
        coherent_baseline,
        flat,
    })
}

/// One optimization per entry of `modes`, in the given order.
pub fn sweep_modes(n_s: f64, template: &BinaryLossScenario, modes: &[f64]) -> Result<Vec<OptimizationResult>> {
    if let Some(&bad) = modes.iter().find(|&&m| !(m >= 1.0 && m.is_finite())) {
        return Err(domain("M", bad, "a finite value >= 1"));
    }
    if let Some(pair) = modes.windows(2).find(|w| w[1] <= w[0]) {
        return Err(domain("M", pair[1], "strictly ascending mode counts"));
    }
    modes
        .par_iter()
        .map(|&m| optimize_squeezing(n_s, &template.with_modes(m)?))
        .collect()
}

/// Threshold at which the false-alarm probability equals `p_fa` exactly:
/// t = z̄₀ + √(M(2n_B + 1 - η₀(1-r)))·erfc⁻¹(2p_FA).
pub fn threshold_for_false_alarm(
    probe: &DisplacedSqueezedProbe,
    scenario: &BinaryLossScenario,
    p_fa: f64,
) -> Result<f64> {
    if !(p_fa > 0.0 && p_fa < 1.0) {
        return Err(domain("p_FA", p_fa, "a value in (0, 1)"));
    }
    let h = Hypotheses::new(probe, scenario);
    Ok(h.mean0 + h.scale0 * inverse_erfc(2.0 * p_fa)?)
}

/// Squeezing used along a ROC curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RocSqueezing {
    /// One r for every point (r = 1 gives the coherent curve).
    Fixed(f64),
    /// r chosen per point to minimize p_MD at that p_FA.
    Optimized,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RocPoint {
    pub target_p_fa: f64,
    pub r: f64,
    pub outcome: TestOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    /// Targets whose threshold came out non-finite.
    pub unreachable: Vec<f64>,
}

fn roc_point(
    n_s: f64,
    scenario: &BinaryLossScenario,
    target: f64,
    squeezing: RocSqueezing,
) -> Result<Option<RocPoint>> {
    let evaluate = |probe: &DisplacedSqueezedProbe| -> Result<Option<TestOutcome>> {
        let t = threshold_for_false_alarm(probe, scenario, target)?;
        Ok(t.is_finite().then(|| Hypotheses::new(probe, scenario).outcome(t)))
    };
    let r = match squeezing {
        RocSqueezing::Fixed(r) => r,
        RocSqueezing::Optimized => {
            let objective = |r: f64| match evaluate(&probe_at(n_s, r)) {
                Ok(Some(o)) => o.log_p_md.ln(),
                _ => f64::INFINITY,
            };
            optimize_over_squeezing(n_s, objective)?.0
        }
    };
    let probe = DisplacedSqueezedProbe::new(n_s, r)?;
    Ok(evaluate(&probe)?.map(|outcome| RocPoint {
        target_p_fa: target,
        r,
        outcome,
    }))
}

/// ROC curve: p_MD at each target false-alarm probability in `grid`.
pub fn roc_curve(n_s: f64, scenario: &BinaryLossScenario, grid: &[f64], squeezing: RocSqueezing) -> Result<RocCurve> {
    check_budget(n_s)?;
    if let Some(&bad) = grid.iter().find(|&&p| !(p > 0.0 && p < 1.0)) {
        return Err(domain("p_FA", bad, "a value in (0, 1)"));
    }
    if let Some(pair) = grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(domain("p_FA", pair[1], "a strictly increasing grid"));
    }
    if let RocSqueezing::Fixed(r) = squeezing {
        DisplacedSqueezedProbe::new(n_s, r)?;
    }
    let results: Vec<Option<RocPoint>> = grid
        .par_iter()
        .map(|&p| roc_point(n_s, scenario, p, squeezing))
        .collect::<Result<_>>()?;
    let mut curve = RocCurve {
        points: Vec::with_capacity(grid.len()),
        unreachable: Vec::new(),
    };
    for (target, point) in grid.iter().zip(results) {
        match point {
            Some(p) => curve.points.push(p),
            None => curve.unreachable.push(*target),
        }
    }
    Ok(curve)
}
