//! Monte Carlo check of the analytic error probabilities.
//!
//! Every trial draws M single-mode homodyne outcomes, each N(√η·q̄, λ_η²),
//! sums them and applies the threshold. Trials are cut into fixed-size
//! chunks; chunk `k` under hypothesis `u` reads ChaCha8 stream `2k + u` of
//! the seed, so results do not depend on how chunks are spread over threads.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::probe::{mode_statistic, BinaryLossScenario, DisplacedSqueezedProbe};

/// Trials per independently seeded chunk.
pub const CHUNK_TRIALS: u64 = 1 << 14;

/// Agreement band, in standard errors.
pub const VALIDATION_SIGMAS: f64 = 4.0;

/// Empirical probability with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub p_hat: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

impl McEstimate {
    fn from_count(hits: u64, trials: u64, seed: u64) -> Self {
        let p_hat = hits as f64 / trials as f64;
        McEstimate {
            p_hat,
            stderr: (p_hat * (1.0 - p_hat) / trials as f64).sqrt(),
            trials,
            seed,
        }
    }

    /// (p̂ - p)/stderr. With no hits or no misses p̂(1-p̂) vanishes, and the
    /// binomial error of the analytic `p` is used instead.
    pub fn z_score(&self, p: f64) -> f64 {
        let se = if self.stderr > 0.0 {
            self.stderr
        } else {
            (p * (1.0 - p) / self.trials as f64).sqrt()
        };
        if se > 0.0 {
            (self.p_hat - p) / se
        } else if self.p_hat == p {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn agrees_with(&self, p: f64) -> bool {
        self.z_score(p).abs() <= VALIDATION_SIGMAS
    }
}

/// Mean and variance of the simulated summed statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleMoments {
    pub count: u64,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    #[serde(skip)]
    m2: f64,
}

impl SampleMoments {
    fn empty() -> Self {
        SampleMoments {
            count: 0,
            mean: 0.0,
            variance: 0.0,
            m2: 0.0,
        }
    }

    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: SampleMoments) -> SampleMoments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let n = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / n as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.count as f64 * other.count as f64) / n as f64;
        SampleMoments {
            count: n,
            mean,
            variance: 0.0,
            m2,
        }
    }

    fn finish(mut self) -> Self {
        if self.count > 1 {
            self.variance = self.m2 / (self.count - 1) as f64;
        }
        self
    }

    /// Standard error of the sample mean.
    pub fn mean_stderr(&self) -> f64 {
        (self.variance / self.count as f64).sqrt()
    }

    /// Standard error of the sample variance for Gaussian data.
    pub fn variance_stderr(&self) -> f64 {
        self.variance * (2.0 / (self.count as f64 - 1.0)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McErrorEstimates {
    /// Fraction of H₀ trials with z > t.
    pub false_alarm: McEstimate,
    /// Fraction of H₁ trials with z <= t.
    pub missed_detection: McEstimate,
    pub h0_moments: SampleMoments,
    pub h1_moments: SampleMoments,
}

/// Box–Muller pairs; both outputs are used, no rejection step.
struct GaussianSource {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianSource {
    fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        GaussianSource { rng, spare: None }
    }

    fn standard(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.rng.gen::<f64>();
        let u2: f64 = self.rng.gen();
        let radius = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        self.spare = Some(radius * s);
        radius * c
    }
}

#[derive(Clone, Copy)]
struct ModeLaw {
    mean: f64,
    sd: f64,
}

struct ChunkTally {
    hits: u64,
    moments: SampleMoments,
}

fn run_chunk(
    law: ModeLaw,
    modes: u64,
    threshold: f64,
    trials: u64,
    seed: u64,
    stream: u64,
    error_above: bool,
) -> ChunkTally {
    let mut source = GaussianSource::new(seed, stream);
    let mut tally = ChunkTally {
        hits: 0,
        moments: SampleMoments::empty(),
    };
    for _ in 0..trials {
        let mut z = 0.0;
        for _ in 0..modes {
            z += law.mean + law.sd * source.standard();
        }
        let above = z > threshold;
        if above == error_above {
            tally.hits += 1;
        }
        tally.moments.push(z);
    }
    tally
}

fn simulate_hypothesis(
    law: ModeLaw,
    modes: u64,
    threshold: f64,
    trials: u64,
    seed: u64,
    hypothesis: u64,
) -> (u64, SampleMoments) {
    let chunks = trials.div_ceil(CHUNK_TRIALS);
    let tallies: Vec<ChunkTally> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let n = CHUNK_TRIALS.min(trials - k * CHUNK_TRIALS);
            run_chunk(law, modes, threshold, n, seed, 2 * k + hypothesis, hypothesis == 0)
        })
        .collect();
    tallies.into_iter().fold((0, SampleMoments::empty()), |(hits, m), t| {
        (hits + t.hits, m.merge(t.moments))
    })
}

/// Estimates p_FA and p_MD of the threshold test by direct sampling.
/// Deterministic for a given `seed`; `M` must be a whole number here.
pub fn simulate_error_probabilities(
    probe: &DisplacedSqueezedProbe,
    scenario: &BinaryLossScenario,
    threshold: f64,
    trials: u64,
    seed: u64,
) -> Result<McErrorEstimates> {
    if trials == 0 {
        return Err(domain("trials", 0.0, "at least one trial"));
    }
    if !threshold.is_finite() {
        return Err(domain("t", threshold, "a finite threshold"));
    }
    let m = scenario.modes();
    if m.fract() != 0.0 {
        return Err(domain("M", m, "a whole number of modes"));
    }
    let n_b = scenario.background();
    let law = |eta: f64| -> Result<ModeLaw> {
        let s = mode_statistic(probe, eta, n_b)?;
        Ok(ModeLaw {
            mean: s.mean,
            sd: s.variance.sqrt(),
        })
    };
    let (fa_hits, h0) = simulate_hypothesis(law(scenario.eta0())?, m as u64, threshold, trials, seed, 0);
    let (md_hits, h1) = simulate_hypothesis(law(scenario.eta1())?, m as u64, threshold, trials, seed, 1);
    Ok(McErrorEstimates {
        false_alarm: McEstimate::from_count(fa_hits, trials, seed),
        missed_detection: McEstimate::from_count(md_hits, trials, seed),
        h0_moments: h0.finish(),
        h1_moments: h1.finish(),
    })
}
