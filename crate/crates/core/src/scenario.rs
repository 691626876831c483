//! Scenario files.
//!
//! ```toml
//! schema = 1
//!
//! [probe]
//! n_s = 0.1
//! # r = 0.98            # optional fixed squeezing
//!
//! [channels]
//! eta0 = 0.0
//! eta1 = 0.2
//!
//! [background]
//! n_b = 0.058           # or a [background.receiver] table, not both
//!
//! [test]
//! m = 100               # or m_grid = [1, 10, 100]
//! prior0 = 0.5
//!
//! [output]
//! format = "csv"        # or "json"
//! path = "fig1.csv"
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;
use toml::Spanned;

use crate::error::{Error, Result};
use crate::probe::{BinaryLossScenario, DisplacedSqueezedProbe};
use crate::receiver::{background_photons, ReceiverConfig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Background {
    Photons(f64),
    Receiver(ReceiverConfig),
}

impl Background {
    pub fn photons(&self) -> Result<f64> {
        match self {
            Background::Photons(n) => Ok(*n),
            Background::Receiver(cfg) => background_photons(cfg),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Modes {
    Single(u64),
    Grid(Vec<u64>),
}

/// A loaded and validated scenario file.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub n_s: Option<f64>,
    pub fixed_r: Option<f64>,
    pub channels: Option<(f64, f64)>,
    pub background: Background,
    pub modes: Option<Modes>,
    pub prior0: f64,
    pub format: Option<Format>,
    pub output_path: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    schema: Spanned<u32>,
    probe: Option<RawProbe>,
    channels: Option<RawChannels>,
    background: RawBackground,
    test: Option<RawTest>,
    output: Option<RawOutput>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProbe {
    n_s: Spanned<f64>,
    r: Option<Spanned<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannels {
    eta0: Spanned<f64>,
    eta1: Spanned<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBackground {
    n_b: Option<Spanned<f64>>,
    receiver: Option<RawReceiver>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReceiver {
    aperture_radius: Spanned<f64>,
    fov: Spanned<f64>,
    bandwidth: Spanned<f64>,
    filter: Spanned<f64>,
    wavelength: Spanned<f64>,
    sky_brightness: Spanned<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTest {
    m: Option<Spanned<u64>>,
    m_grid: Option<Spanned<Vec<u64>>>,
    prior0: Option<Spanned<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    format: Option<Format>,
    path: Option<PathBuf>,
}

/// Maps byte offsets to 1-based line numbers for error messages.
struct Locator<'a> {
    origin: &'a str,
    text: &'a str,
}

impl Locator<'_> {
    fn line(&self, offset: usize) -> usize {
        self.text[..offset.min(self.text.len())].matches('\n').count() + 1
    }

    fn fail<T>(&self, offset: usize, key: &str, message: impl std::fmt::Display) -> Result<T> {
        Err(Error::Invalid(format!(
            "{}:{}: {key}: {message}",
            self.origin,
            self.line(offset)
        )))
    }

    /// Requires `check(value)` to pass, else reports `key` at its line.
    fn require(&self, field: &Spanned<f64>, key: &str, expected: &str, check: impl Fn(f64) -> bool) -> Result<f64> {
        let value = *field.get_ref();
        if check(value) {
            Ok(value)
        } else {
            self.fail(
                field.span().start,
                key,
                format_args!("{value} is invalid, expected {expected}"),
            )
        }
    }
}

fn positive(v: f64) -> bool {
    v > 0.0 && v.is_finite()
}

fn non_negative(v: f64) -> bool {
    v >= 0.0 && v.is_finite()
}

fn unit(v: f64) -> bool {
    (0.0..=1.0).contains(&v)
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parses scenario text; `origin` names the source in error messages.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let raw: RawFile = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| text[..s.start].matches('\n').count() + 1);
            let message = e.message().to_string();
            Error::Invalid(match line {
                Some(l) => format!("{origin}:{l}: {message}"),
                None => format!("{origin}: {message}"),
            })
        })?;
        let at = Locator { origin, text };

        if *raw.schema.get_ref() != SCHEMA_VERSION {
            return at.fail(
                raw.schema.span().start,
                "schema",
                format_args!(
                    "unsupported version {}, expected {SCHEMA_VERSION}",
                    raw.schema.get_ref()
                ),
            );
        }

        let (n_s, fixed_r) = match &raw.probe {
            Some(p) => {
                let n_s = at.require(&p.n_s, "probe.n_s", "a finite value > 0", positive)?;
                let r = match &p.r {
                    Some(r) => {
                        let value = at.require(r, "probe.r", "a value in (0, 1]", |v| v > 0.0 && v <= 1.0)?;
                        if let Err(e) = DisplacedSqueezedProbe::new(n_s, value) {
                            return at.fail(r.span().start, "probe.r", e);
                        }
                        Some(value)
                    }
                    None => None,
                };
                (Some(n_s), r)
            }
            None => (None, None),
        };

        let channels = match &raw.channels {
            Some(c) => {
                let eta0 = at.require(&c.eta0, "channels.eta0", "a value in [0, 1]", unit)?;
                let eta1 = at.require(&c.eta1, "channels.eta1", "a value in [0, 1]", unit)?;
                if eta0 > eta1 {
                    return at.fail(c.eta1.span().start, "channels.eta1", "must be >= eta0");
                }
                Some((eta0, eta1))
            }
            None => None,
        };

        let bg_start = text.find("[background").unwrap_or(0);
        let background = match &raw.background {
            RawBackground {
                n_b: Some(n_b),
                receiver: None,
            } => Background::Photons(at.require(n_b, "background.n_b", "a finite value >= 0", non_negative)?),
            RawBackground {
                n_b: None,
                receiver: Some(rx),
            } => Background::Receiver(ReceiverConfig {
                aperture_radius: at.require(
                    &rx.aperture_radius,
                    "background.receiver.aperture_radius",
                    "a finite value > 0",
                    positive,
                )?,
                fov: at.require(&rx.fov, "background.receiver.fov", "a finite value > 0", positive)?,
                bandwidth: at.require(
                    &rx.bandwidth,
                    "background.receiver.bandwidth",
                    "a finite value > 0",
                    positive,
                )?,
                filter: at.require(&rx.filter, "background.receiver.filter", "a finite value > 0", positive)?,
                wavelength: at.require(
                    &rx.wavelength,
                    "background.receiver.wavelength",
                    "a finite value > 0",
                    positive,
                )?,
                sky_brightness: at.require(
                    &rx.sky_brightness,
                    "background.receiver.sky_brightness",
                    "a finite value >= 0",
                    non_negative,
                )?,
            }),
            RawBackground {
                n_b: Some(_),
                receiver: Some(_),
            } => {
                return at.fail(
                    bg_start,
                    "background",
                    "give either n_b or [background.receiver], not both",
                )
            }
            RawBackground {
                n_b: None,
                receiver: None,
            } => {
                return at.fail(
                    bg_start,
                    "background",
                    "needs either n_b or a [background.receiver] table",
                )
            }
        };

        let mut prior0 = 0.5;
        let mut modes = None;
        if let Some(t) = &raw.test {
            if let Some(p) = &t.prior0 {
                prior0 = at.require(p, "test.prior0", "a value in [0, 1]", unit)?;
            }
            modes = match (&t.m, &t.m_grid) {
                (Some(_), Some(g)) => {
                    return at.fail(g.span().start, "test.m_grid", "give either m or m_grid, not both")
                }
                (Some(m), None) => {
                    if *m.get_ref() == 0 {
                        return at.fail(m.span().start, "test.m", "must be >= 1");
                    }
                    Some(Modes::Single(*m.get_ref()))
                }
                (None, Some(g)) => {
                    let grid = g.get_ref();
                    if grid.is_empty() || grid.contains(&0) || grid.windows(2).any(|w| w[1] <= w[0]) {
                        return at.fail(
                            g.span().start,
                            "test.m_grid",
                            "must be non-empty, >= 1 and strictly ascending",
                        );
                    }
                    Some(Modes::Grid(grid.clone()))
                }
                (None, None) => None,
            };
        }

        let (format, output_path) = match raw.output {
            Some(o) => (o.format, o.path),
            None => (None, None),
        };

        Ok(Scenario {
            n_s,
            fixed_r,
            channels,
            background,
            modes,
            prior0,
            format,
            output_path,
        })
    }

    pub fn receiver(&self) -> Option<&ReceiverConfig> {
        match &self.background {
            Background::Receiver(cfg) => Some(cfg),
            Background::Photons(_) => None,
        }
    }

    pub fn signal_photons(&self) -> Result<f64> {
        self.n_s
            .ok_or_else(|| Error::Invalid("scenario has no [probe] section (probe.n_s)".into()))
    }

    /// Channel pair at `modes` probe modes.
    pub fn binary_scenario(&self, modes: f64) -> Result<BinaryLossScenario> {
        let (eta0, eta1) = self.channels.ok_or_else(|| {
            Error::Invalid("scenario has no [channels] section (channels.eta0, channels.eta1)".into())
        })?;
        BinaryLossScenario::new(eta0, eta1, self.background.photons()?, modes, self.prior0)
    }

    /// Mode counts to sweep: the grid, or the single `m` as a one-point grid.
    pub fn mode_grid(&self) -> Option<Vec<u64>> {
        self.modes.as_ref().map(|m| match m {
            Modes::Single(m) => vec![*m],
            Modes::Grid(g) => g.clone(),
        })
    }
}
