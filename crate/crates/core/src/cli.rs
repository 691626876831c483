//! The `sqprobe` command line: figure sweeps, ROC curves, the receiver noise
//! budget and Monte Carlo validation, each reading a scenario file and
//! writing CSV or JSON.

use std::io::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::discrimination::{
    error_probabilities, optimal_threshold, optimize_squeezing, roc_curve, sweep_modes, OptimizationResult, RocCurve,
    RocSqueezing, TestOutcome,
};
use crate::error::{Error, ErrorKind, Result};
use crate::mc::{simulate_error_probabilities, VALIDATION_SIGMAS};
use crate::probe::{summed_statistic, DisplacedSqueezedProbe};
use crate::receiver::{background_photons, collection_parameter};
use crate::scenario::{Format, Scenario};
use crate::search::{linspace, logspace};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    /// Bad flags, unreadable or invalid scenario file.
    pub const VALIDATION: i32 = 2;
    /// An input passed validation but fell outside a numerical domain.
    pub const NUMERICAL: i32 = 3;
    /// Monte Carlo and analytic values disagreed beyond the band.
    pub const MC_FAILURE: i32 = 4;
}

/// Fewest trials `mc-validate` accepts.
pub const MIN_MC_TRIALS: u64 = 10_000;

#[derive(Debug, Parser)]
#[command(
    name = "sqprobe",
    version,
    about = "Displaced-squeezed probes for thermal-loss channel discrimination"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Scenario file (TOML).
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,

    /// Output format; overrides the scenario's [output] format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,

    /// Output file; overrides the scenario's [output] path. Default: stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Monte Carlo seed.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Collection parameter and background photons of the scenario's receiver.
    Noise,
    /// Optimal squeezing and error probability against M (target detection).
    Fig1 {
        /// Mode counts: "1,2,5", "log:1:1000:30" or "lin:10:500:50".
        #[arg(long)]
        m_grid: Option<ModeGrid>,
    },
    /// Optimized and coherent error probability against M (reading).
    Fig2 {
        /// Mode counts: "1,2,5", "log:1:1000:30" or "lin:10:500:50".
        #[arg(long)]
        m_grid: Option<ModeGrid>,
    },
    /// Missed detection against false alarm at fixed M.
    Roc {
        #[arg(long)]
        m: Option<u64>,
        #[arg(long, default_value_t = 1e-6)]
        pfa_min: f64,
        #[arg(long, default_value_t = 0.5)]
        pfa_max: f64,
        #[arg(long, default_value_t = 50)]
        pfa_points: usize,
    },
    /// Compare analytic error probabilities with direct sampling.
    McValidate {
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long)]
        m: Option<u64>,
    },
}

/// Whole mode counts, strictly ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeGrid(pub Vec<u64>);

impl FromStr for ModeGrid {
    type Err = String;

    /// Log and linear grids are rounded to integers and deduplicated.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let bad = || format!("invalid mode grid {s:?}: expected \"1,2,5\", \"log:LO:HI:N\" or \"lin:LO:HI:N\"");
        let spaced = |parts: &[&str], log: bool| -> std::result::Result<Vec<u64>, String> {
            let [lo, hi, n] = parts else { return Err(bad()) };
            let lo: f64 = lo.parse().map_err(|_| bad())?;
            let hi: f64 = hi.parse().map_err(|_| bad())?;
            let n: usize = n.parse().map_err(|_| bad())?;
            if !(lo >= 1.0 && hi >= lo && n >= 1 && hi.is_finite()) {
                return Err(bad());
            }
            let points = if log { logspace(lo, hi, n) } else { linspace(lo, hi, n) };
            let mut grid: Vec<u64> = points.into_iter().map(|m| m.round() as u64).collect();
            grid.dedup();
            Ok(grid)
        };
        let grid = if let Some(rest) = s.strip_prefix("log:") {
            spaced(&rest.split(':').collect::<Vec<_>>(), true)?
        } else if let Some(rest) = s.strip_prefix("lin:") {
            spaced(&rest.split(':').collect::<Vec<_>>(), false)?
        } else {
            s.split(',')
                .map(|v| v.trim().parse::<u64>().map_err(|_| bad()))
                .collect::<std::result::Result<Vec<_>, _>>()?
        };
        if grid.is_empty() || grid[0] == 0 || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(format!(
                "invalid mode grid {s:?}: counts must be >= 1 and strictly ascending"
            ));
        }
        Ok(ModeGrid(grid))
    }
}

/// Rows that render as a CSV table or a JSON array.
pub trait Table: Serialize {
    const HEADER: &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

pub fn render<T: Table>(rows: &[T], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = T::HEADER.join(",");
            out.push('\n');
            for row in rows {
                out.push_str(&row.fields().join(","));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let mut out = serde_json::to_string_pretty(rows).expect("rows serialize");
            out.push('\n');
            out
        }
    }
}

/// 9 significant digits.
fn prob(p: f64) -> String {
    format!("{p:.8e}")
}

/// Shortest representation that parses back to the same f64.
fn exact(x: f64) -> String {
    format!("{x:e}")
}

fn opt_field(x: Option<f64>, f: fn(f64) -> String) -> String {
    x.map(f).unwrap_or_default()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseReport {
    /// Γ_R in nm·s·sr·m², 6 significant digits.
    #[serde(rename = "gamma_R")]
    pub gamma_r: f64,
    /// n_B in photons per mode, 6 significant digits.
    #[serde(rename = "n_B")]
    pub n_b: f64,
}

impl Table for NoiseReport {
    const HEADER: &'static [&'static str] = &["gamma_R", "n_B"];
    fn fields(&self) -> Vec<String> {
        vec![format!("{:.5e}", self.gamma_r), format!("{:.5e}", self.n_b)]
    }
}

fn six_digits(x: f64) -> f64 {
    format!("{x:.5e}").parse().expect("formatted float parses")
}

pub fn noise(scenario: &Scenario) -> Result<NoiseReport> {
    let cfg = scenario
        .receiver()
        .ok_or_else(|| Error::Invalid("noise needs a [background.receiver] table in the scenario".into()))?;
    Ok(NoiseReport {
        gamma_r: six_digits(collection_parameter(cfg)?),
        n_b: six_digits(background_photons(cfg)?),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fig1Row {
    #[serde(rename = "M")]
    pub m: u64,
    #[serde(rename = "optimal_dB")]
    pub optimal_db: f64,
    pub p_err_opt: f64,
    pub p_err_coh: f64,
    pub r_opt: f64,
    pub t_opt: f64,
    pub t_coh: f64,
    pub log10_p_err_opt: f64,
    pub log10_p_err_coh: f64,
    pub flat: bool,
}

impl Table for Fig1Row {
    const HEADER: &'static [&'static str] = &[
        "M",
        "optimal_dB",
        "p_err_opt",
        "p_err_coh",
        "r_opt",
        "t_opt",
        "t_coh",
        "log10_p_err_opt",
        "log10_p_err_coh",
        "flat",
    ];
    fn fields(&self) -> Vec<String> {
        vec![
            self.m.to_string(),
            exact(self.optimal_db),
            prob(self.p_err_opt),
            prob(self.p_err_coh),
            exact(self.r_opt),
            exact(self.t_opt),
            exact(self.t_coh),
            self.log10_p_err_opt.to_string(),
            self.log10_p_err_coh.to_string(),
            self.flat.to_string(),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fig2Row {
    #[serde(rename = "M")]
    pub m: u64,
    pub p_err_opt: f64,
    pub p_err_coh: f64,
    #[serde(rename = "optimal_dB")]
    pub optimal_db: f64,
    /// log₁₀(p_err_coh / p_err_opt).
    pub log10_ratio: f64,
    pub r_opt: f64,
    pub t_opt: f64,
    pub t_coh: f64,
    pub log10_p_err_opt: f64,
    pub log10_p_err_coh: f64,
    pub flat: bool,
}

impl Table for Fig2Row {
    const HEADER: &'static [&'static str] = &[
        "M",
        "p_err_opt",
        "p_err_coh",
        "optimal_dB",
        "log10_ratio",
        "r_opt",
        "t_opt",
        "t_coh",
        "log10_p_err_opt",
        "log10_p_err_coh",
        "flat",
    ];
    fn fields(&self) -> Vec<String> {
        vec![
            self.m.to_string(),
            prob(self.p_err_opt),
            prob(self.p_err_coh),
            exact(self.optimal_db),
            self.log10_ratio.to_string(),
            exact(self.r_opt),
            exact(self.t_opt),
            exact(self.t_coh),
            self.log10_p_err_opt.to_string(),
            self.log10_p_err_coh.to_string(),
            self.flat.to_string(),
        ]
    }
}

fn mode_sweep(scenario: &Scenario, grid: Option<&ModeGrid>) -> Result<Vec<OptimizationResult>> {
    let modes: Vec<u64> = match grid {
        Some(g) => g.0.clone(),
        None => scenario
            .mode_grid()
            .ok_or_else(|| Error::Invalid("no mode grid: pass --m-grid or set test.m / test.m_grid".into()))?,
    };
    let modes: Vec<f64> = modes.into_iter().map(|m| m as f64).collect();
    let template = scenario.binary_scenario(modes[0])?;
    sweep_modes(scenario.signal_photons()?, &template, &modes)
}

pub fn fig1(scenario: &Scenario, grid: Option<&ModeGrid>) -> Result<Vec<Fig1Row>> {
    Ok(mode_sweep(scenario, grid)?
        .iter()
        .map(|o| Fig1Row {
            m: o.modes as u64,
            optimal_db: o.squeezing_db(),
            p_err_opt: o.outcome.p_err,
            p_err_coh: o.coherent_baseline.p_err,
            r_opt: o.r_star,
            t_opt: o.t_star,
            t_coh: o.coherent_baseline.threshold,
            log10_p_err_opt: o.outcome.log_p_err.log10(),
            log10_p_err_coh: o.coherent_baseline.log_p_err.log10(),
            flat: o.flat,
        })
        .collect())
}

pub fn fig2(scenario: &Scenario, grid: Option<&ModeGrid>) -> Result<Vec<Fig2Row>> {
    Ok(mode_sweep(scenario, grid)?
        .iter()
        .map(|o| Fig2Row {
            m: o.modes as u64,
            p_err_opt: o.outcome.p_err,
            p_err_coh: o.coherent_baseline.p_err,
            optimal_db: o.squeezing_db(),
            log10_ratio: o.log10_advantage(),
            r_opt: o.r_star,
            t_opt: o.t_star,
            t_coh: o.coherent_baseline.threshold,
            log10_p_err_opt: o.outcome.log_p_err.log10(),
            log10_p_err_coh: o.coherent_baseline.log_p_err.log10(),
            flat: o.flat,
        })
        .collect())
}

/// One ROC grid point. Missing values mark a threshold that came out
/// non-finite on that curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RocRow {
    #[serde(rename = "p_FA")]
    pub p_fa: f64,
    #[serde(rename = "p_MD_opt")]
    pub p_md_opt: Option<f64>,
    #[serde(rename = "p_MD_coh")]
    pub p_md_coh: Option<f64>,
    pub t_opt: Option<f64>,
    pub r_opt: Option<f64>,
    pub t_coh: Option<f64>,
    #[serde(rename = "log10_p_MD_opt")]
    pub log10_p_md_opt: Option<f64>,
    #[serde(rename = "log10_p_MD_coh")]
    pub log10_p_md_coh: Option<f64>,
    pub status: RocStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RocStatus {
    Ok,
    UnreachableOpt,
    UnreachableCoh,
    Unreachable,
}

impl RocStatus {
    fn as_str(self) -> &'static str {
        match self {
            RocStatus::Ok => "ok",
            RocStatus::UnreachableOpt => "unreachable_opt",
            RocStatus::UnreachableCoh => "unreachable_coh",
            RocStatus::Unreachable => "unreachable",
        }
    }
}

impl Table for RocRow {
    const HEADER: &'static [&'static str] = &[
        "p_FA",
        "p_MD_opt",
        "p_MD_coh",
        "t_opt",
        "r_opt",
        "t_coh",
        "log10_p_MD_opt",
        "log10_p_MD_coh",
        "status",
    ];
    fn fields(&self) -> Vec<String> {
        vec![
            exact(self.p_fa),
            opt_field(self.p_md_opt, prob),
            opt_field(self.p_md_coh, prob),
            opt_field(self.t_opt, exact),
            opt_field(self.r_opt, exact),
            opt_field(self.t_coh, exact),
            opt_field(self.log10_p_md_opt, |x| x.to_string()),
            opt_field(self.log10_p_md_coh, |x| x.to_string()),
            self.status.as_str().to_string(),
        ]
    }
}

fn lookup(curve: &RocCurve, target: f64) -> Option<(f64, TestOutcome)> {
    curve
        .points
        .iter()
        .find(|p| p.target_p_fa == target)
        .map(|p| (p.r, p.outcome))
}

fn single_mode_count(scenario: &Scenario, flag: Option<u64>) -> Result<u64> {
    let m = match flag {
        Some(m) => m,
        None => match scenario.mode_grid().as_deref() {
            Some([m]) => *m,
            Some(_) => {
                return Err(Error::Invalid(
                    "test.m_grid has several entries; pass --m or set test.m".into(),
                ))
            }
            None => return Err(Error::Invalid("no mode count: pass --m or set test.m".into())),
        },
    };
    if m == 0 {
        return Err(Error::Invalid("mode count must be >= 1".into()));
    }
    Ok(m)
}

/// Per-point optimized curve (or the scenario's fixed r) against the
/// coherent curve, on a log-spaced p_FA grid.
pub fn roc(scenario: &Scenario, m: u64, pfa_min: f64, pfa_max: f64, points: usize) -> Result<Vec<RocRow>> {
    if points == 0 {
        return Err(Error::Invalid("--pfa-points must be >= 1".into()));
    }
    let grid = logspace(pfa_min, pfa_max, points);
    let n_s = scenario.signal_photons()?;
    let channels = scenario.binary_scenario(m as f64)?;
    let squeezing = match scenario.fixed_r {
        Some(r) => RocSqueezing::Fixed(r),
        None => RocSqueezing::Optimized,
    };
    let optimized = roc_curve(n_s, &channels, &grid, squeezing)?;
    let coherent = roc_curve(n_s, &channels, &grid, RocSqueezing::Fixed(1.0))?;
    Ok(grid
        .iter()
        .map(|&target| {
            let opt = lookup(&optimized, target);
            let coh = lookup(&coherent, target);
            let status = match (opt.is_some(), coh.is_some()) {
                (true, true) => RocStatus::Ok,
                (false, true) => RocStatus::UnreachableOpt,
                (true, false) => RocStatus::UnreachableCoh,
                (false, false) => RocStatus::Unreachable,
            };
            RocRow {
                p_fa: target,
                p_md_opt: opt.map(|(_, o)| o.p_md),
                p_md_coh: coh.map(|(_, o)| o.p_md),
                t_opt: opt.map(|(_, o)| o.threshold),
                r_opt: opt.map(|(r, _)| r),
                t_coh: coh.map(|(_, o)| o.threshold),
                log10_p_md_opt: opt.map(|(_, o)| o.log_p_md.log10()),
                log10_p_md_coh: coh.map(|(_, o)| o.log_p_md.log10()),
                status,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McRow {
    pub quantity: &'static str,
    pub analytic: f64,
    pub monte_carlo: f64,
    pub stderr: f64,
    pub z: f64,
    pub pass: bool,
    #[serde(rename = "M")]
    pub m: u64,
    pub r: f64,
    pub t: f64,
    pub trials: u64,
    pub seed: u64,
}

impl Table for McRow {
    const HEADER: &'static [&'static str] = &[
        "quantity",
        "analytic",
        "monte_carlo",
        "stderr",
        "z",
        "pass",
        "M",
        "r",
        "t",
        "trials",
        "seed",
    ];
    fn fields(&self) -> Vec<String> {
        vec![
            self.quantity.to_string(),
            prob(self.analytic),
            prob(self.monte_carlo),
            prob(self.stderr),
            format!("{:.4}", self.z),
            self.pass.to_string(),
            self.m.to_string(),
            exact(self.r),
            exact(self.t),
            self.trials.to_string(),
            self.seed.to_string(),
        ]
    }
}

/// Samples the test at the scenario's fixed r (or the optimized r when
/// none is given) and its optimal threshold. Rows cover p_FA, p_MD and the
/// mean and variance of the summed statistic under each hypothesis.
pub fn mc_validate(scenario: &Scenario, m: u64, trials: u64, seed: u64) -> Result<Vec<McRow>> {
    if trials < MIN_MC_TRIALS {
        return Err(Error::Invalid(format!(
            "trials = {trials}: mc-validate needs at least {MIN_MC_TRIALS}"
        )));
    }
    let n_s = scenario.signal_photons()?;
    let channels = scenario.binary_scenario(m as f64)?;
    let r = match scenario.fixed_r {
        Some(r) => r,
        None => optimize_squeezing(n_s, &channels)?.r_star,
    };
    let probe = DisplacedSqueezedProbe::new(n_s, r)?;
    let t = optimal_threshold(&probe, &channels).outcome.threshold;
    let analytic = error_probabilities(&probe, &channels, t)?;
    let mc = simulate_error_probabilities(&probe, &channels, t, trials, seed)?;
    let h0 = summed_statistic(&probe, channels.eta0(), channels.background(), channels.modes())?;
    let h1 = summed_statistic(&probe, channels.eta1(), channels.background(), channels.modes())?;

    let row = |quantity, analytic: f64, monte_carlo: f64, stderr: f64, z: f64| McRow {
        quantity,
        analytic,
        monte_carlo,
        stderr,
        z,
        pass: z.abs() <= VALIDATION_SIGMAS,
        m,
        r,
        t,
        trials,
        seed,
    };
    let moment = |quantity, analytic: f64, estimate: f64, stderr: f64| {
        let z = if stderr > 0.0 {
            (estimate - analytic) / stderr
        } else {
            0.0
        };
        row(quantity, analytic, estimate, stderr, z)
    };
    let fa = mc.false_alarm;
    let md = mc.missed_detection;
    Ok(vec![
        row("p_FA", analytic.p_fa, fa.p_hat, fa.stderr, fa.z_score(analytic.p_fa)),
        row("p_MD", analytic.p_md, md.p_hat, md.stderr, md.z_score(analytic.p_md)),
        moment("mean_H0", h0.mean, mc.h0_moments.mean, mc.h0_moments.mean_stderr()),
        moment(
            "variance_H0",
            h0.variance,
            mc.h0_moments.variance,
            mc.h0_moments.variance_stderr(),
        ),
        moment("mean_H1", h1.mean, mc.h1_moments.mean, mc.h1_moments.mean_stderr()),
        moment(
            "variance_H1",
            h1.variance,
            mc.h1_moments.variance,
            mc.h1_moments.variance_stderr(),
        ),
    ])
}

/// Rendered output plus the exit code it implies.
struct Report {
    text: String,
    code: i32,
    out: Option<PathBuf>,
}

fn execute(cli: &Cli) -> Result<Report> {
    let path = cli
        .scenario
        .as_ref()
        .ok_or_else(|| Error::Invalid("--scenario <path> is required".into()))?;
    let scenario = Scenario::load(path)?;
    let format = cli.format.map(Format::from).or(scenario.format).unwrap_or(Format::Csv);
    let out = cli.out.clone().or_else(|| scenario.output_path.clone());
    let ok = |text| Report {
        text,
        code: exit::SUCCESS,
        out: out.clone(),
    };
    Ok(match &cli.command {
        Command::Noise => ok(render(&[noise(&scenario)?], format)),
        Command::Fig1 { m_grid } => ok(render(&fig1(&scenario, m_grid.as_ref())?, format)),
        Command::Fig2 { m_grid } => ok(render(&fig2(&scenario, m_grid.as_ref())?, format)),
        Command::Roc {
            m,
            pfa_min,
            pfa_max,
            pfa_points,
        } => {
            let m = single_mode_count(&scenario, *m)?;
            ok(render(&roc(&scenario, m, *pfa_min, *pfa_max, *pfa_points)?, format))
        }
        Command::McValidate { trials, m } => {
            let m = single_mode_count(&scenario, *m)?;
            let rows = mc_validate(&scenario, m, *trials, cli.seed)?;
            let code = if rows.iter().all(|r| r.pass) {
                exit::SUCCESS
            } else {
                exit::MC_FAILURE
            };
            Report {
                text: render(&rows, format),
                code,
                out,
            }
        }
    })
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    let io_error = |path: String, e: std::io::Error| Error::Io {
        path,
        message: e.to_string(),
    };
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| io_error(path.display().to_string(), e)),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| io_error("<stdout>".into(), e)),
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err.kind() {
        ErrorKind::Validation => exit::VALIDATION,
        ErrorKind::Numerical => exit::NUMERICAL,
    }
}

/// Runs a parsed command line; returns the process exit code. Errors go to
/// stderr.
pub fn run(cli: &Cli) -> i32 {
    let pool = match cli.threads {
        Some(0) => {
            eprintln!("error: --threads must be >= 1");
            return exit::VALIDATION;
        }
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    };
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return exit::NUMERICAL;
        }
    };
    let result = pool.install(|| execute(cli)).and_then(|report| {
        emit(&report.text, report.out.as_ref())?;
        Ok(report.code)
    });
    match result {
        Ok(code) => {
            if code == exit::MC_FAILURE {
                eprintln!("error: Monte Carlo estimate outside the {VALIDATION_SIGMAS}-sigma band");
            }
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Parses `args` (including the program name) and runs them.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                exit::VALIDATION
            } else {
                exit::SUCCESS
            }
        }
    }
}
