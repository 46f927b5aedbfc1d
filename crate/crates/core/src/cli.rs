//! Command-line front end. Settings resolve as defaults, then the `--config`
//! JSON file, then flags. Exit codes: 0 all checks pass, 1 a check failed,
//! 2 bad usage or I/O.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::ergodic;
use crate::fuchsian::{self, octagon_group};
use crate::hardy::{self, BoundedHoloFn, Integrand};
use crate::mc;
use crate::report::{self, CheckReport, Value};
use crate::suites::{self, SuiteParams, SUITES};
use crate::tube::{self, DfGrid};

#[derive(Parser, Debug)]
#[command(
    name = "hyperconvex",
    version,
    about = "Numerical checks of the hyperconvex Levi-flat quotient of the bidisk"
)]
pub struct Cli {
    /// Root seed; every check derives its own stream from it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo sample count override; accepts `1e6`.
    #[arg(long, global = true, value_parser = parse_count)]
    pub samples: Option<u64>,
    /// Write the check reports as JSON to this path.
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
    /// Write the command's data table (or the reports) as CSV to this path.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// JSON file of default settings.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Print nothing on stdout.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Keep wall-clock times in reports; off by default so output is reproducible.
    #[arg(long, global = true)]
    pub timings: bool,
    /// Stdout rendering.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run named verification suites.
    Verify(VerifyArgs),
    /// Minimum Levi eigenvalue of `−δ^η` over the near-core grid per `η`.
    DfSweep(DfSweepArgs),
    /// Geodesic-flow and boundary-orbit experiments.
    Ergodic {
        #[command(subcommand)]
        mode: ErgodicMode,
    },
    /// Level-set integrals, Stokes balance and boundary trend.
    Hardy {
        #[command(subcommand)]
        mode: HardyMode,
    },
    /// Area of the fundamental domain against Gauss–Bonnet.
    Area,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// One of ma, hyperconvex, df, invariance, group, metric, stokes, charts, hardy, ergodic, all.
    #[arg(long)]
    pub suite: Option<String>,
    /// Fine Stokes grid cells per axis.
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Args, Debug)]
pub struct DfSweepArgs {
    #[arg(long, default_value_t = 0.3)]
    pub eta_min: f64,
    #[arg(long, default_value_t = 0.7)]
    pub eta_max: f64,
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
}

#[derive(Subcommand, Debug)]
pub enum ErgodicMode {
    /// Time fractions of one geodesic in area cells of the domain.
    Geodesic {
        #[arg(long, default_value_t = suites::ERGODIC_TIME)]
        time: f64,
        #[arg(long, default_value_t = suites::ERGODIC_DT)]
        dt: f64,
        /// Cell count: 2, 4, 8 or 16.
        #[arg(long, default_value_t = 8)]
        bins: usize,
    },
    /// Angle pairs of a diagonal boundary orbit on an `m×m` torus grid.
    Boundary {
        #[arg(long, default_value_t = 30)]
        length: usize,
        #[arg(long, default_value_t = 16)]
        grid: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum HardyMode {
    /// Monte Carlo level integral of `|f|²` over the level sets `M_t`.
    LevelIntegral {
        #[arg(long, default_value = "one", value_parser = parse_function)]
        f: NamedFn,
        #[arg(long, value_delimiter = ',', default_values_t = suites::HARDY_TS)]
        t: Vec<f64>,
    },
    /// Stokes balance of the level-set formula on the fixture boxes.
    Stokes {
        #[arg(long, default_value = "zw", value_parser = parse_function)]
        f: NamedFn,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Boundary trend of the gradient term as `t` grows.
    Trend {
        #[arg(long, default_value = "z", value_parser = parse_function)]
        f: NamedFn,
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.8, 1.1, 1.3, 1.55])]
        t: Vec<f64>,
    },
    /// Numeric chart pullback against the closed level density.
    Pullback {
        #[arg(long, default_value = "zw", value_parser = parse_function)]
        f: NamedFn,
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 1.4])]
        t: Vec<f64>,
    },
}

/// Keys of the `--config` file; any subset may appear.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub samples: Option<f64>,
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub quiet: Option<bool>,
    pub timings: Option<bool>,
    pub format: Option<Format>,
    pub suite: Option<String>,
    pub grid: Option<usize>,
}

/// Fully resolved settings.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub seed: u64,
    pub samples: Option<u64>,
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub quiet: bool,
    pub timings: bool,
    pub format: Format,
    pub suite: String,
    pub grid: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = SuiteParams::default();
        Self {
            seed: p.seed,
            samples: p.samples,
            json: None,
            csv: None,
            quiet: false,
            timings: false,
            format: Format::Table,
            suite: "all".into(),
            grid: p.grid,
        }
    }
}

impl RunConfig {
    pub fn resolve(cli: &Cli) -> Result<Self, String> {
        let mut cfg = Self::default();
        if let Some(path) = &cli.config {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let file: ConfigFile = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            cfg.seed = file.seed.unwrap_or(cfg.seed);
            if let Some(s) = file.samples {
                cfg.samples = Some(count_from_f64(s)?);
            }
            cfg.json = file.json.or(cfg.json);
            cfg.csv = file.csv.or(cfg.csv);
            cfg.quiet = file.quiet.unwrap_or(cfg.quiet);
            cfg.timings = file.timings.unwrap_or(cfg.timings);
            cfg.format = file.format.unwrap_or(cfg.format);
            cfg.suite = file.suite.unwrap_or(cfg.suite);
            cfg.grid = file.grid.unwrap_or(cfg.grid);
        }
        cfg.seed = cli.seed.unwrap_or(cfg.seed);
        cfg.samples = cli.samples.or(cfg.samples);
        cfg.json = cli.json.clone().or(cfg.json);
        cfg.csv = cli.csv.clone().or(cfg.csv);
        cfg.quiet |= cli.quiet;
        cfg.timings |= cli.timings;
        cfg.format = cli.format.unwrap_or(cfg.format);
        if let Command::Verify(v) = &cli.command {
            cfg.suite = v.suite.clone().unwrap_or(cfg.suite);
            cfg.grid = v.grid.unwrap_or(cfg.grid);
        }
        if cfg.grid < 2 || cfg.grid % 2 != 0 {
            return Err(format!("grid {} must be even and at least 2", cfg.grid));
        }
        Ok(cfg)
    }

    pub fn params(&self) -> SuiteParams {
        SuiteParams { seed: self.seed, samples: self.samples, grid: self.grid }
    }
}

fn count_from_f64(x: f64) -> Result<u64, String> {
    if x.is_finite() && x >= 1.0 && x.fract() == 0.0 && x <= u64::MAX as f64 {
        Ok(x as u64)
    } else {
        Err(format!("sample count {x} is not a positive integer"))
    }
}

fn parse_count(s: &str) -> Result<u64, String> {
    match s.parse::<u64>() {
        Ok(0) => Err("sample count must be positive".into()),
        Ok(n) => Ok(n),
        Err(_) => s.parse::<f64>().map_err(|e| e.to_string()).and_then(count_from_f64),
    }
}

/// A test function together with the label used in report names.
#[derive(Clone, Debug)]
pub struct NamedFn {
    pub name: &'static str,
    pub f: BoundedHoloFn,
}

/// `one`, `z`, `w`, `zw` or `z+w` (the latter as `(z+w)/4`).
pub fn parse_function(s: &str) -> Result<NamedFn, String> {
    let (name, f) = match s {
        "one" | "1" | "const" => ("one", BoundedHoloFn::one()),
        "z" => ("z", BoundedHoloFn::Z),
        "w" => ("w", BoundedHoloFn::W),
        "zw" => ("zw", BoundedHoloFn::zw()),
        "z+w" | "zpw" => ("z_plus_w_over_4", BoundedHoloFn::z_plus_w_over_4()),
        _ => return Err(format!("unknown function {s:?}; expected one, z, w, zw or z+w")),
    };
    Ok(NamedFn { name, f })
}

/// Reports plus an optional data table for `--csv`.
pub struct Outcome {
    pub reports: Vec<CheckReport>,
    pub data_csv: Option<String>,
}

impl Outcome {
    fn reports(reports: Vec<CheckReport>) -> Self {
        Self { reports, data_csv: None }
    }
}

type CmdResult = Result<Outcome, String>;

pub fn cmd_verify(cfg: &RunConfig) -> CmdResult {
    suites::run_suite(&cfg.suite, &cfg.params())
        .map(Outcome::reports)
        .ok_or_else(|| format!("unknown suite {:?}; expected one of {}", cfg.suite, SUITES.join(", ")))
}

pub fn cmd_df_sweep(a: &DfSweepArgs) -> CmdResult {
    if !(0.0 < a.eta_min && a.eta_min <= a.eta_max && a.eta_max <= 1.0 && a.step > 0.0) {
        return Err("need 0 < eta-min ≤ eta-max ≤ 1 and step > 0".into());
    }
    let grid = DfGrid::standard();
    let rows = tube::df_scan(&grid, a.eta_min, a.eta_max, a.step);
    let mut csv = String::from("eta,min_eigenvalue,delta,z_re,z_im,w_re,w_im\n");
    for r in &rows {
        let (z, w) = (r.point.z, r.point.w);
        csv.push_str(&format!("{},{:e},{:e},{},{},{},{}\n", r.eta, r.min_eigenvalue, r.delta, z.re, z.im, w.re, w.im));
    }
    let estimate = tube::df_exponent_estimate(&grid);
    let reports = vec![
        CheckReport::within("df.exponent_estimate", estimate, Some(0.495), Some(0.505))
            .with_samples(grid.points().len() as u64),
        CheckReport::info("df.sweep_min_eigenvalues", Value::Vector(rows.iter().map(|r| r.min_eigenvalue).collect())),
    ];
    Ok(Outcome { reports, data_csv: Some(csv) })
}

pub fn cmd_ergodic(cfg: &RunConfig, mode: &ErgodicMode) -> CmdResult {
    let group = octagon_group().map_err(|e| e.to_string())?;
    match *mode {
        ErgodicMode::Geodesic { time, dt, bins } => {
            let seed = mc::derive_seed(cfg.seed, "ergodic.geodesic");
            let r = ergodic::equidistribution_experiment(&group, time, dt, bins, seed).map_err(|e| e.to_string())?;
            let mut csv = String::from("cell,observed,expected\n");
            for (k, (o, e)) in r.histogram.frequencies().iter().zip(&r.expected).enumerate() {
                csv.push_str(&format!("{k},{o:e},{e:e}\n"));
            }
            let report =
                CheckReport::below("ergodic.geodesic_tv", r.tv_distance, 0.05).with_samples(r.steps).with_seed(seed);
            Ok(Outcome { reports: vec![report], data_csv: Some(csv) })
        }
        ErgodicMode::Boundary { length, grid } => {
            let n = cfg.samples.unwrap_or(1_000_000);
            let seed = mc::derive_seed(cfg.seed, "ergodic.boundary_orbit");
            let r = ergodic::boundary_orbit_experiment(&group, n, length, grid, seed).map_err(|e| e.to_string())?;
            let bins = (grid * grid) as f64;
            let report = CheckReport::near("ergodic.boundary_orbit_bins_hit", r.nonzero_bins as f64, bins, 0.0)
                .with_samples(n)
                .with_seed(seed)
                .with_detail(format!("{:.4} of images within one bin of the diagonal", r.near_diagonal));
            Ok(Outcome { reports: vec![report], data_csv: Some(r.histogram.to_csv()) })
        }
    }
}

pub fn cmd_hardy(cfg: &RunConfig, mode: &HardyMode) -> CmdResult {
    let group = octagon_group().map_err(|e| e.to_string())?;
    let err = |e: crate::Error| e.to_string();
    match mode {
        HardyMode::LevelIntegral { f: NamedFn { name, f }, t } => {
            let n = cfg.samples.unwrap_or(1_000_000);
            let exact = hardy::constant_level_integral(fuchsian::GENUS);
            let is_one = *name == "one";
            let mut csv = String::from("t,estimate,stderr\n");
            let mut reports = Vec::new();
            for &t in t {
                let name = format!("hardy.level_integral_{name}_t{t}");
                let seed = mc::derive_seed(cfg.seed, &name);
                let e = hardy::level_integral(&group, f, t, n, seed, mc::DEFAULT_SHARDS, Integrand::Pullback)
                    .map_err(err)?;
                csv.push_str(&format!("{t},{:e},{:e}\n", e.value, e.stderr));
                let r = if is_one {
                    CheckReport::near(&name, e.value, exact, 3.0 * e.stderr)
                } else {
                    CheckReport::info(&name, Value::Scalar(e.value))
                };
                reports.push(r.with_samples(n).with_seed(seed).with_detail(format!("stderr {:e}", e.stderr)));
            }
            Ok(Outcome { reports, data_csv: Some(csv) })
        }
        HardyMode::Stokes { f: NamedFn { name, f }, grid } => {
            let grid = grid.unwrap_or(cfg.grid);
            let rows = hardy::stokes_suite(f, &hardy::stokes_fixture_boxes(), grid).map_err(err)?;
            let mut csv = String::from("box,grid,direct,exterior,boundary,flux_scale,gap\n");
            let mut reports = Vec::new();
            for (k, r) in rows.iter().enumerate() {
                for e in [&r.coarse, &r.fine] {
                    csv.push_str(&format!(
                        "{k},{},{:e},{:e},{:e},{:e},{:e}\n",
                        e.grid, e.direct.re, e.exterior.re, e.boundary.re, e.flux_scale, e.gap
                    ));
                }
                let name = format!("stokes.{name}.box{k}");
                reports.push(
                    CheckReport::below(&format!("{name}.gap"), r.fine.gap, hardy::STOKES_TOL).with_samples(grid as u64),
                );
                reports.push(CheckReport::holds(&format!("{name}.converges"), r.converged));
            }
            Ok(Outcome { reports, data_csv: Some(csv) })
        }
        HardyMode::Trend { f: NamedFn { f, .. }, t } => {
            let n = cfg.samples.unwrap_or(200_000);
            let seed = mc::derive_seed(cfg.seed, "hardy.trend");
            let rows = hardy::gradient_boundary_trend(&group, f, t, n, seed, mc::DEFAULT_SHARDS).map_err(err)?;
            let mut csv = String::from("t,value,stderr,per_sin2\n");
            for r in &rows {
                csv.push_str(&format!("{},{:e},{:e},{:e}\n", r.t, r.value, r.stderr, r.per_sin2));
            }
            let trend = hardy::classify_trend(&rows, 3.0);
            let reports = vec![
                CheckReport::info("hardy.trend_values", Value::Vector(rows.iter().map(|r| r.value).collect()))
                    .with_samples(n)
                    .with_seed(seed)
                    .with_detail(format!("{trend:?}")),
                CheckReport::info("hardy.trend_limit_for_z", Value::Scalar(hardy::trend_limit_for_z(&group))),
            ];
            Ok(Outcome { reports, data_csv: Some(csv) })
        }
        HardyMode::Pullback { f: NamedFn { name, f }, t } => {
            let seed = mc::derive_seed(cfg.seed, "hardy.pullback");
            let samples = hardy::chart_samples(&group, 100, &mut rand::SeedableRng::seed_from_u64(seed));
            let mut reports = Vec::new();
            for &t in t {
                let gap = hardy::pullback_identity_check(f, t, &samples).map_err(err)?;
                reports.push(
                    CheckReport::below(&format!("hardy.pullback_identity_{name}_t{t}"), gap, 1e-4)
                        .with_samples(100)
                        .with_seed(seed),
                );
            }
            Ok(Outcome::reports(reports))
        }
    }
}

pub fn cmd_area(cfg: &RunConfig) -> CmdResult {
    let group = octagon_group().map_err(|e| e.to_string())?;
    let n = cfg.samples.unwrap_or(10_000_000);
    let seed = mc::derive_seed(cfg.seed, "group.domain_area");
    let area = group.domain_area(n, seed, mc::DEFAULT_SHARDS);
    let exact = fuchsian::form_area(fuchsian::GENUS);
    Ok(Outcome::reports(vec![
        CheckReport::near("area.domain_form_area", area.value, exact, 3.0 * area.stderr)
            .with_samples(n)
            .with_seed(seed)
            .with_detail(format!("stderr {:e}", area.stderr)),
        CheckReport::info("area.curvature_minus_one", Value::Scalar(2.0 * area.value)),
        CheckReport::info("area.euclidean", Value::Scalar(group.euclidean_area())),
    ]))
}

fn write_file(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Runs the parsed command and writes its outputs; returns the exit code.
pub fn execute(cli: &Cli) -> Result<i32, String> {
    let cfg = RunConfig::resolve(cli)?;
    let outcome = match &cli.command {
        Command::Verify(_) => cmd_verify(&cfg)?,
        Command::DfSweep(a) => cmd_df_sweep(a)?,
        Command::Ergodic { mode } => cmd_ergodic(&cfg, mode)?,
        Command::Hardy { mode } => cmd_hardy(&cfg, mode)?,
        Command::Area => cmd_area(&cfg)?,
    };
    let mut reports = outcome.reports;
    report::sort_reports(&mut reports);
    if !cfg.timings {
        for r in &mut reports {
            r.runtime_ms = 0;
        }
    }
    let table_csv = outcome.data_csv.unwrap_or_else(|| report::to_csv(&reports));
    if let Some(path) = &cfg.json {
        write_file(path, &report::to_json(&reports))?;
    }
    if let Some(path) = &cfg.csv {
        write_file(path, &table_csv)?;
    }
    if !cfg.quiet {
        match cfg.format {
            Format::Table => print!("{}", report::to_table(&reports)),
            Format::Json => print!("{}", report::to_json(&reports)),
            Format::Csv => print!("{}", report::to_csv(&reports)),
        }
    }
    Ok(report::exit_code(&reports))
}

/// Parses `args` (including the program name) and runs them.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    }
}
