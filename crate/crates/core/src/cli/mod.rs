//! Command-line front end: one subcommand per library operation, full
//! precision text output, and a manifest next to every set of files.
//!
//! Exit codes: 0 on success, 1 for usage and configuration errors, 2 for
//! numerical failures (including a diverged simulation).

pub mod config_file;
pub mod manifest;
pub mod output;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::error::FlockError;
use crate::expansion::expand;
use crate::lattice::{Boundary, FlockConfig};
use crate::simulate::{
    integrate, peak_amplitudes, run_convoy, sweep_t1, ConvoyParams, SimResult, SweepParam,
};
use crate::spectral::{locus_trace, spectrum};
use crate::stability::{classify, gershgorin_prescreen, DEFAULT_TOL};

pub use config_file::{ConfigFile, ScenarioSpec, SweepSpec};
pub use manifest::RunManifest;
use output::{key_values, num, opt_num, CsvWriter};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {message}", path.display())]
    Config { path: PathBuf, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Flock(#[from] FlockError),
    #[error("simulation diverged at t = {0}")]
    Diverged(f64),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config { .. } | CliError::Io { .. } => 1,
            CliError::Diverged(_) => 2,
            CliError::Flock(e) => match e {
                FlockError::InvalidConfig(_)
                | FlockError::InvalidDistribution(_)
                | FlockError::IndexOutOfRange { .. }
                | FlockError::WrongBoundary { .. }
                | FlockError::TooLarge { .. }
                | FlockError::ExpansionDomain(_)
                | FlockError::InvalidScenario(_) => 1,
                FlockError::RootFinding { .. }
                | FlockError::Eigensolver
                | FlockError::NotARoot { .. }
                | FlockError::LocusTracking { .. }
                | FlockError::TooFewPeaks { .. }
                | FlockError::Interpolation(_) => 2,
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "nnflock", version, about = "Spectra, expansion and simulation of nearest-neighbour flocks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Run description (TOML, or JSON such as a manifest's config echo).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file or directory, depending on the subcommand.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the seed in the config.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub verbose: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Roots of every mode polynomial of a periodic ring (CSV: m, phi, re_nu, im_nu).
    Spectrum(Common),
    /// Low-frequency expansion coefficients as key=value lines.
    Expand(Common),
    /// Product condition and numeric stability verdict as key=value lines.
    Stability(Common),
    /// Integrate an open line; writes trajectory.csv and summary.json to --out.
    Simulate(Common),
    /// Measured against predicted first-response time over a grid of mean g_x.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// The two slow branches leaving the origin as the mode phase grows.
    Locus {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.5)]
        phi_max: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Truck convoy with a 10 m/s leader step; --config may hold convoy parameters.
    Convoy(Common),
}

/// Parses `argv` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let verbose = match &cli.command {
        Command::Sweep { common, .. } | Command::Locus { common, .. } => common.verbose,
        Command::Spectrum(c)
        | Command::Expand(c)
        | Command::Stability(c)
        | Command::Simulate(c)
        | Command::Convoy(c) => c.verbose,
    };
    let _ = env_logger::Builder::new()
        .filter_level(if verbose {
            log::LevelFilter::Debug
        } else {
            log::LevelFilter::Warn
        })
        .parse_default_env()
        .try_init();

    let command_line = argv
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join(" ");
    match dispatch(cli.command, &command_line) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, command_line: &str) -> Result<(), CliError> {
    let started = Instant::now();
    let ctx = Ctx {
        command_line,
        started,
    };
    match command {
        Command::Spectrum(c) => cmd_spectrum(&c, &ctx),
        Command::Expand(c) => cmd_expand(&c, &ctx),
        Command::Stability(c) => cmd_stability(&c, &ctx),
        Command::Simulate(c) => cmd_simulate(&c, &ctx),
        Command::Sweep {
            common,
            trials,
            param,
            values,
        } => cmd_sweep(&common, trials, &param, &values, &ctx),
        Command::Locus {
            common,
            phi_max,
            steps,
        } => cmd_locus(&common, phi_max, steps, &ctx),
        Command::Convoy(c) => cmd_convoy(&c, &ctx),
    }
}

struct Ctx<'a> {
    command_line: &'a str,
    started: Instant,
}

impl Ctx<'_> {
    fn manifest(&self, echo: serde_json::Value, outputs: &[PathBuf], at: &Path) -> Result<(), CliError> {
        RunManifest::new(
            self.command_line.to_string(),
            echo,
            outputs,
            self.started.elapsed().as_secs_f64(),
        )?
        .write(at)
    }
}

fn load(common: &Common) -> Result<(ConfigFile, FlockConfig), CliError> {
    let path = common
        .config
        .as_ref()
        .ok_or_else(|| CliError::Usage("--config is required".into()))?;
    let file = ConfigFile::load(path)?;
    let config = file.flock(common.seed).map_err(|e| at_path(e, path))?;
    Ok((file, config))
}

/// Attaches the config path to errors raised after parsing.
fn at_path(e: CliError, path: &Path) -> CliError {
    match e {
        CliError::Config { message, .. } => CliError::Config {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    }
}

fn out_dir(common: &Common) -> Result<PathBuf, CliError> {
    let dir = common
        .out
        .clone()
        .ok_or_else(|| CliError::Usage("--out DIR is required".into()))?;
    std::fs::create_dir_all(&dir).map_err(|source| CliError::Io {
        path: dir.clone(),
        source,
    })?;
    Ok(dir)
}

/// Manifest path for a single output file: `<file>.manifest.json`.
fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn echo_json(file: &ConfigFile, config: &FlockConfig, scenario: Option<ScenarioSpec>) -> serde_json::Value {
    serde_json::to_value(file.echo(config, scenario)).expect("config serialises")
}

/// Text to stdout, or to `--out` with a sidecar manifest.
fn emit_text(common: &Common, text: &str, echo: serde_json::Value, ctx: &Ctx) -> Result<(), CliError> {
    match &common.out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            output::write_text(path, text)?;
            ctx.manifest(echo, std::slice::from_ref(path), &sidecar(path))
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn cmd_spectrum(common: &Common, ctx: &Ctx) -> Result<(), CliError> {
    let (file, config) = load(common)?;
    if config.boundary != Boundary::Periodic {
        return Err(CliError::Usage("spectrum requires boundary = \"periodic\"".into()));
    }
    let result = spectrum(&config)?;
    let header: Vec<String> = ["m", "phi", "re_nu", "im_nu"].map(String::from).to_vec();
    let mut buf = CsvWriter::new(Vec::new(), &header).expect("in-memory write");
    for mode in &result.modes {
        for nu in &mode.roots {
            buf.text_row(&[mode.m.to_string(), num(mode.phi), num(nu.re), num(nu.im)])
                .expect("in-memory write");
        }
    }
    let text = String::from_utf8(buf.finish().expect("in-memory write")).expect("ascii");
    emit_text(common, &text, echo_json(&file, &config, None), ctx)
}

fn cmd_expand(common: &Common, ctx: &Ctx) -> Result<(), CliError> {
    let (file, config) = load(common)?;
    let e = expand(&config)?;
    let mut pairs = vec![
        ("c1", num(e.c1)),
        ("c2", num(e.c2)),
        ("T1", num(e.t1)),
        ("gamma1_im", num(e.gamma1.im)),
        ("gamma2", num(e.gamma2)),
        ("a02", opt_num(e.a02)),
        ("a12", opt_num(e.a12)),
        ("a20", opt_num(e.a20)),
        ("a30", opt_num(e.a30)),
        ("avg_inv_gx", num(e.avg_inv_gx)),
        ("avg_gv_over_gx2", num(e.avg_gv_over_gx2)),
    ];
    if common.verbose {
        pairs.push(("c2_alt", num(e.c2_alt)));
        pairs.push(("ln_common", num(e.coefficients.ln_common)));
    }
    emit_text(common, &key_values(&pairs), echo_json(&file, &config, None), ctx)
}

fn cmd_stability(common: &Common, ctx: &Ctx) -> Result<(), CliError> {
    let (file, config) = load(common)?;
    let report = classify(&config, DEFAULT_TOL)?;
    let verdict = report
        .numeric_verdict
        .map(|v| serde_json::to_value(v).expect("verdict serialises"))
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_else(|| "none".into());
    let pairs = [
        ("necessary_condition", report.necessary_condition_holds.to_string()),
        ("product_gap_sign", report.product_gap.sign.to_string()),
        ("product_gap_ln_abs", num(report.product_gap.ln_abs)),
        ("symmetric_guarantee", report.symmetric_guarantee_applies.to_string()),
        ("verdict", verdict),
        ("max_real_part", opt_num(report.max_real_part)),
        (
            "zero_multiplicity",
            report
                .zero_multiplicity
                .map(|z| z.to_string())
                .unwrap_or_else(|| "none".into()),
        ),
        ("gershgorin_bound", num(gershgorin_prescreen(&config))),
    ];
    emit_text(common, &key_values(&pairs), echo_json(&file, &config, None), ctx)
}

fn write_trajectory(path: &Path, sim: &SimResult) -> Result<(), CliError> {
    let n = sim.positions.first().map_or(0, Vec::len);
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain((0..n).map(|k| format!("agent_{k}")))
        .collect();
    let mut w = CsvWriter::create(path, &header)?;
    let mut row = Vec::with_capacity(n + 1);
    for (t, z) in sim.times.iter().zip(&sim.positions) {
        row.clear();
        row.push(*t);
        row.extend_from_slice(z);
        w.row(&row).map_err(io_err(path))?;
    }
    w.finish().map_err(io_err(path))?;
    Ok(())
}

fn summary_json(sim: &SimResult, config: &FlockConfig, t1_predicted: Option<f64>) -> serde_json::Value {
    let peaks: Vec<[f64; 2]> = sim
        .peaks
        .iter()
        .zip(peak_amplitudes(sim))
        .map(|(p, a)| [p.t, a])
        .collect();
    let ratios: serde_json::Map<String, serde_json::Value> = sim
        .amplitude_ratios
        .iter()
        .map(|(k, r)| (k.to_string(), json!(r)))
        .collect();
    json!({
        "T1_measured": sim.t1_measured,
        "T1_predicted": t1_predicted,
        "peaks": peaks,
        "ratios": ratios,
        "diverged": sim.diverged,
        "diverged_at": sim.diverged_at,
        "dt": sim.dt,
        "seed": config.seed,
        "drawn_gx": config.g_x(),
        "drawn_gv": config.g_v(),
    })
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    output::write_text(path, &serde_json::to_string_pretty(value).expect("json serialises"))
}

fn cmd_simulate(common: &Common, ctx: &Ctx) -> Result<(), CliError> {
    let (file, config) = load(common)?;
    if config.boundary != Boundary::OpenLine {
        return Err(CliError::Usage("simulate requires boundary = \"open_line\"".into()));
    }
    let dir = out_dir(common)?;
    let spec = file
        .resolved_scenario(&config)
        .map_err(|e| at_path(e, common.config.as_deref().unwrap_or(Path::new("<config>"))))?;
    let sim = integrate(&config, &spec.to_scenario(), None)?;
    let t1_predicted = expand(&config).ok().map(|e| e.t1);

    let trajectory = dir.join("trajectory.csv");
    let summary = dir.join("summary.json");
    write_trajectory(&trajectory, &sim)?;
    let s = summary_json(&sim, &config, t1_predicted);
    write_json(&summary, &s)?;
    ctx.manifest(
        echo_json(&file, &config, Some(spec)),
        &[trajectory, summary],
        &dir.join("manifest.json"),
    )?;
    println!(
        "{}",
        key_values(&[
            ("T1_measured", opt_num(sim.t1_measured)),
            ("T1_predicted", opt_num(t1_predicted)),
            ("diverged", sim.diverged.to_string()),
        ])
        .trim_end()
    );
    match sim.diverged_at {
        Some(t) => Err(CliError::Diverged(t)),
        None => Ok(()),
    }
}

fn cmd_sweep(
    common: &Common,
    trials: usize,
    param: &str,
    values: &[f64],
    ctx: &Ctx,
) -> Result<(), CliError> {
    let param = match param {
        "mean_gx" => SweepParam::MeanGx,
        other => {
            return Err(CliError::Usage(format!(
                "unknown sweep parameter `{other}` (expected mean_gx)"
            )))
        }
    };
    let path = common
        .config
        .as_ref()
        .ok_or_else(|| CliError::Usage("--config is required".into()))?;
    let file = ConfigFile::load(path)?;
    let template = file.sweep_template(common.seed).map_err(|e| at_path(e, path))?;
    let dir = out_dir(common)?;
    let table = sweep_t1(&template, param, values, trials)?;

    let rows_path = dir.join("sweep_rows.csv");
    let header: Vec<String> = ["value", "trial", "seed", "T1_predicted", "T1_measured", "diverged"]
        .map(String::from)
        .to_vec();
    let mut w = CsvWriter::create(&rows_path, &header)?;
    for r in &table.rows {
        w.text_row(&[
            num(r.value),
            r.trial.to_string(),
            r.seed.to_string(),
            num(r.t1_predicted),
            opt_num(r.t1_measured),
            r.diverged.to_string(),
        ])
        .map_err(io_err(&rows_path))?;
    }
    w.finish().map_err(io_err(&rows_path))?;

    let agg_path = dir.join("sweep_aggregate.csv");
    let header: Vec<String> = [
        "value",
        "mean_measured",
        "std_measured",
        "mean_predicted",
        "std_predicted",
        "mean_ratio",
        "completed",
        "diverged",
    ]
    .map(String::from)
    .to_vec();
    let mut w = CsvWriter::create(&agg_path, &header)?;
    for a in &table.aggregates {
        w.text_row(&[
            num(a.value),
            num(a.mean_measured),
            num(a.std_measured),
            num(a.mean_predicted),
            num(a.std_predicted),
            num(a.mean_ratio),
            a.completed.to_string(),
            a.diverged.to_string(),
        ])
        .map_err(io_err(&agg_path))?;
    }
    w.finish().map_err(io_err(&agg_path))?;

    let mut echo = file.clone();
    echo.seed = template.base_seed;
    let echo = json!({
        "config": echo,
        "param": "mean_gx",
        "values": values,
        "trials": trials,
    });
    ctx.manifest(echo, &[rows_path, agg_path], &dir.join("manifest.json"))
}

fn cmd_locus(common: &Common, phi_max: f64, steps: usize, ctx: &Ctx) -> Result<(), CliError> {
    let (file, config) = load(common)?;
    let points = locus_trace(&config, phi_max, steps)?;
    let e = expand(&config)?;
    let p = config.p as f64;
    let header: Vec<String> = [
        "phi",
        "re_nu_plus",
        "im_nu_plus",
        "re_nu_minus",
        "im_nu_minus",
        "re_approx",
        "im_approx",
    ]
    .map(String::from)
    .to_vec();
    let mut w = CsvWriter::new(Vec::new(), &header).expect("in-memory write");
    for pt in &points {
        // Second-order approximation of the upper branch, theta = phi / p.
        let theta = pt.phi / p;
        w.row(&[
            pt.phi,
            pt.nu_plus.re,
            pt.nu_plus.im,
            pt.nu_minus.re,
            pt.nu_minus.im,
            -0.5 * e.c2 * theta * theta,
            e.c1 * theta,
        ])
        .expect("in-memory write");
    }
    let text = String::from_utf8(w.finish().expect("in-memory write")).expect("ascii");
    emit_text(common, &text, echo_json(&file, &config, None), ctx)
}

fn cmd_convoy(common: &Common, ctx: &Ctx) -> Result<(), CliError> {
    let mut params = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(io_err(path))?;
            toml::from_str::<ConvoyParams>(&text).map_err(|e| CliError::Config {
                path: path.clone(),
                message: e.to_string(),
            })?
        }
        None => ConvoyParams::default(),
    };
    if let Some(seed) = common.seed {
        params.seed = seed;
    }
    let dir = out_dir(common)?;
    let (config, _) = crate::simulate::convoy_scenario(&params)?;
    let (report, sim) = run_convoy(&params)?;

    let trajectory = dir.join("trajectory.csv");
    let summary = dir.join("summary.json");
    write_trajectory(&trajectory, &sim)?;
    let mut s = summary_json(&sim, &config, Some(report.t1_predicted));
    let obj = s.as_object_mut().expect("summary is an object");
    obj.insert("tail_arrival_time".into(), json!(report.tail_arrival_time));
    obj.insert("max_length".into(), json!(report.max_length));
    obj.insert("min_length".into(), json!(report.min_length));
    obj.insert("spacing".into(), json!(params.spacing));
    write_json(&summary, &s)?;
    ctx.manifest(
        json!({ "convoy": params }),
        &[trajectory, summary],
        &dir.join("manifest.json"),
    )?;
    println!(
        "{}",
        key_values(&[
            ("tail_arrival_time", opt_num(report.tail_arrival_time)),
            ("T1_predicted", num(report.t1_predicted)),
            ("max_length", opt_num(report.max_length)),
            ("min_length", opt_num(report.min_length)),
        ])
        .trim_end()
    );
    match sim.diverged_at {
        Some(t) => Err(CliError::Diverged(t)),
        None => Ok(()),
    }
}
