//! Subcommands of the `freqsweep` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use freqsweep_core::afs::{self, AfsError, IterationRecord};
use freqsweep_core::laplace::{self, FsmGrid, LaplaceError, TimeSeries};
use freqsweep_core::systems::{FrequencyDomainSystem, SystemError};
use freqsweep_core::vecfit::{self, FitError, FitOptions, Spectrum};
use freqsweep_core::FrequencySample;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::io::{self, BuiltSystem, FormatError, SweepArchive, SweepConfig, SystemSpec};

/// Fraction of the period over which time histories are compared.
pub const COMPARE_HORIZON: f64 = 0.9;

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_VALIDATION: u8 = 3;
pub const EXIT_NUMERICAL: u8 = 4;
pub const EXIT_NOT_CONVERGED: u8 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "freqsweep",
    version,
    about = "Frequency sweeps, rational fits and time-domain reconstruction"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fourier-series sweep at every grid frequency.
    SweepFsm(FsmArgs),
    /// Adaptive sweep with rational fitting.
    SweepAfs(AfsArgs),
    /// Vector fit of sampled spectra.
    Fit(FitArgs),
    /// Time histories of a pole-residue model.
    Invert(InvertArgs),
    /// Compare the outputs of two sweeps.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct FsmArgs {
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AfsArgs {
    #[arg(long)]
    pub system: PathBuf,
    /// Required unless resuming; overrides the archived configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Observation channels, e.g. `0,1,4`.
    #[arg(long, value_delimiter = ',')]
    pub orf: Option<Vec<usize>>,
    /// Test channels, e.g. `2,3`.
    #[arg(long, value_delimiter = ',')]
    pub test: Option<Vec<usize>>,
    /// Archive of an earlier run to continue from.
    #[arg(long)]
    pub resume: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Sweep archive supplying the samples.
    #[arg(long, conflicts_with = "spectrum")]
    pub archive: Option<PathBuf>,
    /// Spectrum CSV supplying the samples; needs `--eta`.
    #[arg(long, requires = "eta")]
    pub spectrum: Option<PathBuf>,
    /// Contour abscissa of the CSV samples.
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub order: usize,
    /// Observation channels; all channels when omitted.
    #[arg(long, value_delimiter = ',')]
    pub orf: Option<Vec<usize>>,
    #[arg(long, default_value_t = 3)]
    pub relocations: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Sweep configuration defining the time grid.
    #[arg(long)]
    pub config: PathBuf,
    /// Sum only poles left of the contour and inside the band.
    #[arg(long)]
    pub band_limited: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Output directory of `sweep-fsm`.
    #[arg(long)]
    pub fsm: PathBuf,
    /// Output directory of `sweep-afs`.
    #[arg(long)]
    pub afs: PathBuf,
    /// System whose closed-form response serves as reference.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Afs(#[from] AfsError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Laplace(#[from] LaplaceError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error("time grids differ: {0}")]
    GridMismatch(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{0}")]
    Usage(String),
}

fn fit_exit_code(e: &FitError) -> u8 {
    match e {
        FitError::RankDeficient { .. }
        | FitError::PoleCollision { .. }
        | FitError::ZeroEnergy
        | FitError::NonFiniteData { .. }
        | FitError::Eigen(_) => EXIT_NUMERICAL,
        _ => EXIT_VALIDATION,
    }
}

fn system_exit_code(e: &SystemError) -> u8 {
    match e {
        SystemError::InvalidParameter(_) | SystemError::DuplicateLabel(_) => EXIT_VALIDATION,
        SystemError::Evaluation(f) => fit_exit_code(f),
        SystemError::ZeroFrequency => EXIT_NUMERICAL,
    }
}

fn laplace_exit_code(e: &LaplaceError) -> u8 {
    match e {
        LaplaceError::NonFiniteValue { .. }
        | LaplaceError::Overflow { .. }
        | LaplaceError::NotReal { .. } => EXIT_NUMERICAL,
        _ => EXIT_VALIDATION,
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Format(FormatError::Io { .. }) => EXIT_IO,
            CliError::Format(FormatError::System(e)) => system_exit_code(e),
            CliError::Format(_) => EXIT_VALIDATION,
            CliError::Afs(AfsError::Config(_)) => EXIT_VALIDATION,
            CliError::Afs(AfsError::NotConverged { .. }) => EXIT_NOT_CONVERGED,
            CliError::Afs(AfsError::Fit(e)) => fit_exit_code(e),
            CliError::Afs(AfsError::System(e)) => system_exit_code(e),
            CliError::Afs(AfsError::Laplace(e)) => laplace_exit_code(e),
            CliError::Afs(_) => EXIT_NUMERICAL,
            CliError::System(e) => system_exit_code(e),
            CliError::Laplace(e) => laplace_exit_code(e),
            CliError::Fit(e) => fit_exit_code(e),
            CliError::GridMismatch(_) | CliError::Invalid(_) => EXIT_VALIDATION,
            CliError::Usage(_) => EXIT_USAGE,
        }
    }
}

/// Result of a completed command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: u8,
    pub report: Value,
    pub messages: Vec<String>,
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::SweepFsm(a) => sweep_fsm(a),
        Command::SweepAfs(a) => sweep_afs(a),
        Command::Fit(a) => fit(a),
        Command::Invert(a) => invert(a),
        Command::Compare(a) => compare(a),
    }
}

fn load_system(path: &Path) -> Result<BuiltSystem, CliError> {
    Ok(io::read_json::<SystemSpec>(path)?.build()?)
}

fn ext(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn history_json(history: &[IterationRecord]) -> Value {
    history
        .iter()
        .map(|r| {
            json!({
                "samples": r.samples,
                "order_high": r.order_high,
                "order_low": r.order_low,
                "e1": ext(r.e1),
                "e2": ext(r.e2),
                "passed": r.passed,
                "s_new": r.s_new.map(|s| [s.re, s.im]),
            })
        })
        .collect()
}

/// Writes every output atomically, then `report.json` listing them with
/// their SHA-256 digests.
fn write_outputs(
    out: &Path,
    files: Vec<(&str, String)>,
    mut report: Map<String, Value>,
) -> Result<Value, CliError> {
    fs::create_dir_all(out).map_err(|source| FormatError::Io {
        path: out.to_path_buf(),
        source,
    })?;
    let mut listed = Vec::new();
    for (name, content) in &files {
        io::write_atomic(&out.join(name), content.as_bytes())?;
        listed.push(json!({
            "file": name,
            "bytes": content.len(),
            "sha256": hex::encode(Sha256::digest(content.as_bytes())),
        }));
    }
    report.insert("outputs".into(), Value::Array(listed));
    let report = Value::Object(report);
    io::write_atomic(
        &out.join("report.json"),
        io::to_json_string(&report).as_bytes(),
    )?;
    Ok(report)
}

fn object(value: Value) -> Map<String, Value> {
    match value {
        Value::Object(m) => m,
        _ => unreachable!("report literals are objects"),
    }
}

fn sweep_fsm(a: &FsmArgs) -> Result<Outcome, CliError> {
    let system = load_system(&a.system)?;
    let sweep: SweepConfig = io::read_json(&a.config)?;
    let start = Instant::now();
    let grid = FsmGrid::new(sweep.period, sweep.samples)?;
    let eta = sweep.fsm_eta();
    let labels = system.descriptor().channel_labels.clone();
    let samples = grid
        .frequencies(eta)
        .into_iter()
        .map(|s| Ok(FrequencySample::new(s, system.evaluate(s)?)))
        .collect::<Result<Vec<_>, SystemError>>()?;
    let half: Vec<Vec<_>> = (0..labels.len())
        .map(|k| samples.iter().map(|x| x.values[k]).collect())
        .collect();
    let series = laplace::fsm_invert(&grid, eta, &half, labels.clone(), sweep.window)?;
    let elapsed = start.elapsed().as_secs_f64();
    let files = vec![
        ("spectrum.csv", io::export_spectrum_csv(&labels, &samples)?),
        ("time.csv", io::export_timeseries_csv(&series)?),
    ];
    let report = object(json!({
        "command": "sweep-fsm",
        "system": system.kind(),
        "labels": labels,
        "period": sweep.period,
        "samples": sweep.samples,
        "eta": eta,
        "omega_max": grid.omega_max(),
        "window": sweep.window,
        "n_c": samples.len(),
        "solver_calls": samples.len(),
        "converged": true,
        "wall_time_s": elapsed,
    }));
    let report = write_outputs(&a.out, files, report)?;
    Ok(Outcome {
        exit_code: EXIT_OK,
        report,
        messages: vec![format!(
            "sweep-fsm: {} solves in {elapsed:.3} s",
            samples.len()
        )],
    })
}

fn sweep_afs(a: &AfsArgs) -> Result<Outcome, CliError> {
    let system = load_system(&a.system)?;
    let labels = system.descriptor().channel_labels.clone();
    let resumed = a.resume.as_deref().map(io::load_archive).transpose()?;
    let mut sweep = match (&a.config, &resumed) {
        (Some(path), _) => io::read_json::<SweepConfig>(path)?,
        (None, Some(archive)) => archive.config.clone(),
        (None, None) => {
            return Err(CliError::Usage(
                "sweep-afs needs --config or --resume".into(),
            ))
        }
    };
    if let Some(seed) = a.seed {
        sweep.afs.seed = seed;
    }
    if let Some(orf) = &a.orf {
        sweep.afs.orf = orf.clone();
    }
    if let Some(test) = &a.test {
        sweep.afs.test = test.clone();
    }
    let config = sweep.afs_config()?;
    let known = match &resumed {
        Some(archive) if archive.labels != labels => {
            return Err(CliError::Invalid(format!(
                "archive channels {:?} do not match the system channels {labels:?}",
                archive.labels
            )))
        }
        Some(archive) => archive.samples.clone(),
        None => Vec::new(),
    };

    let start = Instant::now();
    let (result, stalled) = match afs::run_afs_with_samples(&system, &config, &known) {
        Ok(r) => (r, None),
        Err(AfsError::NotConverged {
            iterations,
            partial,
        }) => (*partial, Some(iterations)),
        Err(e) => return Err(e.into()),
    };
    let elapsed = start.elapsed().as_secs_f64();

    sweep.afs.orf = result.orf.clone();
    sweep.afs.test = result.test.clone();
    let archive = SweepArchive::new(
        sweep.clone(),
        labels.clone(),
        result.sampled.clone(),
        result.converged,
        result.model.clone(),
    );
    let mut files = vec![
        ("archive.json", archive.to_json()),
        (
            "spectrum.csv",
            io::export_spectrum_csv(&labels, &result.sampled)?,
        ),
    ];
    if let Some(model) = &result.model {
        files.push(("model.json", io::model_to_json(model)));
        let times = FsmGrid::new(sweep.period, sweep.samples)?.times();
        match config.invert(model, &times) {
            Ok(series) => files.push(("time.csv", io::export_timeseries_csv(&series)?)),
            Err(e) if result.converged => return Err(e.into()),
            Err(_) => {}
        }
    }
    let report = object(json!({
        "command": "sweep-afs",
        "system": system.kind(),
        "labels": labels,
        "period": sweep.period,
        "samples": sweep.samples,
        "eta": config.eta,
        "omega_max": config.omega_max,
        "band_limited_inverse": config.band_limited_inverse,
        "orf": result.orf,
        "test": result.test,
        "n_c": result.n_c(),
        "solver_calls": result.solver_calls,
        "resumed_samples": known.len(),
        "converged": result.converged,
        "iterations": result.history.len(),
        "unstable_pole_count": result.model.as_ref().map(|m| m.unstable_pole_count()),
        "history": history_json(&result.history),
    }));
    let report = write_outputs(&a.out, files, report)?;
    let mut messages = vec![format!(
        "sweep-afs: N_c = {} ({} new solves, {} iterations) in {elapsed:.3} s",
        result.n_c(),
        result.solver_calls,
        result.history.len()
    )];
    let exit_code = match stalled {
        None => EXIT_OK,
        Some(iterations) => {
            messages.push(format!(
                "not converged after {iterations} iterations; partial archive saved to {}",
                a.out.join("archive.json").display()
            ));
            EXIT_NOT_CONVERGED
        }
    };
    Ok(Outcome {
        exit_code,
        report,
        messages,
    })
}

fn fit(a: &FitArgs) -> Result<Outcome, CliError> {
    let (data, band_max): (Spectrum, Option<f64>) = match (&a.archive, &a.spectrum, a.eta) {
        (Some(path), None, _) => {
            let archive = io::load_archive(path)?;
            let band = archive.config.afs_config()?.omega_max;
            (Spectrum::new(archive.labels, archive.samples)?, Some(band))
        }
        (None, Some(path), Some(eta)) => {
            let rows = io::parse_spectrum_csv(&io::read_text(path)?)?;
            (io::spectrum_from_rows(&rows, eta)?, None)
        }
        _ => {
            return Err(CliError::Usage(
                "fit needs --archive, or --spectrum with --eta".into(),
            ))
        }
    };
    let orf = a
        .orf
        .clone()
        .unwrap_or_else(|| (0..data.channel_count()).collect());
    let options = FitOptions {
        relocations: a.relocations,
        band_max,
        ..FitOptions::default()
    };
    let (model, fit_report) = vecfit::vector_fit(&data, &orf, a.order, &options)?;
    let rms: Map<String, Value> = data
        .labels()
        .iter()
        .zip(&fit_report.per_channel_rms)
        .map(|(l, r)| (l.clone(), ext(*r)))
        .collect();
    let report = object(json!({
        "command": "fit",
        "labels": data.labels(),
        "n_c": data.len(),
        "order": a.order,
        "orf": orf,
        "relocations": a.relocations,
        "iterations_used": fit_report.iterations_used,
        "pole_movement": ext(fit_report.pole_movement),
        "unstable_pole_count": fit_report.unstable_pole_count,
        "relocation_rms": ext(fit_report.relocation_rms),
        "per_channel_rms": rms,
    }));
    let report = write_outputs(
        &a.out,
        vec![("model.json", io::model_to_json(&model))],
        report,
    )?;
    Ok(Outcome {
        exit_code: EXIT_OK,
        report,
        messages: vec![format!(
            "fit: order {} over {} samples",
            a.order,
            data.len()
        )],
    })
}

fn invert(a: &InvertArgs) -> Result<Outcome, CliError> {
    let model = io::model_from_json(&io::read_text(&a.model)?)?;
    let sweep: SweepConfig = io::read_json(&a.config)?;
    let config = sweep.afs_config()?;
    let times = FsmGrid::new(sweep.period, sweep.samples)?.times();
    let series = if a.band_limited {
        laplace::rational_invert_band(&model, config.eta, config.omega_max, &times)?
    } else {
        laplace::rational_invert(&model, &times)?
    };
    let report = object(json!({
        "command": "invert",
        "labels": model.labels(),
        "period": sweep.period,
        "samples": sweep.samples,
        "inverse": if a.band_limited { "band-limited" } else { "full" },
        "eta": config.eta,
        "omega_max": config.omega_max,
        "order": model.order(),
        "unstable_pole_count": model.unstable_pole_count(),
    }));
    let report = write_outputs(
        &a.out,
        vec![("time.csv", io::export_timeseries_csv(&series)?)],
        report,
    )?;
    Ok(Outcome {
        exit_code: EXIT_OK,
        report,
        messages: vec![format!(
            "invert: {} channels on {} times",
            series.channel_count(),
            series.len()
        )],
    })
}

struct RunOutput {
    n_c: u64,
    period: f64,
    series: TimeSeries,
}

fn load_run(dir: &Path) -> Result<RunOutput, CliError> {
    let report: Value = io::read_json(&dir.join("report.json"))?;
    let field = |name: &str| {
        report
            .get(name)
            .cloned()
            .ok_or_else(|| FormatError::schema(name, "missing field in report.json"))
    };
    let n_c = field("n_c")?
        .as_u64()
        .ok_or_else(|| FormatError::schema("n_c", "expected an unsigned integer"))?;
    let period = field("period")?
        .as_f64()
        .ok_or_else(|| FormatError::schema("period", "expected a number"))?;
    let series = io::parse_timeseries_csv(&io::read_text(&dir.join("time.csv"))?)?;
    Ok(RunOutput {
        n_c,
        period,
        series,
    })
}

fn rms_diff(a: &[f64], b: &[f64], idx: &[usize]) -> f64 {
    (idx.iter().map(|&i| (a[i] - b[i]).powi(2)).sum::<f64>() / idx.len() as f64).sqrt()
}

fn peak(a: &[f64], idx: &[usize]) -> f64 {
    idx.iter().map(|&i| a[i].abs()).fold(0.0, f64::max)
}

fn relative(x: f64, scale: f64) -> Value {
    if scale > 0.0 {
        ext(x / scale)
    } else {
        Value::Null
    }
}

fn compare(a: &CompareArgs) -> Result<Outcome, CliError> {
    let fsm = load_run(&a.fsm)?;
    let afs = load_run(&a.afs)?;
    let tol = 1e-12;
    if (fsm.period - afs.period).abs() > tol * fsm.period.abs().max(afs.period.abs()) {
        return Err(CliError::GridMismatch(format!(
            "period {} vs {}",
            fsm.period, afs.period
        )));
    }
    let (tf, ta) = (fsm.series.times(), afs.series.times());
    if tf.len() != ta.len() {
        return Err(CliError::GridMismatch(format!(
            "{} vs {} time points",
            tf.len(),
            ta.len()
        )));
    }
    if let Some(i) = tf
        .iter()
        .zip(ta)
        .position(|(x, y)| (x - y).abs() > tol * fsm.period)
    {
        return Err(CliError::GridMismatch(format!(
            "t[{i}] = {} vs {}",
            tf[i], ta[i]
        )));
    }
    if fsm.series.labels() != afs.series.labels() {
        return Err(CliError::GridMismatch(format!(
            "channels {:?} vs {:?}",
            fsm.series.labels(),
            afs.series.labels()
        )));
    }
    let horizon = COMPARE_HORIZON * fsm.period;
    let idx: Vec<usize> = (0..tf.len())
        .filter(|&i| tf[i] <= horizon * (1.0 + tol))
        .collect();
    if idx.is_empty() {
        return Err(CliError::Invalid(
            "no time points inside the comparison horizon".into(),
        ));
    }
    let reference = match &a.reference {
        Some(path) => {
            let system = load_system(path)?;
            let series = system.reference(tf)?;
            if series.labels() != fsm.series.labels() {
                return Err(CliError::Invalid(format!(
                    "reference channels {:?} do not match {:?}",
                    series.labels(),
                    fsm.series.labels()
                )));
            }
            Some(series)
        }
        None => None,
    };
    let channels: Vec<Value> = fsm
        .series
        .labels()
        .iter()
        .enumerate()
        .map(|(k, label)| {
            let (f, g) = (fsm.series.channel(k), afs.series.channel(k));
            let diff = rms_diff(f, g, &idx);
            let (vs_fsm, vs_afs) = match &reference {
                Some(r) => {
                    let h = r.channel(k);
                    let p = peak(h, &idx);
                    (
                        relative(rms_diff(f, h, &idx), p),
                        relative(rms_diff(g, h, &idx), p),
                    )
                }
                None => (Value::Null, Value::Null),
            };
            json!({
                "label": label,
                "rms_diff": ext(diff),
                "rms_diff_rel": relative(diff, peak(f, &idx)),
                "fsm_rms_vs_reference": vs_fsm,
                "afs_rms_vs_reference": vs_afs,
            })
        })
        .collect();
    let nc_ratio = if afs.n_c > 0 {
        ext(fsm.n_c as f64 / afs.n_c as f64)
    } else {
        Value::Null
    };
    let comparison = json!({
        "horizon": {"start": 0.0, "end": horizon, "fraction_of_period": COMPARE_HORIZON, "points": idx.len()},
        "rms_relative_to": "peak absolute value over the horizon (FSM run for rms_diff_rel, reference otherwise)",
        "period": fsm.period,
        "time_points": tf.len(),
        "nc_fsm": fsm.n_c,
        "nc_afs": afs.n_c,
        "nc_ratio": nc_ratio,
        "channels": channels,
    });
    let report = object(json!({
        "command": "compare",
        "nc_fsm": fsm.n_c,
        "nc_afs": afs.n_c,
        "nc_ratio": comparison["nc_ratio"],
        "reference": a.reference.is_some(),
    }));
    let report = write_outputs(
        &a.out,
        vec![("comparison.json", io::to_json_string(&comparison))],
        report,
    )?;
    Ok(Outcome {
        exit_code: EXIT_OK,
        report,
        messages: vec![format!("compare: N_c ratio {}", comparison["nc_ratio"])],
    })
}
