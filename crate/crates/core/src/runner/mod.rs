//! Presets, classification, configuration and the run/analyze workflows.

mod config;
mod output;
mod preset;

pub use config::{InitSpec, ModelChoice, RunConfig};
pub use output::{
    csv_line, read_records, read_records_file, write_records, Manifest, Snapshot, CSV_HEADER,
};
pub use preset::{
    classify_f64, classify_regularization, parse_rational, preset, presets, rational_from_f64,
    to_f64, Classification, ModelPreset, Regime,
};

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::diagnostics::{energy_identity_residual, forecast_for, gamma_exponent, EnergyMeter};
use crate::dynamics::{
    BlowupEvent, BlowupReason, DtPolicy, Integrator, IntegratorConfig, SimulationState,
};
use crate::error::{Error, Result};
use crate::singularity::{
    detect_regular_set, hausdorff_exponent, hausdorff_premeasure, recovering_bound, singular_sum,
    HausdorffQuery,
};
use crate::spectral::{random_divfree, SpectralField};

/// Process exit statuses.
pub mod exit_code {
    pub const OK: i32 = 0;
    pub const CONFIG_ERROR: i32 = 2;
    pub const BLOWUP_DETECTED: i32 = 3;
    pub const IO_ERROR: i32 = 4;
}

/// Exit status for a failed command.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::Json(_) => exit_code::IO_ERROR,
        _ => exit_code::CONFIG_ERROR,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    BlowupDetected,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Completed => exit_code::OK,
            RunStatus::BlowupDetected => exit_code::BLOWUP_DETECTED,
        }
    }

    fn label(self) -> &'static str {
        match self {
            RunStatus::Completed => "completed",
            RunStatus::BlowupDetected => "blowup_detected",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub status: RunStatus,
    pub steps: u64,
    pub final_state: SimulationState,
    pub blowup: Option<BlowupEvent>,
    pub manifest: Manifest,
}

/// Initial velocity chosen by the config.
pub fn initial_field(config: &RunConfig) -> Result<SpectralField> {
    let grid = config.model_params()?.grid;
    let v = match &config.init {
        InitSpec::Zero => SpectralField::zero_vector(grid),
        InitSpec::SingleMode { k, amplitude } => {
            if !grid.contains(*k) || *k == [0, 0, 0] {
                return Err(Error::Config(format!(
                    "init_k = {k:?} must be a nonzero mode inside the truncation"
                )));
            }
            let kk = k.iter().map(|c| (c * c) as f64).sum::<f64>().sqrt();
            let amp = amplitude.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            let dot = amplitude[0] * k[0] as f64 + amplitude[1] * k[1] as f64 + amplitude[2] * k[2] as f64;
            if dot.norm() > 1e-12 * kk * amp {
                return Err(Error::Config("init_amplitude is not divergence-free (k·a ≠ 0)".into()));
            }
            SpectralField::single_mode(grid, *k, *amplitude).map_err(|e| Error::Config(e.to_string()))?
        }
        InitSpec::Random { decay, scale } => random_divfree(grid, config.seed, *decay)
            .map_err(|e| Error::Config(e.to_string()))?
            .scaled(*scale),
        InitSpec::File(path) => {
            let v = Snapshot::read(path)?.to_field(grid)?;
            v.require_vector()?;
            v
        }
    };
    Ok(v)
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    Ok(())
}

fn forcing_label(config: &RunConfig) -> String {
    if config.forcing.is_empty() {
        return "none".into();
    }
    config
        .forcing
        .iter()
        .map(|m| format!("{}; {}", config::fmt_k(&m.k), config::fmt_amplitude(&m.amplitude)))
        .collect::<Vec<_>>()
        .join(" | ")
}

fn init_label(config: &RunConfig) -> String {
    match &config.init {
        InitSpec::Zero => "zero".into(),
        InitSpec::SingleMode { k, amplitude } => format!(
            "single_mode k = ({}) a = ({})",
            config::fmt_k(k),
            config::fmt_amplitude(amplitude)
        ),
        InitSpec::Random { decay, scale } => format!("random decay = {decay} scale = {scale}"),
        InitSpec::File(p) => format!("file {}", p.display()),
    }
}

/// Integrates the configured run and writes records, manifest and the
/// optional snapshot. Config problems are reported before any file is
/// touched.
pub fn run(config: &RunConfig) -> Result<RunSummary> {
    let started = Instant::now();
    config.validate()?;
    let params = config.model_params()?;
    let v0 = initial_field(config)?;
    let (t1, t2) = config.thetas()?;
    let class = classify_regularization(t1, t2)?;
    let meter = EnergyMeter::new(&params)?;
    let y0 = 1.0 + meter.record(&SimulationState::new(0.0, v0.clone())?).n1theta;
    let forecast = match class.regime {
        Regime::Supercritical => None,
        _ => Some(forecast_for(&v0, &params, config.c_const)?),
    };
    let integ_config = IntegratorConfig {
        dt: DtPolicy::from_dt(config.dt)?,
        diag_interval: config.diag_interval,
        blowup_guard: config.blowup_guard,
    };
    let mut integrator = Integrator::new(&params, integ_config)?;

    for p in [Some(&config.records), Some(&config.manifest), config.snapshot.as_ref()]
        .into_iter()
        .flatten()
    {
        ensure_parent(p)?;
    }
    let mut csv = BufWriter::new(File::create(&config.records)?);
    writeln!(csv, "{CSV_HEADER}")?;
    let mut records = Vec::new();
    let mut io_error: Option<std::io::Error> = None;
    let outcome = integrator.integrate(SimulationState::new(0.0, v0)?, config.t_end, |s| {
        let r = meter.record(s);
        if io_error.is_none() {
            if let Err(e) = csv.write_all(csv_line(&r).as_bytes()) {
                io_error = Some(e);
            }
        }
        records.push(r);
    })?;
    if let Some(e) = io_error {
        return Err(e.into());
    }
    csv.flush()?;
    drop(csv);

    if let Some(p) = &config.snapshot {
        Snapshot::from_field(&outcome.state.v, outcome.state.t).write(p)?;
    }
    let status = if outcome.blowup.is_some() {
        RunStatus::BlowupDetected
    } else {
        RunStatus::Completed
    };
    let residual = energy_identity_residual(&records, params.nu).ok();
    let manifest = Manifest {
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        status: status.label().into(),
        model: config.model.name().into(),
        theta1: params.theta1,
        theta2: params.theta2,
        theta1_exact: t1.to_string(),
        theta2_exact: t2.to_string(),
        regime: class.regime.to_string(),
        classification: class.summary(),
        admissible: class.admissible,
        gamma: gamma_exponent(params.theta1, params.theta2),
        hausdorff_exponent: (class.regime == Regime::Subcritical).then(|| class.exponent_f64()),
        alpha_filter_length: params.alpha,
        nu_viscosity: params.nu,
        domain_length: params.grid.length(),
        truncation_radius: params.grid.n(),
        collocation_points_per_axis: integrator.evaluator_mut().resolution(),
        dt_time_step: config.dt,
        mean_dt_time_step: if outcome.steps > 0 {
            outcome.state.t / outcome.steps as f64
        } else {
            0.0
        },
        t_end_time: config.t_end,
        t_final_time: outcome.state.t,
        steps: outcome.steps,
        seed: config.seed,
        init: init_label(config),
        forcing: forcing_label(config),
        forcing_scale: config.forcing_scale,
        diag_interval_steps: config.diag_interval,
        blowup_guard_norm: config.blowup_guard,
        c_const: config.c_const,
        y0_initial: y0,
        predicted_t_star_time: forecast.map(|f| f.t_star),
        m_bound: forecast.and_then(|f| f.m_bound),
        blowup_reason: outcome.blowup.as_ref().map(|b| {
            match b.reason {
                BlowupReason::NonFinite => "non_finite",
                BlowupReason::GuardExceeded => "guard_exceeded",
            }
            .to_string()
        }),
        blowup_t_last_finite_time: outcome.blowup.as_ref().map(|b| b.t_last_finite),
        records_path: config.records.display().to_string(),
        records_count: records.len(),
        snapshot_path: config.snapshot.as_ref().map(|p| p.display().to_string()),
        singularity_threshold: config.singularity_threshold,
        singularity_exponent: config.singularity_exponent,
        energy_identity_residual: residual,
        wall_time_seconds: started.elapsed().as_secs_f64(),
    };
    manifest.write(&config.manifest)?;
    Ok(RunSummary {
        status,
        steps: outcome.steps,
        final_state: outcome.state,
        blowup: outcome.blowup,
        manifest,
    })
}

/// Inputs of [`analyze`]; unset values come from the run's manifest.
#[derive(Debug, Clone, Default)]
pub struct AnalyzeOptions {
    pub records: PathBuf,
    /// Defaults to the records path with a `.json` extension.
    pub manifest: Option<PathBuf>,
    pub threshold: Option<f64>,
    pub exponent: Option<f64>,
    /// Defaults to the last record time.
    pub horizon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PremeasureEntry {
    /// `None` for unconstrained covers.
    pub eps: Option<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveringEntry {
    pub eps: f64,
    pub kept_components: usize,
    pub cover_sum: f64,
    pub grouped_sum: f64,
    pub tail_sum: f64,
    pub tail_length: f64,
    pub chain_holds: bool,
    pub vacuous: bool,
}

/// Singularity report for one records file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub records_path: String,
    pub horizon_time: f64,
    /// Threshold on `‖v̄‖_{1+θ₂,2}`; the singular set is where it is reached.
    pub threshold: f64,
    pub exponent: f64,
    pub exponent_source: String,
    pub regime: Option<String>,
    pub classification: Option<String>,
    pub regular_components: Vec<[f64; 2]>,
    pub singular_components: Vec<[f64; 2]>,
    pub singular_measure: f64,
    /// `Σ (βᵢ - αᵢ)^a` over the regular components.
    pub regular_sum: f64,
    pub singular_premeasure: Vec<PremeasureEntry>,
    pub recovering: Vec<RecoveringEntry>,
    pub note: String,
}

pub const ANALYSIS_EPS: [f64; 3] = [1e-1, 1e-2, 1e-3];

pub fn analyze(opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    let records = read_records_file(&opts.records)?;
    if records.is_empty() {
        return Err(Error::InsufficientRecords("records file has no rows".into()));
    }
    let manifest_path = opts
        .manifest
        .clone()
        .unwrap_or_else(|| opts.records.with_extension("json"));
    let manifest = if manifest_path.exists() {
        Some(Manifest::read(&manifest_path)?)
    } else if opts.manifest.is_some() {
        return Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("manifest {} not found", manifest_path.display()),
        )));
    } else {
        None
    };
    let class = manifest
        .as_ref()
        .map(|m| -> Result<Classification> {
            classify_regularization(
                parse_rational(&m.theta1_exact)?,
                parse_rational(&m.theta2_exact)?,
            )
        })
        .transpose()?;
    let (exponent, source) = match (opts.exponent, manifest.as_ref().and_then(|m| m.singularity_exponent)) {
        (Some(a), _) => (a, "override"),
        (None, Some(a)) => (a, "manifest"),
        (None, None) => match &manifest {
            Some(m) => (hausdorff_exponent(m.theta1, m.theta2)?, "model"),
            None => {
                return Err(Error::Config(format!(
                    "no manifest at {} to derive the exponent from; pass an exponent",
                    manifest_path.display()
                )))
            }
        },
    };
    let threshold = opts
        .threshold
        .or(manifest.as_ref().and_then(|m| m.singularity_threshold))
        .or(manifest.as_ref().map(|m| m.blowup_guard_norm))
        .unwrap_or(1e8);
    let horizon = opts.horizon.unwrap_or(records[records.len() - 1].t);
    let series: Vec<(f64, f64)> = records.iter().map(|r| (r.t, r.n1theta.sqrt())).collect();
    let regular = detect_regular_set(&series, threshold, horizon)?;
    let singular: Vec<(f64, f64)> = regular.singular_set();
    let mut premeasure = Vec::new();
    for eps in [f64::INFINITY, 1.0, 1e-1, 1e-2, 1e-3] {
        let q = HausdorffQuery::new(exponent, eps)?;
        premeasure.push(PremeasureEntry {
            eps: eps.is_finite().then_some(eps),
            value: hausdorff_premeasure(&singular, &q)?,
        });
    }
    let recovering = ANALYSIS_EPS
        .iter()
        .map(|&eps| {
            recovering_bound(&regular, exponent, eps).map(|r| RecoveringEntry {
                eps,
                kept_components: r.kept,
                cover_sum: r.cover_sum,
                grouped_sum: r.grouped_sum,
                tail_sum: r.tail_sum,
                tail_length: r.tail_length,
                chain_holds: r.chain_holds,
                vacuous: r.vacuous,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AnalysisReport {
        records_path: opts.records.display().to_string(),
        horizon_time: horizon,
        threshold,
        exponent,
        exponent_source: source.into(),
        regime: class.as_ref().map(|c| c.regime.to_string()),
        classification: class.as_ref().map(|c| c.summary()),
        regular_components: regular.components().iter().map(|&(a, b)| [a, b]).collect(),
        singular_components: singular.iter().filter(|(a, b)| b > a).map(|&(a, b)| [a, b]).collect(),
        singular_measure: regular.singular_measure(),
        regular_sum: singular_sum(&regular, exponent),
        singular_premeasure: premeasure,
        recovering,
        note: "singular set = times where the sampled norm reaches the threshold".into(),
    })
}
