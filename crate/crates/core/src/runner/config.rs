use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use num_rational::Rational64;

use super::preset::{parse_rational, preset, to_f64};
use crate::dynamics::{ForcingMode, ForcingSpec, ModelParams};
use crate::error::{Error, Result};
use crate::spectral::Grid;

/// Which `(θ₁, θ₂)` to run.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelChoice {
    Preset(String),
    Custom { theta1: Rational64, theta2: Rational64 },
}

impl ModelChoice {
    pub fn thetas(&self) -> Result<(Rational64, Rational64)> {
        match self {
            ModelChoice::Preset(name) => {
                let p = preset(name)?;
                Ok((p.theta1, p.theta2))
            }
            ModelChoice::Custom { theta1, theta2 } => Ok((*theta1, *theta2)),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            ModelChoice::Preset(name) => name,
            ModelChoice::Custom { .. } => "custom",
        }
    }
}

/// Initial velocity.
#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    Zero,
    SingleMode { k: [i64; 3], amplitude: [Complex64; 3] },
    /// Seeded divergence-free field with moduli `scale · (1 + |k|)^{-decay}`.
    Random { decay: f64, scale: f64 },
    /// Snapshot written by a previous run.
    File(PathBuf),
}

/// Everything a run needs, mirroring the `key = value` config format.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelChoice,
    pub alpha: f64,
    pub nu: f64,
    pub length: f64,
    pub n: usize,
    /// `0` selects the automatic step.
    pub dt: f64,
    pub t_end: f64,
    pub seed: u64,
    pub init: InitSpec,
    pub forcing: Vec<ForcingMode>,
    pub forcing_scale: f64,
    pub diag_interval: u64,
    pub blowup_guard: f64,
    pub c_const: f64,
    pub records: PathBuf,
    pub manifest: PathBuf,
    pub snapshot: Option<PathBuf>,
    pub singularity_threshold: Option<f64>,
    pub singularity_exponent: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelChoice::Preset("bardina".into()),
            alpha: 0.1,
            nu: 1e-2,
            length: 2.0 * PI,
            n: 16,
            dt: 0.0,
            t_end: 1.0,
            seed: 0,
            init: InitSpec::Random { decay: 2.0, scale: 1.0 },
            forcing: Vec::new(),
            forcing_scale: 1.0,
            diag_interval: 10,
            blowup_guard: 1e8,
            c_const: 1.0,
            records: PathBuf::from("run.csv"),
            manifest: PathBuf::from("run.json"),
            snapshot: None,
            singularity_threshold: None,
            singularity_exponent: None,
        }
    }
}

fn cfg(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| cfg(format!("{key}: cannot parse '{v}'")))
}

/// `re` or `re:im`.
fn complex(key: &str, v: &str) -> Result<Complex64> {
    match v.split_once(':') {
        Some((re, im)) => Ok(Complex64::new(num(key, re)?, num(key, im)?)),
        None => Ok(Complex64::new(num(key, v)?, 0.0)),
    }
}

fn triple<T>(key: &str, v: &str, f: impl Fn(&str, &str) -> Result<T>) -> Result<[T; 3]> {
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(cfg(format!("{key}: expected three comma-separated entries, got '{v}'")));
    }
    Ok([f(key, parts[0])?, f(key, parts[1])?, f(key, parts[2])?])
}

fn wavevector(key: &str, v: &str) -> Result<[i64; 3]> {
    triple(key, v, num::<i64>)
}

fn amplitude(key: &str, v: &str) -> Result<[Complex64; 3]> {
    triple(key, v, complex)
}

fn fmt_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else {
        format!("{}:{}", c.re, c.im)
    }
}

pub(crate) fn fmt_amplitude(a: &[Complex64; 3]) -> String {
    a.iter().map(|c| fmt_complex(*c)).collect::<Vec<_>>().join(", ")
}

pub(crate) fn fmt_k(k: &[i64; 3]) -> String {
    format!("{}, {}, {}", k[0], k[1], k[2])
}

impl RunConfig {
    /// Parses the `key = value` format. `#` starts a comment; `forcing_mode`
    /// may repeat.
    pub fn parse(text: &str) -> Result<Self> {
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        let mut forcing_lines = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| cfg(format!("line {}: expected 'key = value'", lineno + 1)))?;
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if k == "forcing_mode" {
                forcing_lines.push(v);
            } else if kv.insert(k.clone(), v).is_some() {
                return Err(cfg(format!("line {}: duplicate key '{k}'", lineno + 1)));
            }
        }
        let mut c = RunConfig::default();
        let mut take = |key: &str| kv.remove(key);

        let rational = |key: &str, v: String| parse_rational(&v).map_err(|e| cfg(format!("{key}: {e}")));
        let theta1 = take("theta1").map(|v| rational("theta1", v)).transpose()?;
        let theta2 = take("theta2").map(|v| rational("theta2", v)).transpose()?;
        let model = take("model");
        c.model = match (model.as_deref(), theta1, theta2) {
            (None | Some("custom"), Some(theta1), Some(theta2)) => ModelChoice::Custom { theta1, theta2 },
            (Some("custom"), _, _) => return Err(cfg("model = custom needs theta1 and theta2")),
            (Some(name), None, None) => {
                preset(name)?;
                ModelChoice::Preset(name.to_string())
            }
            (None, None, None) => c.model,
            _ => return Err(cfg("give either a preset model or both theta1 and theta2")),
        };
        if let Some(v) = take("alpha") {
            c.alpha = num("alpha", &v)?;
        }
        if let Some(v) = take("nu") {
            c.nu = num("nu", &v)?;
        }
        if let Some(v) = take("L") {
            c.length = if v == "2pi" { 2.0 * PI } else { num("L", &v)? };
        }
        if let Some(v) = take("N") {
            c.n = num("N", &v)?;
        }
        if let Some(v) = take("dt") {
            c.dt = num("dt", &v)?;
        }
        if let Some(v) = take("t_end") {
            c.t_end = num("t_end", &v)?;
        }
        if let Some(v) = take("seed") {
            c.seed = num("seed", &v)?;
        }
        let init = take("init");
        let init_k = take("init_k");
        let init_amp = take("init_amplitude");
        let init_decay = take("init_decay");
        let init_scale = take("init_scale");
        let init_path = take("init_path");
        c.init = match init.as_deref() {
            None | Some("random") => InitSpec::Random {
                decay: init_decay.map(|v| num("init_decay", &v)).transpose()?.unwrap_or(2.0),
                scale: init_scale.map(|v| num("init_scale", &v)).transpose()?.unwrap_or(1.0),
            },
            Some("zero") => InitSpec::Zero,
            Some("single_mode") => InitSpec::SingleMode {
                k: wavevector("init_k", &init_k.ok_or_else(|| cfg("single_mode needs init_k"))?)?,
                amplitude: amplitude(
                    "init_amplitude",
                    &init_amp.ok_or_else(|| cfg("single_mode needs init_amplitude"))?,
                )?,
            },
            Some("file") => InitSpec::File(PathBuf::from(
                init_path.ok_or_else(|| cfg("init = file needs init_path"))?,
            )),
            Some(other) => {
                return Err(cfg(format!(
                    "unknown init '{other}' (zero, single_mode, random, file)"
                )))
            }
        };
        for line in forcing_lines {
            let (k, a) = line
                .split_once(';')
                .ok_or_else(|| cfg(format!("forcing_mode: expected 'kx, ky, kz; ax, ay, az', got '{line}'")))?;
            c.forcing.push(ForcingMode {
                k: wavevector("forcing_mode", k)?,
                amplitude: amplitude("forcing_mode", a)?,
            });
        }
        if let Some(v) = take("forcing_scale") {
            c.forcing_scale = num("forcing_scale", &v)?;
        }
        if let Some(v) = take("diag_interval") {
            c.diag_interval = num("diag_interval", &v)?;
        }
        if let Some(v) = take("blowup_guard") {
            c.blowup_guard = num("blowup_guard", &v)?;
        }
        if let Some(v) = take("c_const") {
            c.c_const = num("c_const", &v)?;
        }
        let records = take("records");
        let manifest = take("manifest");
        if let Some(v) = records {
            c.records = PathBuf::from(v);
            c.manifest = c.records.with_extension("json");
        }
        if let Some(v) = manifest {
            c.manifest = PathBuf::from(v);
        }
        c.snapshot = take("snapshot").map(PathBuf::from);
        c.singularity_threshold = take("singularity_threshold")
            .map(|v| num("singularity_threshold", &v))
            .transpose()?;
        c.singularity_exponent = take("singularity_exponent")
            .map(|v| num("singularity_exponent", &v))
            .transpose()?;
        if let Some(k) = kv.keys().next() {
            return Err(cfg(format!("unknown key '{k}'")));
        }
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Renders the config back into the text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        match &self.model {
            ModelChoice::Preset(name) => line("model", name.clone()),
            ModelChoice::Custom { theta1, theta2 } => {
                line("theta1", theta1.to_string());
                line("theta2", theta2.to_string());
            }
        }
        line("alpha", self.alpha.to_string());
        line("nu", self.nu.to_string());
        line("L", self.length.to_string());
        line("N", self.n.to_string());
        line("dt", self.dt.to_string());
        line("t_end", self.t_end.to_string());
        line("seed", self.seed.to_string());
        match &self.init {
            InitSpec::Zero => line("init", "zero".into()),
            InitSpec::SingleMode { k, amplitude } => {
                line("init", "single_mode".into());
                line("init_k", fmt_k(k));
                line("init_amplitude", fmt_amplitude(amplitude));
            }
            InitSpec::Random { decay, scale } => {
                line("init", "random".into());
                line("init_decay", decay.to_string());
                line("init_scale", scale.to_string());
            }
            InitSpec::File(p) => {
                line("init", "file".into());
                line("init_path", p.display().to_string());
            }
        }
        for m in &self.forcing {
            line("forcing_mode", format!("{}; {}", fmt_k(&m.k), fmt_amplitude(&m.amplitude)));
        }
        line("forcing_scale", self.forcing_scale.to_string());
        line("diag_interval", self.diag_interval.to_string());
        line("blowup_guard", self.blowup_guard.to_string());
        line("c_const", self.c_const.to_string());
        line("records", self.records.display().to_string());
        line("manifest", self.manifest.display().to_string());
        if let Some(p) = &self.snapshot {
            line("snapshot", p.display().to_string());
        }
        if let Some(x) = self.singularity_threshold {
            line("singularity_threshold", x.to_string());
        }
        if let Some(x) = self.singularity_exponent {
            line("singularity_exponent", x.to_string());
        }
        out
    }

    /// Checks everything that can be checked without computing.
    pub fn validate(&self) -> Result<()> {
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(cfg(format!("t_end must be positive, got {}", self.t_end)));
        }
        if self.n < 2 {
            return Err(cfg(format!("N must be at least 2, got {}", self.n)));
        }
        if !(self.dt == 0.0 || (self.dt.is_finite() && self.dt > 0.0)) {
            return Err(cfg(format!("dt must be positive or 0 for auto, got {}", self.dt)));
        }
        if self.diag_interval == 0 {
            return Err(cfg("diag_interval must be at least 1"));
        }
        if !(self.blowup_guard > 0.0) {
            return Err(cfg("blowup_guard must be positive"));
        }
        if !(self.c_const > 0.0 && self.c_const.is_finite()) {
            return Err(cfg("c_const must be positive"));
        }
        if let InitSpec::Random { decay, scale } = self.init {
            if !(decay >= 0.0 && scale.is_finite()) {
                return Err(cfg("init_decay must be non-negative and init_scale finite"));
            }
        }
        if let Some(t) = self.singularity_threshold {
            if !(t > 0.0) {
                return Err(cfg("singularity_threshold must be positive"));
            }
        }
        if let Some(a) = self.singularity_exponent {
            if !(a > 0.0 && a <= 1.0) {
                return Err(cfg("singularity_exponent must lie in (0, 1]"));
            }
        }
        self.model_params().map(|_| ())
    }

    pub fn thetas(&self) -> Result<(Rational64, Rational64)> {
        self.model.thetas()
    }

    /// Model parameters with forcing attached.
    pub fn model_params(&self) -> Result<ModelParams> {
        let (t1, t2) = self.thetas()?;
        let grid = Grid::new(self.length, self.n).map_err(|e| cfg(e.to_string()))?;
        let forcing = if self.forcing.is_empty() {
            ForcingSpec::none()
        } else {
            ForcingSpec::modes(self.forcing.clone())
                .map_err(|e| cfg(e.to_string()))?
                .with_scale(self.forcing_scale)
        };
        ModelParams::new(to_f64(t1), to_f64(t2), self.alpha, self.nu, grid)
            .and_then(|p| p.with_forcing(forcing))
            .map_err(|e| cfg(e.to_string()))
    }
}
