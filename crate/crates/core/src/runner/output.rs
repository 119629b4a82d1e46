use std::io::{BufRead, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::EnergyRecord;
use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

pub const CSV_HEADER: &str = "t,e0,e_theta,d1,d1_theta,work,n1theta,v_l2,v_h1";

/// One CSV row: 17 significant digits per value, LF terminated.
pub fn csv_line(r: &EnergyRecord) -> String {
    let v = [r.t, r.e0, r.e_theta, r.d1, r.d1_theta, r.work, r.n1theta, r.v_l2, r.v_h1];
    let mut s = v.iter().map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(",");
    s.push('\n');
    s
}

pub fn write_records(mut w: impl Write, records: &[EnergyRecord]) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        w.write_all(csv_line(r).as_bytes())?;
    }
    Ok(())
}

/// Parses the records format; columns beyond the CSV set stay zero.
pub fn read_records(reader: impl BufRead) -> Result<Vec<EnergyRecord>> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("records file is empty".into()))??;
    if header.trim_end() != CSV_HEADER {
        return Err(Error::Parse(format!("unexpected records header '{header}'")));
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let v: Vec<f64> = line
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("records line {}: {e}", i + 2)))?;
        if v.len() != 9 {
            return Err(Error::Parse(format!(
                "records line {}: expected 9 columns, got {}",
                i + 2,
                v.len()
            )));
        }
        out.push(EnergyRecord {
            t: v[0],
            e0: v[1],
            e_theta: v[2],
            d1: v[3],
            d1_theta: v[4],
            work: v[5],
            n1theta: v[6],
            v_l2: v[7],
            v_h1: v[8],
            ..EnergyRecord::default()
        });
    }
    Ok(out)
}

pub fn read_records_file(path: &Path) -> Result<Vec<EnergyRecord>> {
    let f = std::fs::File::open(path)?;
    read_records(std::io::BufReader::new(f))
}

/// Dense spectral coefficients of a vector field at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub domain_length: f64,
    pub truncation_radius: usize,
    pub t: f64,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl Snapshot {
    pub fn from_field(v: &SpectralField, t: f64) -> Self {
        Self {
            domain_length: v.grid().length(),
            truncation_radius: v.grid().n(),
            t,
            re: v.data().iter().map(|c| c.re).collect(),
            im: v.data().iter().map(|c| c.im).collect(),
        }
    }

    pub fn to_field(&self, grid: Grid) -> Result<SpectralField> {
        if self.truncation_radius != grid.n() || self.domain_length != grid.length() {
            return Err(Error::Config(format!(
                "snapshot grid (L = {}, N = {}) does not match the run (L = {}, N = {})",
                self.domain_length,
                self.truncation_radius,
                grid.length(),
                grid.n()
            )));
        }
        let mut v = SpectralField::zero_vector(grid);
        if self.re.len() != v.data().len() || self.im.len() != v.data().len() {
            return Err(Error::Parse("snapshot coefficient count does not match its grid".into()));
        }
        for (c, (re, im)) in v.data_mut().iter_mut().zip(self.re.iter().zip(&self.im)) {
            *c = Complex64::new(*re, *im);
        }
        Ok(v)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let w = std::io::BufWriter::new(std::fs::File::create(path)?);
        serde_json::to_writer(w, self)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let r = std::io::BufReader::new(std::fs::File::open(path)?);
        Ok(serde_json::from_reader(r)?)
    }
}

/// Flat description of a finished run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub code_version: String,
    pub status: String,
    pub model: String,
    pub theta1: f64,
    pub theta2: f64,
    pub theta1_exact: String,
    pub theta2_exact: String,
    pub regime: String,
    pub classification: String,
    pub admissible: bool,
    pub gamma: f64,
    pub hausdorff_exponent: Option<f64>,
    pub alpha_filter_length: f64,
    pub nu_viscosity: f64,
    pub domain_length: f64,
    pub truncation_radius: usize,
    pub collocation_points_per_axis: usize,
    pub dt_time_step: f64,
    pub mean_dt_time_step: f64,
    pub t_end_time: f64,
    pub t_final_time: f64,
    pub steps: u64,
    pub seed: u64,
    pub init: String,
    pub forcing: String,
    pub forcing_scale: f64,
    pub diag_interval_steps: u64,
    pub blowup_guard_norm: f64,
    pub c_const: f64,
    pub y0_initial: f64,
    pub predicted_t_star_time: Option<f64>,
    pub m_bound: Option<f64>,
    pub blowup_reason: Option<String>,
    pub blowup_t_last_finite_time: Option<f64>,
    pub records_path: String,
    pub records_count: usize,
    pub snapshot_path: Option<String>,
    pub singularity_threshold: Option<f64>,
    pub singularity_exponent: Option<f64>,
    pub energy_identity_residual: Option<f64>,
    pub wall_time_seconds: f64,
}

impl Manifest {
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}
