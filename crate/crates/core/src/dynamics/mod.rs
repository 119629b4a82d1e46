//! Right-hand side of the filtered model and its time integration.
//!
//! The velocity `v` evolves by
//! `v_t + div(ṽ ⊗ v̄) - ν Δv = -∇p + f`, where `ṽ` and `v̄` are the fractional
//! Helmholtz filters of `v` with orders `θ₁` and `θ₂`.

mod integrator;
mod nonlinear;

pub use integrator::{
    integrate, step, BlowupEvent, BlowupReason, DtPolicy, IntegrationOutcome, Integrator,
    IntegratorConfig,
};
pub use nonlinear::{nonlinear_term, pressure_field, tendency, NonlinearEvaluator};

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::filters::FilterParams;
use crate::spectral::{Grid, SpectralField};

/// One forced Fourier mode `a e^{ik·x} + c.c.`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcingMode {
    pub k: [i64; 3],
    pub amplitude: [Complex64; 3],
}

/// Time-scalar modulation `t -> g(t)` multiplying the forcing.
pub type Modulation = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Spectrally sparse body force `f(t) = scale · g(t) · Σ (a e^{ik·x} + c.c.)`.
#[derive(Clone, Default)]
pub struct ForcingSpec {
    modes: Vec<ForcingMode>,
    scale: f64,
    modulation: Option<Modulation>,
}

impl fmt::Debug for ForcingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ForcingSpec")
            .field("modes", &self.modes)
            .field("scale", &self.scale)
            .field("modulated", &self.modulation.is_some())
            .finish()
    }
}

impl ForcingSpec {
    pub fn none() -> Self {
        Self::default()
    }

    /// Forcing on the given modes; each amplitude must satisfy `k·a = 0`.
    pub fn modes(modes: Vec<ForcingMode>) -> Result<Self> {
        for m in &modes {
            if m.k == [0, 0, 0] {
                return Err(invalid("forcing cannot act on the mean mode"));
            }
            let kk = (m.k.iter().map(|c| (c * c) as f64).sum::<f64>()).sqrt();
            let amp = m.amplitude.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            let dot = m.amplitude[0] * m.k[0] as f64
                + m.amplitude[1] * m.k[1] as f64
                + m.amplitude[2] * m.k[2] as f64;
            if dot.norm() > 1e-12 * kk * amp.max(f64::MIN_POSITIVE) {
                return Err(invalid(format!(
                    "forcing amplitude at k = {:?} is not divergence-free",
                    m.k
                )));
            }
        }
        Ok(Self {
            modes,
            scale: 1.0,
            modulation: None,
        })
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_modulation(mut self, g: Modulation) -> Self {
        self.modulation = Some(g);
        self
    }

    pub fn forced_modes(&self) -> &[ForcingMode] {
        &self.modes
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn is_none(&self) -> bool {
        self.modes.is_empty() || self.scale == 0.0
    }

    /// Scalar factor multiplying the spatial pattern at time `t`.
    pub fn factor(&self, t: f64) -> f64 {
        match &self.modulation {
            Some(g) => self.scale * g(t),
            None => self.scale,
        }
    }

    /// Spatial pattern `Σ (a e^{ik·x} + c.c.)` on `grid`, unscaled.
    pub fn pattern(&self, grid: &Grid) -> Result<SpectralField> {
        let mut f = SpectralField::zero_vector(*grid);
        for m in &self.modes {
            if !grid.contains(m.k) {
                return Err(invalid(format!(
                    "forcing mode {:?} lies outside truncation radius {}",
                    m.k,
                    grid.n()
                )));
            }
            let sum: Vec<Complex64> = (0..3).map(|c| f.get(c, m.k) + m.amplitude[c]).collect();
            f.set_pair(m.k, &sum)?;
        }
        Ok(f)
    }
}

/// Knobs of the model family.
#[derive(Debug, Clone)]
pub struct ModelParams {
    pub theta1: f64,
    pub theta2: f64,
    pub alpha: f64,
    pub nu: f64,
    pub grid: Grid,
    pub forcing: ForcingSpec,
}

impl ModelParams {
    pub fn new(theta1: f64, theta2: f64, alpha: f64, nu: f64, grid: Grid) -> Result<Self> {
        if !(nu.is_finite() && nu > 0.0) {
            return Err(invalid(format!("viscosity must be positive, got {nu}")));
        }
        // validates alpha and both exponents
        FilterParams::new(alpha, theta1)?;
        FilterParams::new(alpha, theta2)?;
        Ok(Self {
            theta1,
            theta2,
            alpha,
            nu,
            grid,
            forcing: ForcingSpec::none(),
        })
    }

    pub fn with_forcing(mut self, forcing: ForcingSpec) -> Result<Self> {
        forcing.pattern(&self.grid)?;
        self.forcing = forcing;
        Ok(self)
    }

    /// Filter producing the advecting velocity `ṽ`.
    pub fn advecting_filter(&self) -> FilterParams {
        FilterParams::new(self.alpha, self.theta1).expect("validated at construction")
    }

    /// Filter producing the advected velocity `v̄`.
    pub fn advected_filter(&self) -> FilterParams {
        FilterParams::new(self.alpha, self.theta2).expect("validated at construction")
    }

    /// Forcing field at time `t`.
    pub fn forcing_at(&self, t: f64) -> Result<SpectralField> {
        let mut f = self.forcing.pattern(&self.grid)?;
        f.scale(self.forcing.factor(t));
        Ok(f)
    }
}

/// The integrator's unit of progress.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationState {
    pub t: f64,
    pub v: SpectralField,
    pub step_index: u64,
}

impl SimulationState {
    pub fn new(t: f64, v: SpectralField) -> Result<Self> {
        v.require_vector()?;
        Ok(Self {
            t,
            v,
            step_index: 0,
        })
    }
}
